#include "vsnopt/cli.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "vsnopt/experiments.hpp"
#include "vsnopt/model.hpp"
#include "vsnopt/plot.hpp"
#include "vsnopt/scenario.hpp"
#include "vsnopt/solver.hpp"

namespace vsnopt {

namespace {

std::int64_t parse_i64(std::string_view text, const std::string& what) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(what + ": '" + std::string(text) + "' is not an integer");
  return value;
}

std::uint64_t parse_u64(std::string_view text, const std::string& what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(what + ": '" + std::string(text) +
                                "' is not a nonnegative integer");
  return value;
}

double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(what + ": '" + std::string(text) + "' is not a number");
  return value;
}

std::pair<double, double> parse_area(const std::string& text) {
  const auto sep = text.find('x');
  if (sep == std::string::npos)
    throw std::invalid_argument("--area expects WxH, e.g. 100x100");
  return {parse_double(text.substr(0, sep), "--area"),
          parse_double(text.substr(sep + 1), "--area")};
}

std::pair<std::string_view, std::string_view> split_range(std::string_view text,
                                                          const std::string& what) {
  const auto sep = text.find("..");
  if (sep == std::string_view::npos)
    throw std::invalid_argument(what + " expects LO..HI, e.g. 1..100");
  return {text.substr(0, sep), text.substr(sep + 2)};
}

// Generation parameters shared by `generate` and `sweep`.
struct GenOptions {
  std::uint64_t seed = 0;
  int nodes = 0;
  int tasks = 0;
  std::string area;
  double range = 0.0;
  std::int64_t eps_nj = 0;
  std::int64_t evs_nj = 0;
  int max_vs = 0;
  std::string budget;
  bool allow_uncovered = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* nodes_opt = nullptr;
  CLI::Option* tasks_opt = nullptr;
  CLI::Option* area_opt = nullptr;
  CLI::Option* range_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* evs_opt = nullptr;
  CLI::Option* max_vs_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
};

void add_override_options(CLI::App* cmd, GenOptions& g) {
  g.nodes_opt = cmd->add_option("--nodes", g.nodes, "Number of sensor nodes");
  g.tasks_opt = cmd->add_option("--tasks", g.tasks, "Number of sensing tasks");
  g.area_opt = cmd->add_option("--area", g.area, "Area in meters as WxH, e.g. 100x100");
  g.range_opt = cmd->add_option("--range", g.range, "Sensing range in meters");
  g.eps_opt = cmd->add_option("--eps-nj", g.eps_nj, "Energy per active node, nJ");
  g.evs_opt = cmd->add_option("--evs-nj", g.evs_nj, "Energy overhead per virtual sensor, nJ");
  g.max_vs_opt = cmd->add_option("--max-vs", g.max_vs, "Virtual sensors per node");
  g.budget_opt =
      cmd->add_option("--budget-nj", g.budget, "Node budget interval as LO..HI, nJ");
  cmd->add_flag("--allow-uncovered", g.allow_uncovered,
                "Keep task positions that no node covers");
}

GenerationConfig build_config(const GenOptions& g, const std::string* preset) {
  GenerationConfig config = preset != nullptr ? preset_config(*preset) : GenerationConfig{};
  if (g.seed_opt != nullptr && g.seed_opt->count() > 0) config.seed = g.seed;
  if (g.nodes_opt->count() > 0) config.n_nodes = g.nodes;
  if (g.tasks_opt->count() > 0) config.n_tasks = g.tasks;
  if (g.area_opt->count() > 0) {
    const auto [w, h] = parse_area(g.area);
    config.width_m = w;
    config.height_m = h;
  }
  if (g.range_opt->count() > 0) config.range_m = g.range;
  if (g.eps_opt->count() > 0) config.params.e_ps_nj = g.eps_nj;
  if (g.evs_opt->count() > 0) config.params.e_vs_nj = g.evs_nj;
  if (g.max_vs_opt->count() > 0) config.params.max_vs = g.max_vs;
  if (g.budget_opt->count() > 0) {
    const auto [lo, hi] = split_range(g.budget, "--budget-nj");
    config.budget_lo_nj = parse_i64(lo, "--budget-nj");
    config.budget_hi_nj = parse_i64(hi, "--budget-nj");
  }
  config.require_coverage = !g.allow_uncovered;
  check_config(config);
  return config;
}

void print_cost(std::ostream& out, const CostBreakdown& cost) {
  out << "cost: c_ps=" << cost.c_ps_nj << " nJ, c_vs=" << cost.c_vs_nj
      << " nJ, total=" << cost.total_nj << " nJ\n";
}

void print_stats(std::ostream& out, const SolveStats& stats) {
  out << "search: " << stats.nodes_explored << " nodes, " << stats.bound_prunes << " prunes, "
      << stats.flow_calls << " flow calls, " << stats.wall_time_s << " s\n";
}

int run_solve(const std::string& scenario_path, const std::string& plan_path, bool baseline,
              std::ostream& out) {
  const Scenario s = load_scenario(scenario_path);
  const SolveResult result = baseline ? solve_traditional(s) : solve_exact(s);
  out << "status: " << to_string(result.status) << "\n";
  if (result.status == SolveStatus::infeasible) return 1;
  print_cost(out, result.cost);
  if (!baseline) print_stats(out, result.stats);
  if (!plan_path.empty()) {
    save_plan({scenario_path, result.plan, result.cost}, plan_path);
    out << "wrote plan " << plan_path << "\n";
  }
  return 0;
}

int run_validate(const std::string& scenario_path, const std::string& plan_path,
                 std::ostream& out) {
  const Scenario s = load_scenario(scenario_path);
  const PlanFile f = load_plan(plan_path);
  const ValidationResult result = validate_plan(f.plan, s);
  for (const std::string& warning : result.warnings) out << "warning: " << warning << "\n";
  if (result.ok()) {
    out << "OK\n";
    return 0;
  }
  for (const Violation& v : result.violations)
    out << "violation[" << to_string(v.kind) << "]: " << v.message << "\n";
  out << "INVALID: " << result.violations.size() << " violation(s)\n";
  return 1;
}

void print_record(std::ostream& out, const ComparisonRecord& rec) {
  auto cost = [](const std::optional<Energy>& c) {
    return c ? std::to_string(*c) + " nJ" : std::string("infeasible");
  };
  out << "virtualized: " << cost(rec.virt_cost_nj) << " on " << rec.nodes_used_virt
      << " node(s) (" << rec.nodes_virtualized << " virtualized, " << rec.nodes_physical_mode
      << " physical-mode)\n";
  out << "traditional: " << cost(rec.trad_cost_nj) << " on " << rec.nodes_used_trad
      << " node(s)\n";
  if (rec.savings_fraction)
    out << "savings: " << *rec.savings_fraction * 100.0 << "%\n";
  if (rec.node_ratio) out << "node ratio: " << *rec.node_ratio << "\n";
}

int run_compare(const std::string& scenario_path, const std::string& csv_path,
                std::ostream& out) {
  const Scenario s = load_scenario(scenario_path);
  ComparisonRecord rec = compare(s);
  rec.family = std::filesystem::path(scenario_path).stem().string();
  print_record(out, rec);
  if (!csv_path.empty()) {
    SweepReport report;
    report.records.push_back(rec);
    write_file_atomic(csv_path, report_csv(report));
    out << "wrote csv " << csv_path << "\n";
  }
  return rec.virt_cost_nj ? 0 : 1;
}

int run_plot(const std::string& scenario_path, const std::string& plan_path,
             const std::string& out_path, bool no_circles, std::ostream& out,
             std::ostream& err) {
  const Scenario s = load_scenario(scenario_path);
  AssignmentPlan plan;
  if (!plan_path.empty()) {
    const PlanFile f = load_plan(plan_path);
    plan = f.plan;
    const ValidationResult check = validate_plan(plan, s);
    if (!check.ok()) {
      err << "plot: plan " << plan_path << " does not validate against " << scenario_path
          << " (" << check.violations.size() << " violation(s)); run 'vsnopt validate' "
          << "to list them\n";
      return 2;
    }
  }
  PlotOptions opts;
  opts.range_circles = !no_circles;
  write_file_atomic(out_path, render_svg(s, plan, opts));
  out << "wrote plot " << out_path << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-minimal sensing-task assignment for node-virtualized wireless sensor "
               "networks"};
  app.name("vsnopt");
  app.require_subcommand(1);

  // generate
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "Generate a random scenario file");
  GenOptions gen;
  std::string gen_preset;
  CLI::Option* gen_preset_opt =
      generate_cmd->add_option("--preset", gen_preset, "Scenario preset")
          ->check(CLI::IsMember({"s1", "s2", "s3"}));
  gen.seed_opt = generate_cmd->add_option("--seed", gen.seed, "Generator seed");
  add_override_options(generate_cmd, gen);
  std::string generate_out;
  generate_cmd->add_option("-o,--output", generate_out, "Output scenario file")->required();

  // solve / baseline
  CLI::App* solve_cmd = app.add_subcommand("solve", "Find the optimal assignment");
  std::string solve_in, solve_out;
  solve_cmd->add_option("scenario", solve_in, "Scenario file")->required();
  solve_cmd->add_option("-o,--output", solve_out, "Output plan file");

  CLI::App* baseline_cmd =
      app.add_subcommand("baseline", "Assign every task to its own physical node");
  std::string baseline_in, baseline_out;
  baseline_cmd->add_option("scenario", baseline_in, "Scenario file")->required();
  baseline_cmd->add_option("-o,--output", baseline_out, "Output plan file");

  // validate
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a plan against a scenario's constraints");
  std::string validate_scenario, validate_plan_path;
  validate_cmd->add_option("scenario", validate_scenario, "Scenario file")->required();
  validate_cmd->add_option("plan", validate_plan_path, "Plan file")->required();

  // compare
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Solve one scenario both ways and report the gap");
  std::string compare_in, compare_csv;
  compare_cmd->add_option("scenario", compare_in, "Scenario file")->required();
  compare_cmd->add_option("--csv", compare_csv, "Write the record as CSV");

  // sweep
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Generate, solve and compare over presets x seeds");
  GenOptions sweep_gen;
  std::vector<std::string> sweep_presets;
  sweep_cmd->add_option("--preset", sweep_presets, "Preset families to sweep")
      ->check(CLI::IsMember({"s1", "s2", "s3"}));
  add_override_options(sweep_cmd, sweep_gen);
  std::string sweep_seeds;
  std::uint64_t sweep_seed = 0;
  CLI::Option* sweep_seeds_opt =
      sweep_cmd->add_option("--seeds", sweep_seeds, "Seed range as A..B, inclusive");
  CLI::Option* sweep_seed_opt = sweep_cmd->add_option("--seed", sweep_seed, "Single seed");
  std::string sweep_csv;
  sweep_cmd->add_option("--csv", sweep_csv, "Write one CSV row per record");

  // plot
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render a scenario (and plan) as SVG");
  std::string plot_scenario, plot_plan, plot_out;
  bool plot_no_circles = false;
  plot_cmd->add_option("scenario", plot_scenario, "Scenario file")->required();
  plot_cmd->add_option("plan", plot_plan, "Plan file (optional)");
  plot_cmd->add_option("-o,--output", plot_out, "Output SVG file")->required();
  plot_cmd->add_flag("--no-range-circles", plot_no_circles, "Skip sensing-range circles");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate_cmd) {
      const GenerationConfig config =
          build_config(gen, gen_preset_opt->count() > 0 ? &gen_preset : nullptr);
      const Scenario s = generate(config);
      save_scenario(s, generate_out);
      out << "wrote scenario " << generate_out << " (" << s.nodes.size() << " nodes, "
          << s.tasks.size() << " tasks, seed " << config.seed << ")\n";
      return 0;
    }
    if (*solve_cmd) return run_solve(solve_in, solve_out, /*baseline=*/false, out);
    if (*baseline_cmd) return run_solve(baseline_in, baseline_out, /*baseline=*/true, out);
    if (*validate_cmd) return run_validate(validate_scenario, validate_plan_path, out);
    if (*compare_cmd) return run_compare(compare_in, compare_csv, out);
    if (*sweep_cmd) {
      std::vector<std::uint64_t> seeds;
      if (sweep_seeds_opt->count() > 0) {
        const auto [lo_text, hi_text] = split_range(sweep_seeds, "--seeds");
        const std::uint64_t lo = parse_u64(lo_text, "--seeds");
        const std::uint64_t hi = parse_u64(hi_text, "--seeds");
        if (lo > hi) throw std::invalid_argument("--seeds: range is inverted (A > B)");
        if (hi - lo >= 1'000'000)
          throw std::invalid_argument("--seeds: range wider than 1000000 seeds");
        for (std::uint64_t seed = lo; seed <= hi; ++seed) seeds.push_back(seed);
      }
      if (sweep_seed_opt->count() > 0) seeds.push_back(sweep_seed);
      if (seeds.empty())
        throw std::invalid_argument("sweep needs --seeds A..B or --seed N");

      std::vector<std::string> labels = sweep_presets;
      if (labels.empty()) labels = {"s1", "s2", "s3"};
      std::vector<SweepFamily> families;
      for (const std::string& label : labels)
        families.push_back({label, build_config(sweep_gen, &label)});
      const SweepReport report = run_sweep(families, seeds);
      out << summary_table(report);
      if (!sweep_csv.empty()) {
        write_file_atomic(sweep_csv, report_csv(report));
        out << "wrote csv " << sweep_csv << "\n";
      }
      return 0;
    }
    if (*plot_cmd)
      return run_plot(plot_scenario, plot_plan, plot_out, plot_no_circles, out, err);
    err << "vsnopt: no subcommand selected\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace vsnopt
