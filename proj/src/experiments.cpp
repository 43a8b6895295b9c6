#include "vsnopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vsnopt/solver.hpp"

namespace vsnopt {

namespace {

std::string format_fixed(double value, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

std::string format_shortest(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string opt_energy(const std::optional<Energy>& value) {
  return value ? std::to_string(*value) : std::string();
}

std::string opt_fraction(const std::optional<double>& value) {
  return value ? format_fixed(*value, 6) : std::string();
}

struct Stat {
  int count = 0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double v) {
    count += 1;
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
  }
};

}  // namespace

std::pair<int, int> count_nodes(const AssignmentPlan& plan) {
  std::set<int> ps_hosts;
  for (const Assignment& a : plan.assignments)
    if (a.mode == Mode::ps) ps_hosts.insert(a.node_id);
  return {static_cast<int>(plan.virtualized.size()), static_cast<int>(ps_hosts.size())};
}

ComparisonRecord compare(const Scenario& s) {
  ComparisonRecord rec;
  rec.seed = s.seed.value_or(0);

  const SolveResult virt = solve_exact(s);
  const SolveResult trad = solve_traditional(s);

  if (virt.status == SolveStatus::optimal) {
    rec.virt_cost_nj = virt.cost.total_nj;
    const auto [virtualized, physical] = count_nodes(virt.plan);
    rec.nodes_virtualized = virtualized;
    rec.nodes_physical_mode = physical;
    rec.nodes_used_virt = virtualized + physical;
  }
  if (trad.status == SolveStatus::optimal) {
    rec.trad_cost_nj = trad.cost.total_nj;
    rec.nodes_used_trad = count_nodes(trad.plan).second;
  }
  if (rec.virt_cost_nj && rec.trad_cost_nj && *rec.trad_cost_nj > 0) {
    rec.savings_fraction =
        1.0 - static_cast<double>(*rec.virt_cost_nj) / static_cast<double>(*rec.trad_cost_nj);
  }
  if (rec.virt_cost_nj && rec.trad_cost_nj && rec.nodes_used_virt > 0 &&
      rec.nodes_used_trad > 0) {
    rec.node_ratio =
        static_cast<double>(rec.nodes_used_trad) / static_cast<double>(rec.nodes_used_virt);
  }
  return rec;
}

SweepReport run_sweep(const std::vector<SweepFamily>& families,
                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_sweep: seed list must not be empty");
  for (const SweepFamily& family : families) check_config(family.config);

  SweepReport report;
  report.families = families;
  report.seeds = seeds;

  const std::size_t cells = families.size() * seeds.size();
  report.records.resize(cells);

  auto run_cell = [&](std::size_t cell) {
    const SweepFamily& family = families[cell / seeds.size()];
    const std::uint64_t seed = seeds[cell % seeds.size()];
    GenerationConfig config = family.config;
    config.seed = seed;
    ComparisonRecord rec;
    try {
      rec = compare(generate(config));
    } catch (const GenerationError& e) {
      rec.generation_failed = true;
      rec.generation_error = e.what();
    }
    rec.family = family.label;
    rec.seed = seed;
    report.records[cell] = std::move(rec);
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers = std::min<std::size_t>(cells, hw == 0 ? 1 : hw);
  if (workers <= 1) {
    for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t cell = next.fetch_add(1);
          if (cell >= cells) return;
          run_cell(cell);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  for (std::size_t f = 0; f < families.size(); ++f) {
    FamilyAggregate agg;
    agg.family = families[f].label;
    Stat savings, ratio;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const ComparisonRecord& rec = report.records[f * seeds.size() + k];
      agg.records += 1;
      if (rec.generation_failed) {
        agg.generation_failures += 1;
        continue;
      }
      if (!rec.virt_cost_nj) agg.virt_infeasible += 1;
      if (!rec.trad_cost_nj) agg.trad_infeasible += 1;
      if (rec.savings_fraction) savings.add(*rec.savings_fraction);
      if (rec.node_ratio) ratio.add(*rec.node_ratio);
    }
    if (savings.count > 0) {
      agg.savings_min = savings.min;
      agg.savings_mean = savings.sum / savings.count;
      agg.savings_max = savings.max;
    }
    if (ratio.count > 0) {
      agg.ratio_min = ratio.min;
      agg.ratio_mean = ratio.sum / ratio.count;
      agg.ratio_max = ratio.max;
    }
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

const char* const kComparisonCsvHeader =
    "family,seed,virt_status,virt_cost_nj,trad_status,trad_cost_nj,nodes_virtualized,"
    "nodes_physical_mode,nodes_used_virt,nodes_used_trad,savings_fraction,node_ratio";

void write_csv(const SweepReport& report, std::ostream& out) {
  out << kComparisonCsvHeader << '\n';
  for (const ComparisonRecord& rec : report.records) {
    out << rec.family << ',' << rec.seed << ',';
    if (rec.generation_failed) {
      out << "error,,error,,,,,,,\n";
      continue;
    }
    out << (rec.virt_cost_nj ? "optimal" : "infeasible") << ',' << opt_energy(rec.virt_cost_nj)
        << ',' << (rec.trad_cost_nj ? "optimal" : "infeasible") << ','
        << opt_energy(rec.trad_cost_nj) << ',' << rec.nodes_virtualized << ','
        << rec.nodes_physical_mode << ',' << rec.nodes_used_virt << ',' << rec.nodes_used_trad
        << ',' << opt_fraction(rec.savings_fraction) << ',' << opt_fraction(rec.node_ratio)
        << '\n';
  }
}

std::string report_csv(const SweepReport& report) {
  std::ostringstream out;
  write_csv(report, out);
  return out.str();
}

std::string summary_table(const SweepReport& report) {
  std::ostringstream out;
  out << "sweep: " << report.families.size() << " family(ies) x " << report.seeds.size()
      << " seed(s)\n";
  for (const SweepFamily& family : report.families) {
    const GenerationConfig& c = family.config;
    out << "  " << family.label << ": area " << format_shortest(c.width_m) << "x"
        << format_shortest(c.height_m) << " m, " << c.n_nodes << " nodes, " << c.n_tasks
        << " tasks, range " << format_shortest(c.range_m) << " m, budgets ["
        << c.budget_lo_nj << ", " << c.budget_hi_nj << "] nJ, e_ps " << c.params.e_ps_nj
        << " nJ, e_vs " << c.params.e_vs_nj << " nJ, max_vs " << c.params.max_vs << "\n";
  }
  out << "\n";
  out << "family  records  gen_err  virt_inf  trad_inf  savings min/mean/max        node_ratio "
         "min/mean/max\n";
  for (const FamilyAggregate& agg : report.aggregates) {
    auto triple = [](const std::optional<double>& lo, const std::optional<double>& mid,
                     const std::optional<double>& hi) {
      if (!lo) return std::string("-");
      return format_fixed(*lo, 4) + "/" + format_fixed(*mid, 4) + "/" + format_fixed(*hi, 4);
    };
    out << agg.family << "  " << agg.records << "  " << agg.generation_failures << "  "
        << agg.virt_infeasible << "  " << agg.trad_infeasible << "  "
        << triple(agg.savings_min, agg.savings_mean, agg.savings_max) << "  "
        << triple(agg.ratio_min, agg.ratio_mean, agg.ratio_max) << "\n";
  }
  return out.str();
}

}  // namespace vsnopt
