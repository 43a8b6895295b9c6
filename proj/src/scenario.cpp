#include "vsnopt/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "vsnopt/rng.hpp"

namespace vsnopt {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ParseError(origin + ": " + what);
}

const json& field(const json& obj, const char* key, const char* ctx, const std::string& origin) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(origin, std::string("missing field '") + key + "' in " + ctx);
  return *it;
}

void check_keys(const json& obj, const char* ctx, const std::string& origin,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional = {}) {
  if (!obj.is_object()) fail(origin, std::string(ctx) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const std::string& key = item.key();
    auto known = [&key](std::initializer_list<const char*> names) {
      return std::any_of(names.begin(), names.end(),
                         [&key](const char* n) { return key == n; });
    };
    if (!known(required) && !known(optional))
      fail(origin, "unknown field '" + key + "' in " + ctx);
  }
  for (const char* key : required) (void)field(obj, key, ctx, origin);
}

double get_double(const json& obj, const char* key, const char* ctx, const std::string& origin) {
  const json& v = field(obj, key, ctx, origin);
  if (!v.is_number()) fail(origin, std::string("field '") + key + "' in " + ctx + " must be a number");
  return v.get<double>();
}

std::int64_t get_int64(const json& obj, const char* key, const char* ctx,
                       const std::string& origin) {
  const json& v = field(obj, key, ctx, origin);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(origin, std::string("field '") + key + "' in " + ctx + " must be an integer");
  return v.get<std::int64_t>();
}

int get_int(const json& obj, const char* key, const char* ctx, const std::string& origin) {
  return static_cast<int>(get_int64(obj, key, ctx, origin));
}

std::uint64_t get_uint64(const json& obj, const char* key, const char* ctx,
                         const std::string& origin) {
  const json& v = field(obj, key, ctx, origin);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(origin, std::string("field '") + key + "' in " + ctx + " must be a nonnegative integer");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw std::runtime_error("error while reading " + path.string());
  return std::move(buf).str();
}

json parse_strict(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

void check_schema_version(const json& obj, const std::string& origin) {
  const std::int64_t version = get_int64(obj, "schema_version", "document", origin);
  if (version != 1)
    fail(origin, "unsupported schema_version " + std::to_string(version) +
                     " (this tool reads version 1)");
}

}  // namespace

void check_config(const GenerationConfig& config) {
  if (!(config.width_m > 0.0) || !(config.height_m > 0.0))
    throw std::invalid_argument("config: area dimensions must be positive");
  if (config.n_nodes < 1) throw std::invalid_argument("config: n_nodes must be at least 1");
  if (config.n_tasks < 1) throw std::invalid_argument("config: n_tasks must be at least 1");
  if (!(config.range_m > 0.0)) throw std::invalid_argument("config: range must be positive");
  if (config.budget_lo_nj < 0)
    throw std::invalid_argument("config: budget interval must be nonnegative");
  if (config.budget_lo_nj > config.budget_hi_nj)
    throw std::invalid_argument("config: budget interval is inverted (lo > hi)");
  if (config.params.e_ps_nj <= 0) throw std::invalid_argument("config: e_ps_nj must be positive");
  if (config.params.e_vs_nj < 0)
    throw std::invalid_argument("config: e_vs_nj must be nonnegative");
  if (config.params.max_vs < 1) throw std::invalid_argument("config: max_vs must be at least 1");
}

Scenario generate(const GenerationConfig& config) {
  check_config(config);
  SplitMix64 rng(config.seed);

  Scenario s;
  s.width_m = config.width_m;
  s.height_m = config.height_m;
  s.params = config.params;
  s.seed = config.seed;

  s.nodes.reserve(config.n_nodes);
  for (int i = 0; i < config.n_nodes; ++i) {
    SensorNode node;
    node.id = i;
    node.pos.x = rng.next_unit() * config.width_m;
    node.pos.y = rng.next_unit() * config.height_m;
    node.range_m = config.range_m;
    s.nodes.push_back(node);
  }
  for (SensorNode& node : s.nodes)
    node.budget_nj = rng.next_in_range(config.budget_lo_nj, config.budget_hi_nj);

  s.tasks.reserve(config.n_tasks);
  for (int j = 0; j < config.n_tasks; ++j) {
    SensingTask task;
    task.id = j;
    bool placed = false;
    const int attempts = config.require_coverage ? kCoverageRetries : 1;
    for (int attempt = 0; attempt < attempts && !placed; ++attempt) {
      task.pos.x = rng.next_unit() * config.width_m;
      task.pos.y = rng.next_unit() * config.height_m;
      placed = !config.require_coverage ||
               std::any_of(s.nodes.begin(), s.nodes.end(),
                           [&task](const SensorNode& n) { return covers(n, task); });
    }
    if (!placed)
      throw GenerationError("task " + std::to_string(j) + ": no covered position after " +
                            std::to_string(kCoverageRetries) + " draws (seed " +
                            std::to_string(config.seed) + ")");
    s.tasks.push_back(task);
  }

  check_scenario(s);
  return s;
}

GenerationConfig preset_config(std::string_view name) {
  GenerationConfig config;  // defaults match s1
  if (name == "s1") {
    return config;
  } else if (name == "s2") {
    config.width_m = config.height_m = 150.0;
    config.n_nodes = 15;
    config.n_tasks = 12;
    return config;
  } else if (name == "s3") {
    config.width_m = config.height_m = 200.0;
    config.n_nodes = 20;
    config.n_tasks = 16;
    return config;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) +
                              "' (expected s1, s2, or s3)");
}

CoverageMatrix build_coverage(const Scenario& s) {
  CoverageMatrix m(static_cast<int>(s.nodes.size()), static_cast<int>(s.tasks.size()));
  for (int i = 0; i < m.node_count(); ++i)
    for (int j = 0; j < m.task_count(); ++j)
      m.set(i, j, covers(s.nodes[i], s.tasks[j]));
  return m;
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["schema_version"] = 1;
  j["area"] = ordered_json{{"w", s.width_m}, {"h", s.height_m}};
  j["params"] = ordered_json{{"e_ps_nj", s.params.e_ps_nj},
                             {"e_vs_nj", s.params.e_vs_nj},
                             {"max_vs", s.params.max_vs}};
  if (s.seed) j["seed"] = *s.seed;
  ordered_json nodes = ordered_json::array();
  for (const SensorNode& n : s.nodes) {
    nodes.push_back(ordered_json{{"id", n.id},
                                 {"x", n.pos.x},
                                 {"y", n.pos.y},
                                 {"budget_nj", n.budget_nj},
                                 {"range", n.range_m}});
  }
  j["nodes"] = std::move(nodes);
  ordered_json tasks = ordered_json::array();
  for (const SensingTask& t : s.tasks)
    tasks.push_back(ordered_json{{"id", t.id}, {"x", t.pos.x}, {"y", t.pos.y}});
  j["tasks"] = std::move(tasks);
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text, const std::string& origin) {
  const json j = parse_strict(text, origin);
  check_keys(j, "document", origin, {"schema_version", "area", "params", "nodes", "tasks"},
             {"seed"});
  check_schema_version(j, origin);

  Scenario s;
  const json& area = field(j, "area", "document", origin);
  check_keys(area, "area", origin, {"w", "h"});
  s.width_m = get_double(area, "w", "area", origin);
  s.height_m = get_double(area, "h", "area", origin);

  const json& params = field(j, "params", "document", origin);
  check_keys(params, "params", origin, {"e_ps_nj", "e_vs_nj", "max_vs"});
  s.params.e_ps_nj = get_int64(params, "e_ps_nj", "params", origin);
  s.params.e_vs_nj = get_int64(params, "e_vs_nj", "params", origin);
  s.params.max_vs = get_int(params, "max_vs", "params", origin);

  if (j.contains("seed")) s.seed = get_uint64(j, "seed", "document", origin);

  const json& nodes = field(j, "nodes", "document", origin);
  if (!nodes.is_array()) fail(origin, "field 'nodes' must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string ctx = "nodes[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    check_keys(n, ctx.c_str(), origin, {"id", "x", "y", "budget_nj", "range"});
    SensorNode node;
    node.id = get_int(n, "id", ctx.c_str(), origin);
    node.pos.x = get_double(n, "x", ctx.c_str(), origin);
    node.pos.y = get_double(n, "y", ctx.c_str(), origin);
    node.budget_nj = get_int64(n, "budget_nj", ctx.c_str(), origin);
    node.range_m = get_double(n, "range", ctx.c_str(), origin);
    s.nodes.push_back(node);
  }

  const json& tasks = field(j, "tasks", "document", origin);
  if (!tasks.is_array()) fail(origin, "field 'tasks' must be an array");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const std::string ctx = "tasks[" + std::to_string(i) + "]";
    const json& t = tasks[i];
    check_keys(t, ctx.c_str(), origin, {"id", "x", "y"});
    SensingTask task;
    task.id = get_int(t, "id", ctx.c_str(), origin);
    task.pos.x = get_double(t, "x", ctx.c_str(), origin);
    task.pos.y = get_double(t, "y", ctx.c_str(), origin);
    s.tasks.push_back(task);
  }

  try {
    check_scenario(s);
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  write_file_atomic(path, scenario_to_json(s));
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_file(path), path.string());
}

std::string plan_to_json(const PlanFile& f) {
  ordered_json j;
  j["schema_version"] = 1;
  j["scenario_ref"] = f.scenario_ref;
  ordered_json assignments = ordered_json::array();
  for (const Assignment& a : f.plan.assignments) {
    assignments.push_back(
        ordered_json{{"task", a.task_id}, {"node", a.node_id}, {"mode", to_string(a.mode)}});
  }
  j["assignments"] = std::move(assignments);
  std::vector<int> virtualized = f.plan.virtualized;
  std::sort(virtualized.begin(), virtualized.end());
  j["virtualized"] = virtualized;
  j["cost"] = ordered_json{{"c_ps_nj", f.cost.c_ps_nj},
                           {"c_vs_nj", f.cost.c_vs_nj},
                           {"total_nj", f.cost.total_nj}};
  return j.dump(2) + "\n";
}

PlanFile plan_from_json(const std::string& text, const std::string& origin) {
  const json j = parse_strict(text, origin);
  check_keys(j, "document", origin,
             {"schema_version", "scenario_ref", "assignments", "virtualized", "cost"});
  check_schema_version(j, origin);

  PlanFile f;
  const json& ref = field(j, "scenario_ref", "document", origin);
  if (!ref.is_string()) fail(origin, "field 'scenario_ref' must be a string");
  f.scenario_ref = ref.get<std::string>();

  const json& assignments = field(j, "assignments", "document", origin);
  if (!assignments.is_array()) fail(origin, "field 'assignments' must be an array");
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const std::string ctx = "assignments[" + std::to_string(i) + "]";
    const json& a = assignments[i];
    check_keys(a, ctx.c_str(), origin, {"task", "node", "mode"});
    Assignment rec;
    rec.task_id = get_int(a, "task", ctx.c_str(), origin);
    rec.node_id = get_int(a, "node", ctx.c_str(), origin);
    const json& mode = field(a, "mode", ctx.c_str(), origin);
    if (mode == "PS") {
      rec.mode = Mode::ps;
    } else if (mode == "VS") {
      rec.mode = Mode::vs;
    } else {
      fail(origin, "field 'mode' in " + ctx + " must be \"PS\" or \"VS\"");
    }
    f.plan.assignments.push_back(rec);
  }

  const json& virtualized = field(j, "virtualized", "document", origin);
  if (!virtualized.is_array()) fail(origin, "field 'virtualized' must be an array");
  for (const json& v : virtualized) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail(origin, "entries of 'virtualized' must be integer node ids");
    f.plan.virtualized.push_back(v.get<int>());
  }
  std::sort(f.plan.virtualized.begin(), f.plan.virtualized.end());
  if (std::adjacent_find(f.plan.virtualized.begin(), f.plan.virtualized.end()) !=
      f.plan.virtualized.end())
    fail(origin, "'virtualized' lists a node id twice");

  const json& cost = field(j, "cost", "document", origin);
  check_keys(cost, "cost", origin, {"c_ps_nj", "c_vs_nj", "total_nj"});
  f.cost.c_ps_nj = get_int64(cost, "c_ps_nj", "cost", origin);
  f.cost.c_vs_nj = get_int64(cost, "c_vs_nj", "cost", origin);
  f.cost.total_nj = get_int64(cost, "total_nj", "cost", origin);
  if (f.cost.c_ps_nj < 0 || f.cost.c_vs_nj < 0)
    fail(origin, "cost components must be nonnegative");
  if (f.cost.total_nj != f.cost.c_ps_nj + f.cost.c_vs_nj)
    fail(origin, "cost.total_nj does not equal c_ps_nj + c_vs_nj");

  return f;
}

void save_plan(const PlanFile& f, const std::filesystem::path& path) {
  write_file_atomic(path, plan_to_json(f));
}

PlanFile load_plan(const std::filesystem::path& path) {
  return plan_from_json(read_file(path), path.string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("error while writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace vsnopt
