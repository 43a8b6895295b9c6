#include "vsnopt/plot.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <vector>

namespace vsnopt {

namespace {

std::string px(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

constexpr const char* kStyle =
    "  <style>\n"
    "    .area { fill: #fcfcf9; stroke: #555555; stroke-width: 1; }\n"
    "    .range { fill: none; stroke: #b9cbe2; stroke-width: 1; stroke-dasharray: 4 3; }\n"
    "    .edge.ps { stroke: #c05a24; stroke-width: 1.4; }\n"
    "    .edge.vs { stroke: #2a7ab0; stroke-width: 1.4; }\n"
    "    .node.virtualized { fill: #2a7ab0; stroke: #123249; }\n"
    "    .node.physical { fill: #c05a24; stroke: #4a2010; }\n"
    "    .node.idle { fill: none; stroke: #8a8a8a; }\n"
    "    .task { stroke: #111111; stroke-width: 1.6; }\n"
    "    text { font-family: monospace; font-size: 9px; fill: #333333; }\n"
    "  </style>\n";

}  // namespace

std::string render_svg(const Scenario& s, const AssignmentPlan& plan, const PlotOptions& opts) {
  const double margin = 40.0;
  const double k = opts.viewport_width_px / s.width_m;
  const double width = opts.viewport_width_px + 2 * margin;
  const double height = s.height_m * k + 2 * margin;

  // meters to pixels, y flipped so north is up
  auto map_x = [&](double x) { return margin + x * k; };
  auto map_y = [&](double y) { return margin + (s.height_m - y) * k; };

  std::vector<const SensorNode*> nodes_by_id;
  for (const SensorNode& n : s.nodes) nodes_by_id.push_back(&n);
  std::sort(nodes_by_id.begin(), nodes_by_id.end(),
            [](const SensorNode* a, const SensorNode* b) { return a->id < b->id; });
  std::vector<const SensingTask*> tasks_by_id;
  for (const SensingTask& t : s.tasks) tasks_by_id.push_back(&t);
  std::sort(tasks_by_id.begin(), tasks_by_id.end(),
            [](const SensingTask* a, const SensingTask* b) { return a->id < b->id; });

  std::set<int> ps_hosts;
  for (const Assignment& a : plan.assignments)
    if (a.mode == Mode::ps) ps_hosts.insert(a.node_id);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\""
      << px(height) << "\" viewBox=\"0 0 " << px(width) << " " << px(height) << "\">\n";
  svg << kStyle;
  svg << "  <rect class=\"area\" x=\"" << px(margin) << "\" y=\"" << px(margin) << "\" width=\""
      << px(opts.viewport_width_px) << "\" height=\"" << px(s.height_m * k) << "\"/>\n";

  if (opts.range_circles) {
    for (const SensorNode* n : nodes_by_id) {
      svg << "  <circle class=\"range\" cx=\"" << px(map_x(n->pos.x)) << "\" cy=\""
          << px(map_y(n->pos.y)) << "\" r=\"" << px(n->range_m * k) << "\"/>\n";
    }
  }

  std::vector<Assignment> edges = plan.assignments;
  std::sort(edges.begin(), edges.end(),
            [](const Assignment& a, const Assignment& b) { return a.task_id < b.task_id; });
  for (const Assignment& a : edges) {
    const SensorNode* node = nullptr;
    const SensingTask* task = nullptr;
    for (const SensorNode* n : nodes_by_id)
      if (n->id == a.node_id) node = n;
    for (const SensingTask* t : tasks_by_id)
      if (t->id == a.task_id) task = t;
    if (node == nullptr || task == nullptr) continue;
    svg << "  <line class=\"edge " << (a.mode == Mode::ps ? "ps" : "vs") << "\" x1=\""
        << px(map_x(node->pos.x)) << "\" y1=\"" << px(map_y(node->pos.y)) << "\" x2=\""
        << px(map_x(task->pos.x)) << "\" y2=\"" << px(map_y(task->pos.y)) << "\"/>\n";
  }

  for (const SensorNode* n : nodes_by_id) {
    const double cx = map_x(n->pos.x);
    const double cy = map_y(n->pos.y);
    if (plan.is_virtualized(n->id)) {
      svg << "  <rect class=\"node virtualized\" x=\"" << px(cx - 6) << "\" y=\"" << px(cy - 6)
          << "\" width=\"12\" height=\"12\"/>\n";
    } else if (ps_hosts.count(n->id) > 0) {
      svg << "  <circle class=\"node physical\" cx=\"" << px(cx) << "\" cy=\"" << px(cy)
          << "\" r=\"6\"/>\n";
    } else {
      svg << "  <circle class=\"node idle\" cx=\"" << px(cx) << "\" cy=\"" << px(cy)
          << "\" r=\"6\"/>\n";
    }
    svg << "  <text x=\"" << px(cx + 8) << "\" y=\"" << px(cy - 8) << "\">n" << n->id
        << "</text>\n";
  }

  for (const SensingTask* t : tasks_by_id) {
    const double cx = map_x(t->pos.x);
    const double cy = map_y(t->pos.y);
    svg << "  <path class=\"task\" d=\"M " << px(cx - 4) << " " << px(cy - 4) << " L "
        << px(cx + 4) << " " << px(cy + 4) << " M " << px(cx - 4) << " " << px(cy + 4) << " L "
        << px(cx + 4) << " " << px(cy - 4) << "\"/>\n";
    svg << "  <text x=\"" << px(cx + 6) << "\" y=\"" << px(cy + 12) << "\">t" << t->id
        << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace vsnopt
