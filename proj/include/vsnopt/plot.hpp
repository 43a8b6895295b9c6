#pragma once

#include <string>

#include "vsnopt/model.hpp"

namespace vsnopt {

struct PlotOptions {
  bool range_circles = true;
  double viewport_width_px = 640.0;
};

// Deterministic SVG view of a scenario and a plan: sensing-range
// circles, assignment edges, node markers by role (virtualized /
// physical-mode / idle) and task markers. Identical inputs render to
// identical bytes.
std::string render_svg(const Scenario& s, const AssignmentPlan& plan,
                       const PlotOptions& opts = {});

}  // namespace vsnopt
