#pragma once

#include <string>

#include "gfdl/io.hpp"

namespace gfdl {

/// Heat map of |c_n(t)| (site vs. time) above a line plot of P_r(t).
/// One column per sample.
std::string render_heatmap_svg(const io::TrajectoryTable& table);

}  // namespace gfdl
