#include "gfdl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace gfdl {

namespace {

constexpr double kWidth = 800.0;
constexpr double kMapHeight = 400.0;
constexpr double kPlotHeight = 160.0;
constexpr double kMargin = 50.0;

// Black-body style ramp: black, red, yellow, white.
std::string colour(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 * std::min(1.0, 3.0 * v)));
  const int g = static_cast<int>(std::lround(255.0 * std::clamp(3.0 * v - 1.0, 0.0, 1.0)));
  const int b = static_cast<int>(std::lround(255.0 * std::clamp(3.0 * v - 2.0, 0.0, 1.0)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_heatmap_svg(const io::TrajectoryTable& table) {
  if (table.times.empty()) throw std::invalid_argument("render_heatmap_svg: empty trajectory");
  const std::size_t samples = table.times.size();
  const std::size_t sites = table.amplitudes.front().size();

  double peak = 0.0;
  for (const auto& row : table.amplitudes)
    for (const cplx& a : row) peak = std::max(peak, std::abs(a));
  if (peak == 0.0) peak = 1.0;

  std::vector<double> revival;
  for (const auto& row : table.amplitudes) {
    cplx overlap = 0.0;
    for (std::size_t n = 0; n < sites; ++n) overlap += std::conj(table.amplitudes.front()[n]) * row[n];
    revival.push_back(std::norm(overlap));
  }

  const double cw = kWidth / static_cast<double>(samples);
  const double ch = kMapHeight / static_cast<double>(sites);
  const double total_w = kWidth + 2 * kMargin;
  const double total_h = kMapHeight + kPlotHeight + 3 * kMargin;

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w << "\" height=\"" << total_h
      << "\" viewBox=\"0 0 " << total_w << ' ' << total_h << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g id=\"heatmap\" transform=\"translate(" << kMargin << ',' << kMargin << ")\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t n = 0; n < sites; ++n) {
      const double y = kMapHeight - static_cast<double>(n + 1) * ch;
      svg << "<rect x=\"" << static_cast<double>(i) * cw << "\" y=\"" << y << "\" width=\"" << cw
          << "\" height=\"" << ch << "\" fill=\"" << colour(std::abs(table.amplitudes[i][n]) / peak) << "\"/>\n";
    }
  }
  svg << "</g>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 10 << "\" font-size=\"14\">|c_n(t)|, n = 0.."
      << sites - 1 << " (bottom to top)</text>\n";

  const double y0 = 2 * kMargin + kMapHeight;
  svg << "<g id=\"revival\" transform=\"translate(" << kMargin << ',' << y0 << ")\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kPlotHeight << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * cw;
    svg << x << ',' << kPlotHeight * (1.0 - revival[i]) << ' ';
  }
  svg << "\"/>\n</g>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"" << y0 - 10 << "\" font-size=\"14\">P_r(t), t = "
      << table.times.front() << " .. " << table.times.back() << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gfdl
