#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace gfdl::detail {

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using boost::math::quadrature::gauss;
    const auto& x = gauss<double, kGaussPoints>::abscissa();
    const auto& w = gauss<double, kGaussPoints>::weights();
    GaussRule r{};
    constexpr int half = kGaussPoints / 2;
    for (int i = 0; i < half; ++i) {
      r.nodes[half - 1 - i] = -x[i];
      r.weights[half - 1 - i] = w[i];
      r.nodes[half + i] = x[i];
      r.weights[half + i] = w[i];
    }
    return r;
  }();
  return rule;
}

double base_panel_width(const DriveWaveform& drive, double span) {
  const double scale = drive.time_scale();
  if (std::isfinite(scale) && scale > 0.0) return scale / kPanelsPerPeriod;
  return std::max(span, 1.0) / kPanelsPerPeriod;
}

std::vector<double> panel_grid(const DriveWaveform& drive, double a, double b, double max_width,
                               std::span<const double> marks) {
  std::vector<double> cuts = drive.breakpoints(a, b);
  for (double m : marks) {
    if (m > a && m < b) cuts.push_back(m);
  }
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> grid;
  grid.reserve(cuts.size() + static_cast<std::size_t>((b - a) / max_width) + 1);
  grid.push_back(cuts.front());
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double lo = cuts[i - 1];
    const double hi = cuts[i];
    const auto pieces = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / max_width)));
    for (long j = 1; j < pieces; ++j) grid.push_back(lo + (hi - lo) * static_cast<double>(j) / pieces);
    grid.push_back(hi);
  }
  return grid;
}

cplx panel_integral(const DriveWaveform& drive, double a, double b) {
  const GaussRule& rule = gauss_rule();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  cplx sum = 0.0;
  for (int i = 0; i < kGaussPoints; ++i) {
    sum += rule.weights[i] * unit_phasor(drive, mid + half * rule.nodes[i]);
  }
  return sum * half;
}

cplx integrate_exp_phase(const DriveWaveform& drive, double a, double b) {
  if (b <= a) return 0.0;
  auto estimate = [&](double width) {
    const std::vector<double> grid = panel_grid(drive, a, b, width);
    cplx sum = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) sum += panel_integral(drive, grid[i - 1], grid[i]);
    return sum;
  };
  double width = base_panel_width(drive, b - a);
  cplx prev = estimate(width);
  for (int level = 0; level < kMaxRefinements; ++level) {
    width *= 0.5;
    const cplx cur = estimate(width);
    if (std::abs(cur - prev) <= kRefineTolerance * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace gfdl::detail
