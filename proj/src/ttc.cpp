#include "cpsor/ttc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cpsor::sim {

double compute_ttc(const data::VehicleState& ego, const data::VehicleState& other,
                   const TtcParams& params) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double dx = other.x - ego.x;
  const double dy = other.y - ego.y;
  if (std::hypot(dx, dy) < 1e-9) return 0.0;

  const double ce = std::cos(ego.heading_rad), se = std::sin(ego.heading_rad);
  const double co = std::cos(other.heading_rad), so = std::sin(other.heading_rad);
  const double longitudinal = dx * ce + dy * se;
  const double lateral = -dx * se + dy * ce;
  const double cos_rel = ce * co + se * so;
  const double tol = std::cos(params.parallel_tolerance_deg * std::numbers::pi / 180.0);

  if (cos_rel >= tol || cos_rel <= -tol) {
    // same or opposite direction: only an object ahead within the path counts
    if (longitudinal <= 0.0 || std::abs(lateral) >= params.in_path_half_width) return kInf;
    const double other_along = other.v * cos_rel;
    const double closing = ego.v - other_along;
    if (closing <= 0.0) return kInf;
    return longitudinal / closing;
  }

  // crossing: solve ego.p + s*he = other.p + r*ho
  const double det = ce * (-so) - se * (-co);
  const double s = (dx * (-so) - dy * (-co)) / det;
  const double r = (ce * dy - se * dx) / det;
  if (s < 0.0 || r < 0.0 || ego.v <= 0.0 || other.v <= 0.0) return kInf;
  const double t_ego = s / ego.v;
  const double t_other = r / other.v;
  if (t_ego > params.crossing_horizon || t_other > params.crossing_horizon) return kInf;
  return std::abs(t_ego - t_other);
}

}  // namespace cpsor::sim
