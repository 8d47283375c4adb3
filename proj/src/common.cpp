#include "qnet/common.hpp"

#include <cmath>

namespace qnet {

GeoPoint slerp(const GeoPoint& a, const GeoPoint& b, double t) {
  const Vec3 va = to_cartesian(a, 1.0);
  const Vec3 vb = to_cartesian(b, 1.0);
  const double omega = std::acos(std::clamp(dot(va, vb), -1.0, 1.0));
  if (omega < 1e-12) return a;
  const double sa = std::sin((1.0 - t) * omega) / std::sin(omega);
  const double sb = std::sin(t * omega) / std::sin(omega);
  const Vec3 v{sa * va.x + sb * vb.x, sa * va.y + sb * vb.y, sa * va.z + sb * vb.z};
  const double n = norm(v);
  return {rad2deg(std::asin(v.z / n)), rad2deg(std::atan2(v.y, v.x))};
}

}  // namespace qnet
