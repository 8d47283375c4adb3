#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qnet {

inline constexpr double kEarthRadiusM = 6.371e6;
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = std::numbers::pi;

/// Sentinel for "no dephasing": dephase() becomes the identity.
inline constexpr double kInfiniteTau = std::numeric_limits<double>::infinity();

// Error taxonomy. CLI maps these onto exit codes (usage/config=1,
// validation=2, io=3); internal errors indicate broken invariants.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamError : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  std::size_t line_number;
};
struct UsageError : Error {
  using Error::Error;
};
struct VisibilityError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct InternalError : Error {
  using Error::Error;
};

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

inline void validate_geo(const GeoPoint& p) {
  if (!(p.lat_deg >= -90.0 && p.lat_deg <= 90.0))
    throw ParamError("latitude out of range [-90, 90]: " + std::to_string(p.lat_deg));
  if (!(p.lon_deg >= -180.0 && p.lon_deg <= 180.0))
    throw ParamError("longitude out of range [-180, 180]: " + std::to_string(p.lon_deg));
}

/// Great-circle distance on the spherical Earth, in km.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat_deg);
  const double phi2 = deg2rad(b.lat_deg);
  const double dphi = phi2 - phi1;
  const double dlam = deg2rad(b.lon_deg - a.lon_deg);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Earth-centered cartesian position of a surface/orbital point at the
/// given radius from the Earth's center.
inline Vec3 to_cartesian(const GeoPoint& p, double radius_m) {
  const double phi = deg2rad(p.lat_deg);
  const double lam = deg2rad(p.lon_deg);
  return {radius_m * std::cos(phi) * std::cos(lam), radius_m * std::cos(phi) * std::sin(lam),
          radius_m * std::sin(phi)};
}

/// Point at fraction t of the great-circle arc from a to b.
GeoPoint slerp(const GeoPoint& a, const GeoPoint& b, double t);

/// Deterministic splittable RNG (splitmix64 stream). Used everywhere a
/// seed appears so that results are bit-reproducible across platforms,
/// unlike the distributions in <random>.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_below(std::uint64_t n) {
    // Lemire rejection-free-ish bounded reduction with a widening multiply.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      const unsigned __int128 m = static_cast<unsigned __int128>(r) * n;
      if (static_cast<std::uint64_t>(m) >= threshold)
        return static_cast<std::uint64_t>(m >> 64);
    }
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v;
    do {
      u = uniform01();
    } while (u <= 0.0);
    v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * kPi * v);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * v);
  }

  /// Independent child stream; deterministic in (parent seed, tag).
  Rng split(std::uint64_t tag) const {
    Rng child(state_ ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qnet
