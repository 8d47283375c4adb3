#include "qnet/satellite.hpp"

#include <cmath>

namespace qnet::sat {

void SatelliteParams::validate() const {
  if (!(altitude_m > 0.0)) throw ParamError("altitude_m must be positive");
  if (!(pair_rate_hz > 0.0)) throw ParamError("pair_rate_hz must be positive");
  if (!(wavelength_m > 0.0)) throw ParamError("wavelength_m must be positive");
  if (!(beam_waist_m > 0.0)) throw ParamError("beam_waist_m must be positive");
  if (!(source_fidelity > 0.5 && source_fidelity <= 1.0))
    throw ParamError("source_fidelity must lie in (0.5, 1]");
  validate_geo(subsatellite);
}

void StationParams::validate() const {
  if (!(telescope_radius_m > 0.0)) throw ParamError("telescope_radius_m must be positive");
  for (double eta : {eta_tran, eta_rec, eta_det, eta_filt, eta_coup, eta_atm_zenith})
    if (!(eta > 0.0 && eta <= 1.0)) throw ParamError("efficiencies must lie in (0, 1]");
}

SlantGeometry slant_geometry(const GeoPoint& station, const SatelliteParams& sat) {
  validate_geo(station);
  sat.validate();

  const Vec3 ground = to_cartesian(station, kEarthRadiusM);
  const Vec3 orbiter = to_cartesian(sat.subsatellite, kEarthRadiusM + sat.altitude_m);
  const Vec3 line = orbiter - ground;
  const double range = norm(line);

  const double cos_zenith = dot(line, ground) / (range * kEarthRadiusM);
  if (cos_zenith <= 0.0)
    throw VisibilityError("satellite below the horizon for station at lat " +
                          std::to_string(station.lat_deg) + ", lon " +
                          std::to_string(station.lon_deg));
  return {range, std::acos(std::min(1.0, cos_zenith))};
}

double beam_spot(double z_m, const SatelliteParams& sat) {
  sat.validate();
  if (z_m < 0.0) throw ParamError("propagation distance must be nonnegative");
  const double zr = sat.rayleigh_range_m();
  return sat.beam_waist_m * std::sqrt(1.0 + (z_m / zr) * (z_m / zr));
}

double diffraction_eta(double z_m, const SatelliteParams& sat, const StationParams& station,
                       DiffractionMode mode) {
  station.validate();
  if (!(z_m > 0.0)) throw ParamError("propagation distance must be positive");
  const double w = beam_spot(z_m, sat);
  const double x = 2.0 * station.telescope_radius_m * station.telescope_radius_m / (w * w);
  return mode == DiffractionMode::exact ? -std::expm1(-x) : x;
}

bool far_field_valid(double z_m, const SatelliteParams& sat) {
  return z_m > 100.0 * sat.rayleigh_range_m();
}

double atmospheric_eta(double theta_rad, const StationParams& station) {
  station.validate();
  if (!(theta_rad >= 0.0 && theta_rad < kPi / 2.0))
    throw ParamError("zenith angle must lie in [0, pi/2)");
  return std::pow(station.eta_atm_zenith, 1.0 / std::cos(theta_rad));
}

bool atmospheric_model_valid(double theta_rad) { return theta_rad <= 1.0; }

double downlink_eta(const GeoPoint& station_point, const SatelliteParams& sat,
                    const StationParams& station) {
  const SlantGeometry geom = slant_geometry(station_point, sat);
  const double eta_d = diffraction_eta(geom.slant_range_m, sat, station, DiffractionMode::far_field);
  const double eta_atm = atmospheric_eta(geom.zenith_rad, station);
  return station.eta_tran * eta_d * eta_atm * station.eta_rec * station.eta_det *
         station.eta_filt * station.eta_coup;
}

double pair_rate(const GeoPoint& a, const GeoPoint& b, const SatelliteParams& sat,
                 const StationParams& station) {
  return sat.pair_rate_hz * downlink_eta(a, sat, station) * downlink_eta(b, sat, station);
}

}  // namespace qnet::sat
