#pragma once

#include "qnet/common.hpp"

namespace qnet::sat {

struct SatelliteParams {
  double altitude_m = 1.0e7;      // MEO default; GEO is 3.6e7
  double pair_rate_hz = 6e7;      // entangled pairs emitted per second
  double wavelength_m = 810e-9;
  double beam_waist_m = 0.15;
  double source_fidelity = 0.87;
  GeoPoint subsatellite{36.8, -95.8};

  double rayleigh_range_m() const { return kPi * beam_waist_m * beam_waist_m / wavelength_m; }
  void validate() const;
};

struct StationParams {
  double telescope_radius_m = 0.5;
  double eta_tran = 0.5;
  double eta_rec = 0.5;
  double eta_det = 0.9;
  double eta_filt = 0.9;
  double eta_coup = 0.7;  // single-mode fiber coupling
  double eta_atm_zenith = 0.967;

  void validate() const;
};

struct SlantGeometry {
  double slant_range_m;
  double zenith_rad;
};

/// Straight-line range and zenith angle from a ground station to the
/// satellite above its subsatellite point. Throws VisibilityError when
/// the satellite sits at or below the station's horizon.
SlantGeometry slant_geometry(const GeoPoint& station, const SatelliteParams& sat);

/// Gaussian beam radius after propagating a distance z.
double beam_spot(double z_m, const SatelliteParams& sat);

enum class DiffractionMode { exact, far_field };

/// Fraction of the beam captured by the telescope aperture:
/// exact 1 - exp(-2 a^2 / w^2), or the far-field expansion 2 a^2 / w^2.
double diffraction_eta(double z_m, const SatelliteParams& sat, const StationParams& station,
                       DiffractionMode mode);

/// True when the far-field expansion is trustworthy (z > 100 z_R).
bool far_field_valid(double z_m, const SatelliteParams& sat);

/// Atmospheric transmissivity [eta_zen]^sec(theta).
double atmospheric_eta(double theta_rad, const StationParams& station);

/// The extinction model is fitted for zenith angles up to about 1 rad;
/// beyond that results are returned but flagged by this predicate.
bool atmospheric_model_valid(double theta_rad);

/// Full downlink efficiency chain for one station, with far-field
/// diffraction: eta_tran eta_d eta_atm eta_rec eta_det eta_filt eta_coup.
double downlink_eta(const GeoPoint& station_point, const SatelliteParams& sat,
                    const StationParams& station);

/// Entangled-pair distribution rate between two stations, N_s eta1 eta2.
double pair_rate(const GeoPoint& a, const GeoPoint& b, const SatelliteParams& sat,
                 const StationParams& station);

}  // namespace qnet::sat
