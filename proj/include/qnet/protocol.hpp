#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qnet/bell.hpp"
#include "qnet/fiber.hpp"
#include "qnet/satellite.hpp"
#include "qnet/topology.hpp"

namespace qnet::protocol {

enum class Objective { rate, fidelity };

/// Repeater activation along a routed path. Active roles alternate
/// photon/ion between the ion-type end nodes; with k active photon
/// repeaters there are k-1 active ion repeaters and 2k fiber segments.
struct PathPlan {
  std::vector<int> path;
  std::vector<int> photon_repeaters;
  std::vector<int> ion_repeaters;
  Objective objective = Objective::rate;
  std::vector<double> segment_lengths_km;  // between consecutive active nodes
  int distill_rounds = 0;
  double rate_hz = 0.0;
  double fidelity = 0.0;
  bell::BellDiagonalState state;
  bool feasible = false;
};

/// Maximize rate subject to an optional end-to-end fidelity target.
struct RateUnderTarget {
  std::optional<double> target_fidelity;
};

/// Maximize fidelity subject to an establishment-time budget.
struct FidelityUnderBudget {
  double budget_s = 0.0;
};

using PlacementConstraint = std::variant<RateUnderTarget, FidelityUnderBudget>;

/// Chooses how many repeaters to activate and where. For each photon
/// count k, ideal positions at path-length fractions j/(2k) are snapped
/// to the nearest available path nodes left to right (ties to the lower
/// index), alternating photon and ion roles; the best k under the
/// constraint wins, ties to smaller k.
PathPlan greedy_placement(const topo::GeoGraph& graph, const std::vector<int>& path,
                          const bell::NoiseParams& noise, const fiber::FiberParams& params,
                          const PlacementConstraint& constraint);

enum class RouteMode { fiber_only, hybrid, satellite_only };

struct HybridResult {
  int pair_id = 0;
  int a = 0;
  int b = 0;
  double geographic_distance_km = 0.0;
  RouteMode mode = RouteMode::fiber_only;
  double rate_hz = 0.0;
  double fidelity = 0.0;
  std::vector<PathPlan> fiber_segments;
  std::vector<int> stations_used;
  double sat_rate_hz = 0.0;  // 0 when no satellite segment is involved
  bool feasible = false;
};

struct ScalingFactors {
  double alpha = 1.0;  // fiber multiplexing multiplier
  double beta = 1.0;   // satellite source multiplier
};

struct EvalMode {
  Objective objective = Objective::rate;
  double target_fidelity = 0.87;  // rate mode
  double budget_s = 0.0;          // fidelity mode
};

/// `route` skips the internal shortest-path query when the caller has
/// already computed it for this pair.
HybridResult fiber_only_eval(const topo::GeoGraph& graph, int a, int b,
                             const bell::NoiseParams& noise, const fiber::FiberParams& params,
                             const EvalMode& mode, const topo::PathResult* route = nullptr);

HybridResult satellite_only_eval(const GeoPoint& a, const GeoPoint& b,
                                 const sat::SatelliteParams& satellite,
                                 const sat::StationParams& station);

/// Full protocol step for one pair: route each end node to its nearest
/// ground station, bridge the stations by satellite, swap at the
/// stations, and keep whichever of fiber-only/hybrid wins the queried
/// metric (ties favor fiber-only). In fidelity mode the shared time
/// budget is the satellite pair time of the two stations.
HybridResult hybrid_eval(const topo::GeoGraph& graph, const topo::StationField& field, int a,
                         int b, const bell::NoiseParams& noise, const fiber::FiberParams& params,
                         const sat::SatelliteParams& satellite,
                         const sat::StationParams& station, const EvalMode& mode,
                         const topo::PathResult* route = nullptr);

struct CrossoverSample {
  double d_km = 0.0;
  double fiber_rate_hz = 0.0;
  double hybrid_rate_hz = 0.0;
  double fiber_fidelity = 0.0;
  double hybrid_fidelity = 0.0;
};

struct CrossoverResult {
  std::optional<double> d_star_rate_km;
  std::optional<double> d_star_fidelity_km;
};

/// Binned-median crossover estimator: the smallest D bin past the last
/// bin where the fiber-only curve still wins. Bins with fewer than
/// min_bin_count samples are ignored.
CrossoverResult crossover_distances(std::span<const CrossoverSample> samples,
                                    double bin_km = 20.0, int min_bin_count = 3);

/// Rescales rates for hardware multipliers: fiber-limited rates by
/// alpha, satellite-limited by beta, hybrid by recomputed min
/// composition. Fidelities are never touched.
void scale(std::vector<HybridResult>& results, const ScalingFactors& factors);

}  // namespace qnet::protocol
