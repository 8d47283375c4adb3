#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnet/protocol.hpp"

namespace qnet::runner {

struct PhysicsConfig {
  fiber::FiberParams fiber;
  bell::NoiseParams noise;
  sat::SatelliteParams satellite;
  sat::StationParams station;

  void validate() const;
};

struct GraphSpec {
  std::optional<std::string> file;  // load instead of synthesizing
  std::uint64_t seed = 42;
  int count = 5000;
  int clusters = 12;
  int k = 3;
  double threshold_km = 61.7;
  double max_segment_km = 50.0;
};

struct ExperimentConfig {
  std::string experiment = "fig4";
  GraphSpec graph;
  int pair_count = 2000;
  std::uint64_t pair_seed = 7;
  PhysicsConfig physics;
  std::vector<double> grid_spacings_km = {0.0};
  GeoPoint grid_anchor{24.6, -95.8};
  double target_fidelity = 0.87;
  protocol::ScalingFactors scaling;
  std::vector<double> scaling_sweep = {1.0, 10.0, 100.0};
  std::string out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  bool full_scale = false;
};

/// Strict parse: unknown keys anywhere are rejected, every physics
/// override is validated against its parameter domain.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json resolved_config_json(const ExperimentConfig& cfg);

/// Builds (or loads) the fiber network of a config: synthesis, k-NN
/// linking, connectivity augmentation, and long-link subdivision.
topo::LoadedGraph build_network(const ExperimentConfig& cfg);

struct RunSummary {
  std::vector<std::string> files_written;
  nlohmann::json summary;
};

/// Named experiment recipes (fig2, fig3, fig4, table1, fig6, fig7).
RunSummary run(const ExperimentConfig& cfg);

/// One result set per value of a recognized physics field, sharing the
/// pair sample across values.
RunSummary sweep(const ExperimentConfig& cfg, const std::string& parameter,
                 const std::vector<double>& values);

std::vector<std::string> sweepable_parameters();

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> lines;
};

/// Oracle suite plus the invariant battery; `trials` caps the Monte
/// Carlo sizes so smoke runs stay fast.
ValidationReport validate(std::int64_t trials = 100000, std::uint64_t seed = 1);

/// Pair evaluation shared by the network experiments: fiber-only
/// baselines (both objectives), satellite-only reference, and the
/// hybrid protocol per grid spacing.
struct PairRecord {
  int pair_id = 0;
  int a = 0;
  int b = 0;
  double d_km = 0.0;
  protocol::HybridResult fiber_rate;
  protocol::HybridResult fiber_fidelity;
  protocol::HybridResult satellite;
  protocol::HybridResult hybrid_rate;
  protocol::HybridResult hybrid_fidelity;
};

std::vector<std::pair<int, int>> sample_pairs(const topo::GeoGraph& graph, int count,
                                              std::uint64_t seed);

std::vector<PairRecord> evaluate_pairs(const topo::GeoGraph& graph,
                                       const topo::StationField& field,
                                       const std::vector<std::pair<int, int>>& pairs,
                                       const PhysicsConfig& physics, double target_fidelity);

}  // namespace qnet::runner
