// Acceptance suite: one checkable criterion per paper-level claim, each
// printing a single PASS/FAIL line. Run all or select one with
// --criterion N. Exits nonzero if any selected criterion fails.

#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "qnet/experiments.hpp"
#include "qnet/oracle.hpp"

using namespace qnet;

namespace {

runner::ExperimentConfig desk_config() {
  runner::ExperimentConfig cfg;
  cfg.experiment = "table1";
  cfg.graph.seed = 42;
  cfg.graph.count = 5000;
  cfg.graph.clusters = 12;
  cfg.graph.k = 3;
  cfg.pair_count = 2500;
  cfg.pair_seed = 7;
  cfg.physics.fiber.multiplex = 10;
  return cfg;
}

// The desk-scale network and pair evaluations are shared across
// criteria 5, 6, and 10; build them once per process.
struct DeskState {
  topo::LoadedGraph net;
  std::vector<std::pair<int, int>> pairs;
  std::map<double, std::vector<runner::PairRecord>> records_by_spacing;
};

DeskState& desk_state() {
  static DeskState state = [] {
    DeskState s;
    const runner::ExperimentConfig cfg = desk_config();
    s.net = runner::build_network(cfg);
    s.pairs = runner::sample_pairs(s.net.graph, cfg.pair_count, cfg.pair_seed);
    return s;
  }();
  return state;
}

const std::vector<runner::PairRecord>& desk_records(double spacing_km) {
  DeskState& state = desk_state();
  auto it = state.records_by_spacing.find(spacing_km);
  if (it == state.records_by_spacing.end()) {
    const runner::ExperimentConfig cfg = desk_config();
    const topo::StationGrid grid =
        spacing_km == 0.0 ? topo::all_station_grid(state.net.graph)
                          : topo::place_station_grid(state.net.graph, spacing_km, cfg.grid_anchor);
    const topo::StationField field = topo::station_field(state.net.graph, grid);
    it = state.records_by_spacing
             .emplace(spacing_km, runner::evaluate_pairs(state.net.graph, field, state.pairs,
                                                         cfg.physics, cfg.target_fidelity))
             .first;
  }
  return it->second;
}

protocol::CrossoverResult crossovers_at(double spacing_km) {
  const auto& records = desk_records(spacing_km);
  std::vector<protocol::CrossoverSample> samples;
  samples.reserve(records.size());
  for (const runner::PairRecord& r : records)
    samples.push_back({r.d_km, r.fiber_rate.rate_hz, r.hybrid_rate.rate_hz,
                       r.fiber_fidelity.fidelity, r.hybrid_fidelity.fidelity});
  return protocol::crossover_distances(samples);
}

// ---- criteria ----

bool c1_fiber_crossover(std::ostream& log) {
  const fiber::FiberParams fp;  // paper parameters
  // Best repeatered rate (n >= 1) minus the bare-fiber rate.
  const auto gap = [&](double L) {
    double best = 0.0;
    for (int n = 1; n <= 64; ++n)
      best = std::max(best, 1.0 / fiber::time_with_repeaters(L, n, fp));
    return best - 1.0 / fiber::time_direct(L, fp);
  };
  double lo = 30.0, hi = 100.0;
  if (!(gap(lo) < 0.0 && gap(hi) > 0.0)) {
    log << "bracketing failed";
    return false;
  }
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  const double crossover = 0.5 * (lo + hi);
  const int n_before = fiber::optimal_repeater_count(crossover - 0.5, fp).n_photon_repeaters;
  const int n_after = fiber::optimal_repeater_count(crossover + 0.5, fp).n_photon_repeaters;
  log << "crossover at " << crossover << " km, n_p* " << n_before << " -> " << n_after;
  return std::abs(crossover - 61.7) <= 1.0 && n_before == 0 && n_after >= 6 && n_after <= 8;
}

bool c2_fidelity_collapse(std::ostream& log) {
  const bell::NoiseParams noise;  // 0.99 everywhere
  int first_below = -1;
  for (int n = 1; n <= 40 && first_below < 0; ++n)
    if (fiber::chain_fidelity_no_distill(n, noise).fidelity() < 0.5) first_below = n;
  log << "fidelity first drops below 0.5 at n_p = " << first_below;
  return first_below > 24 && first_below <= 28;
}

bool c3_meo_rate(std::ostream& log) {
  const sat::SatelliteParams satellite;  // MEO, centered subsatellite
  const sat::StationParams station;
  const GeoPoint center = satellite.subsatellite;
  const double deg_lat = 1.0 / (kEarthRadiusKm * kPi / 180.0);
  const double deg_lon = deg_lat / std::cos(deg2rad(center.lat_deg));

  double lo = 1e300, hi = 0.0;
  int evaluated = 0;
  for (double sep_km : {200.0, 600.0, 1000.0, 1400.0, 2000.0}) {
    for (double off_km : {0.0, 300.0}) {
      const double half = sep_km / 2.0;
      // East-west and north-south pairs, optionally off-center.
      const GeoPoint e{center.lat_deg + off_km * deg_lat,
                       center.lon_deg + (half + off_km) * deg_lon};
      const GeoPoint w{center.lat_deg + off_km * deg_lat,
                       center.lon_deg - (half - off_km) * deg_lon};
      const GeoPoint n{center.lat_deg + (half + off_km) * deg_lat, center.lon_deg};
      const GeoPoint s{center.lat_deg - (half - off_km) * deg_lat, center.lon_deg};
      for (double rate : {sat::pair_rate(e, w, satellite, station),
                          sat::pair_rate(n, s, satellite, station)}) {
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
        ++evaluated;
      }
    }
  }
  log << evaluated << " station pairs, rates in [" << lo << ", " << hi << "] /s";
  return lo >= 2.4 && hi <= 3.9;
}

bool c4_geo_rate(std::ostream& log) {
  sat::SatelliteParams geo;
  geo.altitude_m = 3.6e7;
  geo.subsatellite = {0.0, -95.8};  // equatorial, longitude-matched
  const sat::StationParams station;
  double lo = 1e300, hi = 0.0;
  for (double sep_km : {200.0, 1000.0, 2000.0}) {
    const double half_lon = sep_km / 2.0 / (kEarthRadiusKm * std::cos(deg2rad(36.8))) * 180.0 / kPi;
    const GeoPoint a{36.8, -95.8 - half_lon};
    const GeoPoint b{36.8, -95.8 + half_lon};
    const double rate = sat::pair_rate(a, b, geo, station);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  log << "rates in [" << lo << ", " << hi << "] /s";
  return lo >= 0.01 && hi <= 0.04;
}

bool c5_crossover_d0(std::ostream& log) {
  const protocol::CrossoverResult cross = crossovers_at(0.0);
  if (!cross.d_star_rate_km || !cross.d_star_fidelity_km) {
    log << "no inversion detected";
    return false;
  }
  log << "D*_R = " << *cross.d_star_rate_km << " km, D*_F = " << *cross.d_star_fidelity_km
      << " km";
  return *cross.d_star_rate_km >= 200.0 && *cross.d_star_rate_km <= 360.0 &&
         *cross.d_star_fidelity_km >= 200.0 && *cross.d_star_fidelity_km <= 360.0;
}

bool c6_grid_monotonicity(std::ostream& log) {
  std::vector<double> spacings{0.0, 240.0, 450.0, 700.0};
  std::vector<double> rate_stars, fid_stars;
  for (double d : spacings) {
    const protocol::CrossoverResult cross = crossovers_at(d);
    if (!cross.d_star_rate_km || !cross.d_star_fidelity_km) {
      log << "no inversion at d = " << d;
      return false;
    }
    rate_stars.push_back(*cross.d_star_rate_km);
    fid_stars.push_back(*cross.d_star_fidelity_km);
  }
  log << "D*_R: ";
  for (double v : rate_stars) log << v << " ";
  log << "km; D*_F: ";
  for (double v : fid_stars) log << v << " ";
  log << "km (d = 0/240/450/700)";
  bool increasing = true;
  for (std::size_t i = 1; i < spacings.size(); ++i) {
    increasing = increasing && rate_stars[i] > rate_stars[i - 1];
    increasing = increasing && fid_stars[i] > fid_stars[i - 1];
  }
  const bool far_enough =
      rate_stars.back() >= 1.5 * rate_stars.front() && fid_stars.back() >= 1.5 * fid_stars.front();
  return increasing && far_enough;
}

bool c7_oracle_equivalence(std::ostream& log) {
  Rng rng(20240501);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    bell::BellDiagonalState a, b;
    double sa = 0.0, sb = 0.0;
    for (int k = 0; k < 4; ++k) {
      a.w[k] = -std::log(rng.uniform01() + 1e-300);
      b.w[k] = -std::log(rng.uniform01() + 1e-300);
      sa += a.w[k];
      sb += b.w[k];
    }
    for (int k = 0; k < 4; ++k) {
      a.w[k] /= sa;
      b.w[k] /= sb;
    }
    for (double f : {1.0, 0.99, 0.9, 0.25}) {
      const double fast = bell::swap_dbsm(a, b, std::max(f, 0.5)).fidelity();
      const double slow = oracle::dm_swap_oracle(a, b, std::max(f, 0.5)).fidelity();
      worst = std::max(worst, std::abs(fast - slow));
    }
  }
  log << "200 random inputs, worst fidelity gap " << worst;
  return worst <= 1e-12;
}

bool c8_waiting_approximation(std::ostream& log) {
  const oracle::McConfig cfg{1234, 100000};
  bool ok = true;
  for (int n : {2, 4, 8, 16}) {
    for (double p : {0.01, 0.1, 0.5}) {
      const double analytic = std::pow(1.5, std::log2(static_cast<double>(n))) / p;
      const double mc = oracle::mc_waiting_rounds(n, p, cfg);
      const double dev = std::abs(analytic - mc) / analytic;
      log << "\n  n=" << n << " p=" << p << ": mc " << mc << " vs analytic " << analytic
          << " (dev " << dev * 100.0 << "%)" << (dev <= 0.15 ? "" : "  <-- exceeds 15%");
      ok = ok && dev <= 0.15;
    }
  }
  return ok;
}

bool c9_distillation(std::ostream& log) {
  for (double f = 0.501; f < 1.0; f += 0.001)
    if (!(bell::distill(f, f).fidelity > f)) {
      log << "no improvement at F = " << f;
      return false;
    }
  if (bell::distill(0.5, 0.5).fidelity != 0.5 || bell::distill(1.0, 1.0).fidelity != 1.0) {
    log << "fixed points moved";
    return false;
  }
  const oracle::McConfig cfg{88, 100000};
  for (const auto& [f, rounds] : std::vector<std::pair<double, int>>{{0.8, 1}, {0.9, 3}}) {
    const bell::DistillPlan plan = bell::nested_distill(f, rounds);
    const oracle::McDistillYield yield = oracle::mc_distill_yield(f, rounds, cfg);
    // Per-trial sd is bounded by the mean here, so 3 sigma of the mean
    // estimate is under 3*mean/sqrt(trials).
    const double band = 3.0 * plan.expected_raw_pairs / std::sqrt(1e5);
    if (std::abs(yield.mean_raw_pairs - plan.expected_raw_pairs) > band) {
      log << "yield off at f=" << f << " rounds=" << rounds << ": " << yield.mean_raw_pairs
          << " vs " << plan.expected_raw_pairs;
      return false;
    }
  }
  log << "improvement grid, fixed points, and MC yield all hold";
  return true;
}

bool c10_scaling_law(std::ostream& log) {
  const auto& records = desk_records(0.0);
  std::vector<protocol::HybridResult> baseline;
  baseline.reserve(records.size());
  for (const runner::PairRecord& r : records) baseline.push_back(r.hybrid_rate);

  std::vector<protocol::HybridResult> scaled = baseline;
  protocol::scale(scaled, {100.0, 100.0});

  double base_sum = 0.0, scaled_sum = 0.0;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (scaled[i].rate_hz != 100.0 * baseline[i].rate_hz) {
      log << "pair " << i << " rate not exactly 100x";
      return false;
    }
    if (scaled[i].fidelity != baseline[i].fidelity) {
      log << "pair " << i << " fidelity changed";
      return false;
    }
    base_sum += baseline[i].rate_hz;
    scaled_sum += scaled[i].rate_hz;
  }
  const double base_mean = base_sum / baseline.size();
  const double scaled_mean = scaled_sum / baseline.size();
  log << "mean rate " << base_mean << " -> " << scaled_mean << " /s (every pair exactly 100x, "
      << "fidelities bit-identical)";
  return std::abs(scaled_mean - 100.0 * base_mean) <= 1e-9 * scaled_mean;
}

bool c11_topology_invariants(std::ostream& log) {
  const runner::ExperimentConfig cfg = desk_config();
  std::vector<topo::NodeRecord> nodes =
      topo::synth_nodes(cfg.graph.seed, cfg.graph.count, topo::us_region(), cfg.graph.clusters);
  topo::GeoGraph graph = topo::build_knn_graph(std::move(nodes), cfg.graph.k);

  // Components before augmentation, via a scratch copy.
  int components = 0;
  {
    std::vector<int> label(graph.node_count(), -1);
    std::vector<int> stack;
    for (int s = 0; s < graph.node_count(); ++s) {
      if (label[s] != -1) continue;
      stack.push_back(s);
      label[s] = components;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& [u, len] : graph.neighbors(v))
          if (label[u] == -1) {
            label[u] = components;
            stack.push_back(u);
          }
      }
      ++components;
    }
  }

  const auto added = topo::connect_components(graph);
  const bool count_matches = static_cast<int>(added.size()) == components - 1;
  const bool idempotent = topo::connect_components(graph).empty();

  int min_deg = graph.node_count(), max_deg = 0;
  double deg_sum = 0.0;
  for (int v = 0; v < graph.node_count(); ++v) {
    const int deg = static_cast<int>(graph.neighbors(v).size());
    min_deg = std::min(min_deg, deg);
    max_deg = std::max(max_deg, deg);
    deg_sum += deg;
  }
  log << components << " components, " << added.size() << " links added; degrees ["
      << min_deg << ", " << max_deg << "], mean " << deg_sum / graph.node_count()
      << " (full-scale reference: 3-9, mean 3.9)";
  return count_matches && idempotent && min_deg >= 3 && max_deg <= 12;
}

struct Criterion {
  int id;
  const char* title;
  std::function<bool(std::ostream&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "fiber crossover at 61.7 km with n_p* jumping 0 -> 7", c1_fiber_crossover},
      {2, "undistilled fidelity collapses past ~26 repeaters", c2_fidelity_collapse},
      {3, "MEO satellite pair rate near 3 /s", c3_meo_rate},
      {4, "GEO comparison near 0.02 /s", c4_geo_rate},
      {5, "rate and fidelity crossovers near 280 km at d = 0", c5_crossover_d0},
      {6, "crossover distances grow with station grid spacing", c6_grid_monotonicity},
      {7, "swap algebra matches the density-matrix oracle to 1e-12", c7_oracle_equivalence},
      {8, "waiting-time factor within 15% of Monte Carlo", c8_waiting_approximation},
      {9, "distillation recurrence properties and MC yield", c9_distillation},
      {10, "alpha = beta = 100 rescales rates exactly", c10_scaling_law},
      {11, "topology connectivity, augmentation count, degree range", c11_topology_invariants},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;  // 0 = all
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--list") == 0) {
      for (const Criterion& c : criteria()) std::cout << c.id << ": " << c.title << "\n";
      return 0;
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--list]\n";
      return 2;
    }
  }

  bool all_ok = true;
  for (const Criterion& c : criteria()) {
    if (selected != 0 && c.id != selected) continue;
    std::ostringstream log;
    bool ok = false;
    try {
      ok = c.run(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "C" << c.id << " " << c.title << ": "
              << log.str() << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
