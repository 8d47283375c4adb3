#include "qnet/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qnet::protocol {

namespace {

struct Layout {
  std::vector<int> photon_idx;  // indices into the path
  std::vector<int> ion_idx;
  std::vector<double> segments_km;  // 2k lengths between active nodes
};

std::vector<double> cumulative_lengths(const topo::GeoGraph& graph, const std::vector<int>& path) {
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    double len = -1.0;
    for (const auto& [u, l] : graph.neighbors(path[i - 1]))
      if (u == path[i]) {
        len = l;
        break;
      }
    if (len < 0.0) throw ParamError("path nodes are not adjacent in the graph");
    cum[i] = cum[i - 1] + len;
  }
  return cum;
}

// Snap 2k-1 ideal fractional positions to distinct interior path nodes,
// left to right. Returns nothing when the path is too short for k.
std::optional<Layout> snap_layout(const std::vector<double>& cum, int k) {
  const int last = static_cast<int>(cum.size()) - 1;
  Layout layout;
  if (k == 0) {
    layout.segments_km = {cum[last]};
    return layout;
  }
  if (2 * k - 1 > last - 1) return std::nullopt;

  const double total = cum[last];
  std::vector<int> chosen;
  int prev = 0;
  for (int j = 1; j <= 2 * k - 1; ++j) {
    const double ideal = total * j / (2.0 * k);
    auto it = std::lower_bound(cum.begin(), cum.end(), ideal);
    int cand = static_cast<int>(it - cum.begin());
    if (cand > 0 && (cand == last + 1 ||
                     ideal - cum[cand - 1] <= cum[std::min(cand, last)] - ideal))
      cand = cand - 1;  // ties to the lower index
    cand = std::clamp(cand, prev + 1, last - 1 - (2 * k - 1 - j));
    if (cand <= prev || cand > last - 1) return std::nullopt;
    chosen.push_back(cand);
    prev = cand;
  }

  layout.segments_km.reserve(2 * k);
  int at = 0;
  for (int j = 0; j < 2 * k - 1; ++j) {
    layout.segments_km.push_back(cum[chosen[j]] - cum[at]);
    at = chosen[j];
    if (j % 2 == 0)
      layout.photon_idx.push_back(chosen[j]);
    else
      layout.ion_idx.push_back(chosen[j]);
  }
  layout.segments_km.push_back(cum[last] - cum[at]);
  return layout;
}

struct ChainEval {
  double time_s = 0.0;
  bell::BellDiagonalState state;
};

// Evaluate one (layout, rounds) configuration. Links run in parallel;
// the slowest link sets the pace and the waiting factor amplifies it.
// In budget mode every link dephases for (budget - its own time).
ChainEval evaluate_chain(const Layout& layout, int rounds, const bell::NoiseParams& noise,
                         const fiber::FiberParams& params, std::optional<double> dephase_budget_s) {
  ChainEval out;
  const int k = static_cast<int>(layout.segments_km.size()) / 2;
  if (k == 0) {
    const bell::DistillPlan plan = bell::nested_distill(noise.f0, rounds);
    out.time_s = fiber::time_direct(layout.segments_km[0], params) * plan.expected_raw_pairs;
    out.state = bell::BellDiagonalState::psi_mixture(plan.fidelity);
    if (dephase_budget_s && *dephase_budget_s > out.time_s)
      out.state = bell::dephase(out.state, *dephase_budget_s - out.time_s, noise.tau_q);
    return out;
  }

  const double f_ii = bell::ion_ion_after_photon_bsm(noise).fidelity();
  const bell::DistillPlan plan = bell::nested_distill(f_ii, rounds);
  const bell::BellDiagonalState link_state = bell::BellDiagonalState::psi_mixture(plan.fidelity);

  std::vector<double> own_times(k);
  double slowest = 0.0;
  for (int i = 0; i < k; ++i) {
    own_times[i] = fiber::link_time(layout.segments_km[2 * i], layout.segments_km[2 * i + 1],
                                    params) *
                   plan.expected_raw_pairs / params.multiplex;
    slowest = std::max(slowest, own_times[i]);
  }
  out.time_s = slowest * fiber::waiting_factor(k);

  bool first = true;
  for (int i = 0; i < k; ++i) {
    bell::BellDiagonalState s = link_state;
    if (dephase_budget_s && *dephase_budget_s > own_times[i])
      s = bell::dephase(s, *dephase_budget_s - own_times[i], noise.tau_q);
    if (first) {
      out.state = s;
      first = false;
    } else {
      out.state = bell::swap_dbsm(out.state, s, noise.f_swap_ion);
    }
  }
  return out;
}

PathPlan make_plan(const std::vector<int>& path, const Layout& layout, Objective objective,
                   int rounds, double rate_hz, const bell::BellDiagonalState& state) {
  PathPlan plan;
  plan.path = path;
  for (int idx : layout.photon_idx) plan.photon_repeaters.push_back(path[idx]);
  for (int idx : layout.ion_idx) plan.ion_repeaters.push_back(path[idx]);
  plan.objective = objective;
  plan.segment_lengths_km = layout.segments_km;
  plan.distill_rounds = rounds;
  plan.rate_hz = rate_hz;
  plan.fidelity = state.fidelity();
  plan.state = state;
  plan.feasible = true;
  return plan;
}

}  // namespace

PathPlan greedy_placement(const topo::GeoGraph& graph, const std::vector<int>& path,
                          const bell::NoiseParams& noise, const fiber::FiberParams& params,
                          const PlacementConstraint& constraint) {
  if (path.size() < 2) throw ParamError("placement needs a path of at least 2 nodes");
  noise.validate();
  params.validate();

  const std::vector<double> cum = cumulative_lengths(graph, path);
  const int interior = static_cast<int>(path.size()) - 2;
  const int k_cap = std::min((interior + 1) / 2, fiber::kDefaultMaxRepeaters);

  PathPlan best;
  best.path = path;
  best.state = bell::BellDiagonalState::psi_mixture(0.0);

  if (const auto* rate_mode = std::get_if<RateUnderTarget>(&constraint)) {
    best.objective = Objective::rate;
    int stale = 0;
    for (int k = 0; k <= k_cap && stale < 12; ++k) {
      const std::optional<Layout> layout = snap_layout(cum, k);
      if (!layout) break;
      bool improved = false;
      for (int r = 0; r <= fiber::kMaxDistillRounds; ++r) {
        const ChainEval eval = evaluate_chain(*layout, r, noise, params, std::nullopt);
        if (rate_mode->target_fidelity && eval.state.fidelity() < *rate_mode->target_fidelity)
          continue;
        const double rate = 1.0 / eval.time_s;
        if (!best.feasible || rate > best.rate_hz) {
          best = make_plan(path, *layout, Objective::rate, r, rate, eval.state);
          improved = true;
        }
      }
      stale = improved ? 0 : stale + 1;
    }
    return best;
  }

  const auto& budget_mode = std::get<FidelityUnderBudget>(constraint);
  if (!(budget_mode.budget_s > 0.0)) throw ParamError("time budget must be positive");
  best.objective = Objective::fidelity;
  for (int r = 0; r <= fiber::kMaxDistillRounds; ++r) {
    bool any_feasible = false;
    for (int k = 0; k <= k_cap; ++k) {
      const std::optional<Layout> layout = snap_layout(cum, k);
      if (!layout) break;
      ChainEval eval = evaluate_chain(*layout, r, noise, params, budget_mode.budget_s);
      if (eval.time_s > budget_mode.budget_s) continue;
      any_feasible = true;
      if (!best.feasible || eval.state.fidelity() > best.fidelity)
        best = make_plan(path, *layout, Objective::fidelity, r, 1.0 / budget_mode.budget_s,
                         eval.state);
      // Fidelity only decreases with more active repeaters at fixed r.
      break;
    }
    if (!any_feasible) break;  // larger r is strictly slower
  }
  return best;
}

namespace {

HybridResult result_shell(const topo::GeoGraph& graph, int a, int b) {
  HybridResult res;
  res.a = a;
  res.b = b;
  res.geographic_distance_km = haversine_km(graph.location(a), graph.location(b));
  return res;
}

// End-to-end state of [left spur, satellite pair, right spur] with a
// noisy deterministic swap at each station holding two of the pieces.
bell::BellDiagonalState compose_at_stations(const std::optional<bell::BellDiagonalState>& left,
                                            const bell::BellDiagonalState& satellite,
                                            const std::optional<bell::BellDiagonalState>& right,
                                            double f_swap_ion) {
  bell::BellDiagonalState acc = satellite;
  if (left) acc = bell::swap_dbsm(*left, acc, f_swap_ion);
  if (right) acc = bell::swap_dbsm(acc, *right, f_swap_ion);
  return acc;
}

// Smallest per-segment fidelity whose swap composition with the
// (possibly distilled) satellite pair reaches the end-to-end target;
// empty when even perfect segments cannot get there.
std::optional<double> segment_target(double end_to_end_target, double sat_fidelity, bool left,
                                     bool right, double f_swap_ion) {
  const auto composed = [&](double f) {
    const std::optional<bell::BellDiagonalState> seg =
        bell::BellDiagonalState::psi_mixture(f);
    return compose_at_stations(left ? seg : std::nullopt,
                               bell::BellDiagonalState::psi_mixture(sat_fidelity),
                               right ? seg : std::nullopt, f_swap_ion)
        .fidelity();
  };
  if (!left && !right)
    return sat_fidelity >= end_to_end_target ? std::optional<double>(0.5) : std::nullopt;
  if (composed(1.0) < end_to_end_target) return std::nullopt;
  double lo = 0.5, hi = 1.0;
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (composed(mid) >= end_to_end_target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

HybridResult fiber_only_eval(const topo::GeoGraph& graph, int a, int b,
                             const bell::NoiseParams& noise, const fiber::FiberParams& params,
                             const EvalMode& mode, const topo::PathResult* route) {
  if (a == b) throw ParamError("end nodes must differ");
  HybridResult res = result_shell(graph, a, b);
  res.mode = RouteMode::fiber_only;

  topo::PathResult local_route;
  if (!route) {
    local_route = topo::shortest_path(graph, a, b);
    route = &local_route;
  }
  PlacementConstraint constraint;
  if (mode.objective == Objective::rate)
    constraint = RateUnderTarget{mode.target_fidelity};
  else
    constraint = FidelityUnderBudget{mode.budget_s};
  PathPlan plan = greedy_placement(graph, route->nodes, noise, params, constraint);

  res.feasible = plan.feasible;
  res.rate_hz = plan.feasible ? plan.rate_hz : 0.0;
  res.fidelity = plan.feasible ? plan.fidelity : 0.0;
  res.fiber_segments.push_back(std::move(plan));
  return res;
}

HybridResult satellite_only_eval(const GeoPoint& a, const GeoPoint& b,
                                 const sat::SatelliteParams& satellite,
                                 const sat::StationParams& station) {
  HybridResult res;
  res.geographic_distance_km = haversine_km(a, b);
  res.mode = RouteMode::satellite_only;
  res.sat_rate_hz = sat::pair_rate(a, b, satellite, station);
  res.rate_hz = res.sat_rate_hz;
  res.fidelity = satellite.source_fidelity;
  res.feasible = true;
  return res;
}

HybridResult hybrid_eval(const topo::GeoGraph& graph, const topo::StationField& field, int a,
                         int b, const bell::NoiseParams& noise, const fiber::FiberParams& params,
                         const sat::SatelliteParams& satellite,
                         const sat::StationParams& station, const EvalMode& mode,
                         const topo::PathResult* route) {
  if (a == b) throw ParamError("end nodes must differ");
  const int s1 = field.owner[a];
  const int s2 = field.owner[b];
  if (s1 < 0 || s2 < 0) throw InternalError("station field does not cover the pair");

  EvalMode fiber_mode = mode;
  double sat_rate = 0.0;
  bool visible = true;
  try {
    sat_rate = sat::pair_rate(graph.location(s1), graph.location(s2), satellite, station);
  } catch (const VisibilityError&) {
    visible = false;
  }
  if (mode.objective == Objective::fidelity && visible && sat_rate > 0.0)
    fiber_mode.budget_s = 1.0 / sat_rate;

  HybridResult fiber_only = fiber_only_eval(graph, a, b, noise, params, fiber_mode, route);
  if (s1 == s2 || !visible || sat_rate <= 0.0) return fiber_only;

  HybridResult res = result_shell(graph, a, b);
  res.mode = RouteMode::hybrid;
  res.stations_used = {s1, s2};
  res.sat_rate_hz = sat_rate;

  const bool left_needed = a != s1;
  const bool right_needed = b != s2;

  // Evaluate both spurs under one constraint; reports the end-to-end
  // composition and the limiting segment rate.
  struct SpurEval {
    bool feasible = true;
    double limiting_rate = 0.0;
    std::vector<PathPlan> segments;
    std::optional<bell::BellDiagonalState> left, right;
  };
  const auto eval_spurs = [&](const PlacementConstraint& constraint,
                              double start_rate) -> SpurEval {
    SpurEval ev;
    ev.limiting_rate = start_rate;
    for (const auto& [needed, node, slot] :
         {std::tuple{left_needed, a, &ev.left}, std::tuple{right_needed, b, &ev.right}}) {
      if (!needed || !ev.feasible) continue;
      const topo::PathResult spur = topo::field_path(field, node);
      PathPlan plan = greedy_placement(graph, spur.nodes, noise, params, constraint);
      if (plan.feasible) {
        ev.limiting_rate = std::min(ev.limiting_rate, plan.rate_hz);
        *slot = plan.state;
      } else {
        ev.feasible = false;
      }
      ev.segments.push_back(std::move(plan));
    }
    return ev;
  };

  if (mode.objective == Objective::rate) {
    // The two station swaps cost more fidelity than the raw satellite
    // pair can spare at paper-level targets, so the stations may first
    // distill the satellite pairs (spending several of them per kept
    // pair) until the swap composition can reach the target; the
    // per-segment target then comes from the usual bisection.
    for (int r_sat = 0; r_sat <= fiber::kMaxDistillRounds; ++r_sat) {
      const bell::DistillPlan sat_plan =
          bell::nested_distill(satellite.source_fidelity, r_sat);
      const double sat_leg_rate = sat_rate / sat_plan.expected_raw_pairs;
      if (res.feasible && sat_leg_rate <= res.rate_hz) break;  // only slower from here

      const std::optional<double> f_seg =
          segment_target(mode.target_fidelity, sat_plan.fidelity, left_needed, right_needed,
                         noise.f_swap_ion);
      if (!f_seg) continue;  // needs a cleaner satellite pair

      SpurEval ev = eval_spurs(RateUnderTarget{*f_seg}, sat_leg_rate);
      if (!ev.feasible) continue;
      if (!res.feasible || ev.limiting_rate > res.rate_hz) {
        const bell::BellDiagonalState end_state =
            compose_at_stations(ev.left, bell::BellDiagonalState::psi_mixture(sat_plan.fidelity),
                                ev.right, noise.f_swap_ion);
        res.feasible = true;
        res.rate_hz = ev.limiting_rate;
        res.fidelity = end_state.fidelity();
        res.fiber_segments = std::move(ev.segments);
        res.sat_rate_hz = sat_leg_rate;
      }
    }
  } else {
    // Fidelity mode: raw satellite pairs set the clock; each spur gets
    // the satellite pair time as its budget.
    SpurEval ev = eval_spurs(FidelityUnderBudget{1.0 / sat_rate}, sat_rate);
    if (ev.feasible) {
      const bell::BellDiagonalState end_state = compose_at_stations(
          ev.left, bell::BellDiagonalState::psi_mixture(satellite.source_fidelity), ev.right,
          noise.f_swap_ion);
      res.feasible = true;
      res.rate_hz = sat_rate;
      res.fidelity = end_state.fidelity();
      res.fiber_segments = std::move(ev.segments);
    } else {
      res.fiber_segments = std::move(ev.segments);
    }
  }

  // Keep whichever route wins the queried metric; ties go to fiber.
  const bool hybrid_wins =
      res.feasible && (!fiber_only.feasible ||
                       (mode.objective == Objective::rate ? res.rate_hz > fiber_only.rate_hz
                                                          : res.fidelity > fiber_only.fidelity));
  return hybrid_wins ? res : fiber_only;
}

CrossoverResult crossover_distances(std::span<const CrossoverSample> samples, double bin_km,
                                    int min_bin_count) {
  if (!(bin_km > 0.0)) throw ParamError("bin width must be positive");
  if (samples.empty()) throw ParamError("no samples");

  struct Bin {
    std::vector<double> fiber_rate, hybrid_rate, fiber_fid, hybrid_fid;
  };
  std::map<long, Bin> bins;
  for (const CrossoverSample& s : samples) {
    Bin& b = bins[static_cast<long>(std::floor(s.d_km / bin_km))];
    b.fiber_rate.push_back(s.fiber_rate_hz);
    b.hybrid_rate.push_back(s.hybrid_rate_hz);
    b.fiber_fid.push_back(s.fiber_fidelity);
    b.hybrid_fid.push_back(s.hybrid_fidelity);
  }

  const auto median = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  // Centers of populated bins plus the hybrid-wins verdict per metric.
  std::vector<double> centers;
  std::vector<bool> rate_wins, fid_wins;
  for (auto& [idx, bin] : bins) {
    if (static_cast<int>(bin.fiber_rate.size()) < min_bin_count) continue;
    centers.push_back((idx + 0.5) * bin_km);
    rate_wins.push_back(median(bin.hybrid_rate) > median(bin.fiber_rate));
    fid_wins.push_back(median(bin.hybrid_fid) > median(bin.fiber_fid));
  }

  const auto estimate = [&](const std::vector<bool>& wins) -> std::optional<double> {
    if (centers.empty()) return std::nullopt;
    long last_fiber = -1;
    bool any_win = false;
    for (std::size_t i = 0; i < wins.size(); ++i) {
      if (wins[i])
        any_win = true;
      else
        last_fiber = static_cast<long>(i);
    }
    if (!any_win) return std::nullopt;
    if (last_fiber + 1 >= static_cast<long>(centers.size())) return std::nullopt;
    return centers[last_fiber + 1];
  };

  return {estimate(rate_wins), estimate(fid_wins)};
}

void scale(std::vector<HybridResult>& results, const ScalingFactors& factors) {
  if (!(factors.alpha >= 1.0 && factors.beta >= 1.0))
    throw ParamError("scaling factors must be >= 1");
  for (HybridResult& r : results) {
    switch (r.mode) {
      case RouteMode::fiber_only:
        r.rate_hz *= factors.alpha;
        for (PathPlan& p : r.fiber_segments) p.rate_hz *= factors.alpha;
        break;
      case RouteMode::satellite_only:
        r.rate_hz *= factors.beta;
        r.sat_rate_hz *= factors.beta;
        break;
      case RouteMode::hybrid: {
        double limit = r.sat_rate_hz * factors.beta;
        r.sat_rate_hz *= factors.beta;
        for (PathPlan& p : r.fiber_segments) {
          p.rate_hz *= factors.alpha;
          limit = std::min(limit, p.rate_hz);
        }
        r.rate_hz = limit;
        break;
      }
    }
  }
}

}  // namespace qnet::protocol
