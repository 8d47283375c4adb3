#include "qnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "qnet/oracle.hpp"

namespace qnet::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int thread_count() {
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
    if (n < 0) throw UsageError("THREADS must be a nonnegative integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Index-sharded parallel loop; output written by index keeps results
// independent of scheduling.
void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), std::max(1, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  for (std::thread& t : pool) t.join();
}

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  if (!obj.is_object()) throw ParamError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ParamError("unknown config key '" + key + "' in " + where);
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ParamError(std::string("config key '") + key + "' must be numeric");
  return v.get<double>();
}

}  // namespace

void PhysicsConfig::validate() const {
  fiber.validate();
  noise.validate();
  satellite.validate();
  station.validate();
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc, {"experiment", "graph", "pair_sample", "physics", "grid", "scaling",
                       "target_fidelity", "output", "full_scale"},
                 "top level");

  ExperimentConfig cfg;
  cfg.experiment = doc.value("experiment", cfg.experiment);
  const std::set<std::string> experiments = {"fig2", "fig3", "fig4", "table1", "fig6", "fig7"};
  if (!experiments.count(cfg.experiment))
    throw ParamError("unknown experiment '" + cfg.experiment + "'");

  // Section II studies a single fiber pair; the network experiments use
  // the multiplexed repeater nodes (10 ion pairs per direction).
  cfg.physics.fiber.multiplex = cfg.experiment == "fig2" ? 1 : 10;
  if (cfg.experiment == "table1") cfg.grid_spacings_km = {700.0, 450.0, 240.0, 0.0};
  if (cfg.experiment == "fig6") cfg.grid_spacings_km = {700.0, 450.0, 240.0};

  if (doc.contains("graph")) {
    const json& g = doc.at("graph");
    reject_unknown(g, {"file", "synth", "k", "threshold_km", "max_segment_km"}, "graph");
    if (g.contains("file")) cfg.graph.file = g.at("file").get<std::string>();
    if (g.contains("synth")) {
      const json& s = g.at("synth");
      reject_unknown(s, {"seed", "count", "clusters"}, "graph.synth");
      cfg.graph.seed = s.value("seed", cfg.graph.seed);
      cfg.graph.count = static_cast<int>(get_num(s, "count", cfg.graph.count));
      cfg.graph.clusters = static_cast<int>(get_num(s, "clusters", cfg.graph.clusters));
    }
    cfg.graph.k = static_cast<int>(get_num(g, "k", cfg.graph.k));
    cfg.graph.threshold_km = get_num(g, "threshold_km", cfg.graph.threshold_km);
    cfg.graph.max_segment_km = get_num(g, "max_segment_km", cfg.graph.max_segment_km);
  }

  if (doc.contains("pair_sample")) {
    const json& p = doc.at("pair_sample");
    reject_unknown(p, {"count", "seed"}, "pair_sample");
    cfg.pair_count = static_cast<int>(get_num(p, "count", cfg.pair_count));
    cfg.pair_seed = p.value("seed", cfg.pair_seed);
    if (cfg.pair_count < 1) throw ParamError("pair_sample.count must be >= 1");
  }

  if (doc.contains("physics")) {
    const json& ph = doc.at("physics");
    reject_unknown(ph, {"fiber", "noise", "satellite", "station"}, "physics");
    if (ph.contains("fiber")) {
      const json& f = ph.at("fiber");
      reject_unknown(f, {"gamma_per_km", "c_fiber_m_s", "tau_emit_s", "p_detect", "multiplex"},
                     "physics.fiber");
      auto& fp = cfg.physics.fiber;
      fp.gamma_per_km = get_num(f, "gamma_per_km", fp.gamma_per_km);
      fp.c_fiber_m_s = get_num(f, "c_fiber_m_s", fp.c_fiber_m_s);
      fp.tau_emit_s = get_num(f, "tau_emit_s", fp.tau_emit_s);
      fp.p_detect = get_num(f, "p_detect", fp.p_detect);
      fp.multiplex = static_cast<int>(get_num(f, "multiplex", fp.multiplex));
    }
    if (ph.contains("noise")) {
      const json& n = ph.at("noise");
      reject_unknown(n, {"f0", "f_swap_photon", "f_swap_ion", "tau_q"}, "physics.noise");
      auto& np = cfg.physics.noise;
      np.f0 = get_num(n, "f0", np.f0);
      np.f_swap_photon = get_num(n, "f_swap_photon", np.f_swap_photon);
      np.f_swap_ion = get_num(n, "f_swap_ion", np.f_swap_ion);
      np.tau_q = get_num(n, "tau_q", np.tau_q);
    }
    if (ph.contains("satellite")) {
      const json& s = ph.at("satellite");
      reject_unknown(s,
                     {"altitude_m", "pair_rate_hz", "wavelength_m", "beam_waist_m",
                      "source_fidelity", "subsatellite_lat", "subsatellite_lon"},
                     "physics.satellite");
      auto& sp = cfg.physics.satellite;
      sp.altitude_m = get_num(s, "altitude_m", sp.altitude_m);
      sp.pair_rate_hz = get_num(s, "pair_rate_hz", sp.pair_rate_hz);
      sp.wavelength_m = get_num(s, "wavelength_m", sp.wavelength_m);
      sp.beam_waist_m = get_num(s, "beam_waist_m", sp.beam_waist_m);
      sp.source_fidelity = get_num(s, "source_fidelity", sp.source_fidelity);
      sp.subsatellite.lat_deg = get_num(s, "subsatellite_lat", sp.subsatellite.lat_deg);
      sp.subsatellite.lon_deg = get_num(s, "subsatellite_lon", sp.subsatellite.lon_deg);
    }
    if (ph.contains("station")) {
      const json& s = ph.at("station");
      reject_unknown(s,
                     {"telescope_radius_m", "eta_tran", "eta_rec", "eta_det", "eta_filt",
                      "eta_coup", "eta_atm_zenith"},
                     "physics.station");
      auto& st = cfg.physics.station;
      st.telescope_radius_m = get_num(s, "telescope_radius_m", st.telescope_radius_m);
      st.eta_tran = get_num(s, "eta_tran", st.eta_tran);
      st.eta_rec = get_num(s, "eta_rec", st.eta_rec);
      st.eta_det = get_num(s, "eta_det", st.eta_det);
      st.eta_filt = get_num(s, "eta_filt", st.eta_filt);
      st.eta_coup = get_num(s, "eta_coup", st.eta_coup);
      st.eta_atm_zenith = get_num(s, "eta_atm_zenith", st.eta_atm_zenith);
    }
  }
  cfg.physics.validate();

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    reject_unknown(g, {"spacing_km", "spacings_km", "anchor"}, "grid");
    if (g.contains("spacing_km")) cfg.grid_spacings_km = {get_num(g, "spacing_km", 0.0)};
    if (g.contains("spacings_km")) {
      cfg.grid_spacings_km = g.at("spacings_km").get<std::vector<double>>();
      if (cfg.grid_spacings_km.empty()) throw ParamError("grid.spacings_km must be nonempty");
    }
    if (g.contains("anchor")) {
      reject_unknown(g.at("anchor"), {"lat", "lon"}, "grid.anchor");
      cfg.grid_anchor = {get_num(g.at("anchor"), "lat", cfg.grid_anchor.lat_deg),
                         get_num(g.at("anchor"), "lon", cfg.grid_anchor.lon_deg)};
      validate_geo(cfg.grid_anchor);
    }
    for (double d : cfg.grid_spacings_km)
      if (d < 0.0) throw ParamError("grid spacing must be nonnegative");
  }

  if (doc.contains("scaling")) {
    const json& s = doc.at("scaling");
    reject_unknown(s, {"alpha", "beta", "sweep"}, "scaling");
    cfg.scaling.alpha = get_num(s, "alpha", cfg.scaling.alpha);
    cfg.scaling.beta = get_num(s, "beta", cfg.scaling.beta);
    if (s.contains("sweep")) cfg.scaling_sweep = s.at("sweep").get<std::vector<double>>();
    if (!(cfg.scaling.alpha >= 1.0 && cfg.scaling.beta >= 1.0))
      throw ParamError("scaling factors must be >= 1");
  }

  cfg.target_fidelity = get_num(doc, "target_fidelity", cfg.target_fidelity);
  if (!(cfg.target_fidelity > 0.5 && cfg.target_fidelity < 1.0))
    throw ParamError("target_fidelity must lie in (0.5, 1)");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, {"directory", "formats"}, "output");
    cfg.out_dir = o.value("directory", cfg.out_dir);
    if (o.contains("formats")) {
      cfg.write_csv = false;
      cfg.write_json = false;
      for (const auto& f : o.at("formats")) {
        const std::string name = f.get<std::string>();
        if (name == "csv")
          cfg.write_csv = true;
        else if (name == "json")
          cfg.write_json = true;
        else
          throw ParamError("unknown output format '" + name + "'");
      }
    }
  }

  cfg.full_scale = doc.value("full_scale", false);
  if (cfg.full_scale && !cfg.graph.file) cfg.graph.count = 83047;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParamError(std::string("invalid config JSON: ") + e.what());
  }
  return parse_config(doc);
}

json resolved_config_json(const ExperimentConfig& cfg) {
  json grid_spacings = cfg.grid_spacings_km;
  json doc{
      {"experiment", cfg.experiment},
      {"graph",
       {{"seed", cfg.graph.seed},
        {"count", cfg.graph.count},
        {"clusters", cfg.graph.clusters},
        {"k", cfg.graph.k},
        {"threshold_km", cfg.graph.threshold_km},
        {"max_segment_km", cfg.graph.max_segment_km}}},
      {"pair_sample", {{"count", cfg.pair_count}, {"seed", cfg.pair_seed}}},
      {"physics",
       {{"fiber",
         {{"gamma_per_km", cfg.physics.fiber.gamma_per_km},
          {"c_fiber_m_s", cfg.physics.fiber.c_fiber_m_s},
          {"tau_emit_s", cfg.physics.fiber.tau_emit_s},
          {"p_detect", cfg.physics.fiber.p_detect},
          {"multiplex", cfg.physics.fiber.multiplex}}},
        {"noise",
         {{"f0", cfg.physics.noise.f0},
          {"f_swap_photon", cfg.physics.noise.f_swap_photon},
          {"f_swap_ion", cfg.physics.noise.f_swap_ion},
          {"tau_q", std::isinf(cfg.physics.noise.tau_q) ? json("inf")
                                                        : json(cfg.physics.noise.tau_q)}}},
        {"satellite",
         {{"altitude_m", cfg.physics.satellite.altitude_m},
          {"pair_rate_hz", cfg.physics.satellite.pair_rate_hz},
          {"wavelength_m", cfg.physics.satellite.wavelength_m},
          {"beam_waist_m", cfg.physics.satellite.beam_waist_m},
          {"source_fidelity", cfg.physics.satellite.source_fidelity},
          {"subsatellite_lat", cfg.physics.satellite.subsatellite.lat_deg},
          {"subsatellite_lon", cfg.physics.satellite.subsatellite.lon_deg}}},
        {"station",
         {{"telescope_radius_m", cfg.physics.station.telescope_radius_m},
          {"eta_tran", cfg.physics.station.eta_tran},
          {"eta_rec", cfg.physics.station.eta_rec},
          {"eta_det", cfg.physics.station.eta_det},
          {"eta_filt", cfg.physics.station.eta_filt},
          {"eta_coup", cfg.physics.station.eta_coup},
          {"eta_atm_zenith", cfg.physics.station.eta_atm_zenith}}}}},
      {"grid",
       {{"spacings_km", grid_spacings},
        {"anchor", {{"lat", cfg.grid_anchor.lat_deg}, {"lon", cfg.grid_anchor.lon_deg}}}}},
      {"scaling",
       {{"alpha", cfg.scaling.alpha}, {"beta", cfg.scaling.beta}, {"sweep", cfg.scaling_sweep}}},
      {"target_fidelity", cfg.target_fidelity},
      {"full_scale", cfg.full_scale}};
  if (cfg.graph.file) doc["graph"]["file"] = *cfg.graph.file;
  return doc;
}

topo::LoadedGraph build_network(const ExperimentConfig& cfg) {
  if (cfg.graph.file) {
    topo::LoadedGraph loaded = topo::load_graph_json(*cfg.graph.file);
    return loaded;
  }
  if (cfg.full_scale)
    std::cerr << "note: full-scale synthesis (" << cfg.graph.count
              << " nodes); expect a long runtime\n";

  topo::LoadedGraph out;
  std::vector<topo::NodeRecord> nodes =
      topo::synth_nodes(cfg.graph.seed, cfg.graph.count, topo::us_region(), cfg.graph.clusters);
  out.graph = topo::build_knn_graph(std::move(nodes), cfg.graph.k);
  topo::connect_components(out.graph);
  topo::insert_intermediate_repeaters(out.graph, cfg.graph.threshold_km,
                                      cfg.graph.max_segment_km);
  out.meta = {cfg.graph.seed, cfg.graph.k, cfg.graph.threshold_km};
  return out;
}

std::vector<std::pair<int, int>> sample_pairs(const topo::GeoGraph& graph, int count,
                                              std::uint64_t seed) {
  std::vector<int> endpoints;
  for (const topo::NodeRecord& n : graph.nodes())
    if (n.kind == topo::NodeKind::endpoint) endpoints.push_back(n.id);
  if (endpoints.size() < 2) throw ParamError("graph has fewer than two endpoint nodes");

  Rng rng(seed);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> pairs;
  const long max_attempts = 64L * count + 1024;
  for (long attempt = 0; static_cast<int>(pairs.size()) < count && attempt < max_attempts;
       ++attempt) {
    const int a = endpoints[rng.uniform_below(endpoints.size())];
    const int b = endpoints[rng.uniform_below(endpoints.size())];
    if (a == b) continue;
    const auto key = std::minmax(a, b);
    if (!seen.insert(key).second) continue;
    pairs.emplace_back(a, b);
  }
  if (static_cast<int>(pairs.size()) < count)
    throw ParamError("could not sample enough distinct pairs");
  return pairs;
}

std::vector<PairRecord> evaluate_pairs(const topo::GeoGraph& graph,
                                       const topo::StationField& field,
                                       const std::vector<std::pair<int, int>>& pairs,
                                       const PhysicsConfig& physics, double target_fidelity) {
  std::vector<PairRecord> records(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int i) {
    const auto [a, b] = pairs[i];
    PairRecord& rec = records[i];
    rec.pair_id = i;
    rec.a = a;
    rec.b = b;
    rec.d_km = haversine_km(graph.location(a), graph.location(b));

    const topo::PathResult route = topo::shortest_path(graph, a, b);

    rec.satellite =
        protocol::satellite_only_eval(graph.location(a), graph.location(b), physics.satellite,
                                      physics.station);

    protocol::EvalMode rate_mode{protocol::Objective::rate, target_fidelity, 0.0};
    rec.fiber_rate =
        protocol::fiber_only_eval(graph, a, b, physics.noise, physics.fiber, rate_mode, &route);

    // The fidelity budget is the satellite pair time of the stations
    // actually serving this pair, so the fiber baseline and the hybrid
    // route are compared under one clock.
    double budget_rate = rec.satellite.rate_hz;
    const int s1 = field.owner[a], s2 = field.owner[b];
    if (s1 >= 0 && s2 >= 0 && s1 != s2) {
      try {
        budget_rate = sat::pair_rate(graph.location(s1), graph.location(s2), physics.satellite,
                                     physics.station);
      } catch (const VisibilityError&) {
      }
    }
    protocol::EvalMode fid_mode{protocol::Objective::fidelity, target_fidelity,
                                1.0 / budget_rate};
    rec.fiber_fidelity =
        protocol::fiber_only_eval(graph, a, b, physics.noise, physics.fiber, fid_mode, &route);

    rec.hybrid_rate = protocol::hybrid_eval(graph, field, a, b, physics.noise, physics.fiber,
                                            physics.satellite, physics.station, rate_mode, &route);
    rec.hybrid_fidelity =
        protocol::hybrid_eval(graph, field, a, b, physics.noise, physics.fiber,
                              physics.satellite, physics.station, fid_mode, &route);
    for (protocol::HybridResult* r :
         {&rec.fiber_rate, &rec.fiber_fidelity, &rec.satellite, &rec.hybrid_rate,
          &rec.hybrid_fidelity})
      r->pair_id = i;
  });
  return records;
}

namespace {

class OutputWriter {
 public:
  OutputWriter(const ExperimentConfig& cfg, RunSummary& summary)
      : cfg_(cfg), summary_(summary) {
    if (const char* env = std::getenv("OUT_DIR")) dir_ = env;
    if (dir_.empty()) dir_ = cfg.out_dir;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory: " + dir_);
  }

  const std::string& dir() const { return dir_; }

  // CSV plus a sidecar JSON capturing the fully resolved config.
  void write_csv(const std::string& name, const std::string& header,
                 const std::vector<std::string>& rows) {
    if (!cfg_.write_csv) return;
    const std::string path = dir_ + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << header << "\n";
    for (const std::string& row : rows) out << row << "\n";
    summary_.files_written.push_back(path);
    write_sidecar(name);
  }

  void write_json_doc(const std::string& name, const json& doc) {
    if (!cfg_.write_json) return;
    const std::string path = dir_ + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(1) << "\n";
    summary_.files_written.push_back(path);
  }

 private:
  void write_sidecar(const std::string& csv_name) {
    const std::string path = dir_ + "/" + csv_name + ".meta.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << json{{"file", csv_name}, {"config", resolved_config_json(cfg_)}}.dump(1) << "\n";
    summary_.files_written.push_back(path);
  }

  const ExperimentConfig& cfg_;
  RunSummary& summary_;
  std::string dir_;
};

const char* kPairHeader = "pair_id,a,b,D_km,mode,rate_hz,fidelity,stations,n_photon,n_ion";

std::string mode_name(protocol::RouteMode m) {
  switch (m) {
    case protocol::RouteMode::fiber_only: return "fiber_only";
    case protocol::RouteMode::hybrid: return "hybrid";
    case protocol::RouteMode::satellite_only: return "satellite_only";
  }
  return "?";
}

std::string pair_row(const protocol::HybridResult& r) {
  int n_photon = 0, n_ion = 0;
  for (const protocol::PathPlan& p : r.fiber_segments) {
    n_photon += static_cast<int>(p.photon_repeaters.size());
    n_ion += static_cast<int>(p.ion_repeaters.size());
  }
  std::string stations;
  for (std::size_t i = 0; i < r.stations_used.size(); ++i) {
    if (i) stations += ';';
    stations += std::to_string(r.stations_used[i]);
  }
  std::ostringstream row;
  row << r.pair_id << ',' << r.a << ',' << r.b << ',' << fmt(r.geographic_distance_km) << ','
      << mode_name(r.mode) << ',' << fmt(r.rate_hz) << ',' << fmt(r.fidelity) << ',' << stations
      << ',' << n_photon << ',' << n_ion;
  return row.str();
}

json plan_json(const protocol::PathPlan& p) {
  return json{{"path", p.path},
              {"photon_repeaters", p.photon_repeaters},
              {"ion_repeaters", p.ion_repeaters},
              {"objective", p.objective == protocol::Objective::rate ? "rate" : "fidelity"},
              {"segment_lengths_km", p.segment_lengths_km},
              {"distill_rounds", p.distill_rounds},
              {"rate_hz", p.rate_hz},
              {"fidelity", p.fidelity},
              {"feasible", p.feasible}};
}

json result_json(const protocol::HybridResult& r) {
  json segments = json::array();
  for (const protocol::PathPlan& p : r.fiber_segments) segments.push_back(plan_json(p));
  return json{{"pair_id", r.pair_id},
              {"a", r.a},
              {"b", r.b},
              {"D_km", r.geographic_distance_km},
              {"mode", mode_name(r.mode)},
              {"rate_hz", r.rate_hz},
              {"fidelity", r.fidelity},
              {"stations", r.stations_used},
              {"sat_rate_hz", r.sat_rate_hz},
              {"feasible", r.feasible},
              {"fiber_segments", segments}};
}

void write_result_set(OutputWriter& out, const std::string& stem,
                      const std::vector<protocol::HybridResult>& results) {
  std::vector<std::string> rows;
  rows.reserve(results.size());
  json detail = json::array();
  for (const protocol::HybridResult& r : results) {
    rows.push_back(pair_row(r));
    detail.push_back(result_json(r));
  }
  out.write_csv(stem + ".csv", kPairHeader, rows);
  out.write_json_doc(stem + ".json", detail);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

topo::StationGrid grid_for_spacing(const topo::GeoGraph& graph, double spacing_km,
                                   const GeoPoint& anchor) {
  return spacing_km == 0.0 ? topo::all_station_grid(graph)
                           : topo::place_station_grid(graph, spacing_km, anchor);
}

protocol::CrossoverResult crossovers_of(const std::vector<PairRecord>& records) {
  std::vector<protocol::CrossoverSample> samples;
  samples.reserve(records.size());
  for (const PairRecord& r : records)
    samples.push_back({r.d_km, r.fiber_rate.rate_hz, r.hybrid_rate.rate_hz,
                       r.fiber_fidelity.fidelity, r.hybrid_fidelity.fidelity});
  return protocol::crossover_distances(samples);
}

json spacing_stats(const std::vector<PairRecord>& records) {
  std::vector<double> rates, fids;
  for (const PairRecord& r : records) {
    rates.push_back(r.hybrid_rate.rate_hz);
    fids.push_back(r.hybrid_fidelity.fidelity);
  }
  return json{{"median_rate_hz", median_of(rates)},
              {"mean_rate_hz", mean_of(rates)},
              {"median_fidelity", median_of(fids)},
              {"mean_fidelity", mean_of(fids)}};
}

// ---- named experiments ----

void run_fig2(const ExperimentConfig& cfg, OutputWriter& out, RunSummary& summary) {
  const fiber::FiberParams& fp = cfg.physics.fiber;
  const bell::NoiseParams& noise = cfg.physics.noise;

  std::vector<std::string> rate_rows;
  for (int l = 1; l <= 1000; ++l) {
    const double L = static_cast<double>(l);
    const fiber::ChainResult best = fiber::optimal_repeater_count(L, fp, noise);
    rate_rows.push_back(fmt(L) + "," + fmt(1.0 / fiber::time_direct(L, fp)) + "," +
                        fmt(best.rate_hz) + "," + std::to_string(best.n_photon_repeaters));
  }
  out.write_csv("fig2_rate_vs_length.csv", "L_km,rate_direct_hz,rate_repeatered_hz,n_p_star",
                rate_rows);

  std::vector<std::string> fid_rows;
  for (int n = 1; n <= 40; ++n)
    fid_rows.push_back(std::to_string(n) + "," +
                       fmt(fiber::chain_fidelity_no_distill(n, noise).fidelity()));
  out.write_csv("fig2_fidelity_vs_repeaters.csv", "n_p,end_to_end_fidelity", fid_rows);

  // Crossover of the direct and repeatered rate curves by bisection.
  double lo = 10.0, hi = 200.0;
  const auto gap = [&](double L) {
    return fiber::optimal_repeater_count(L, fp, noise).rate_hz - 1.0 / fiber::time_direct(L, fp);
  };
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? hi : lo) = mid;
  }
  const double crossover = 0.5 * (lo + hi);
  const int n_star_after =
      fiber::optimal_repeater_count(crossover + 1.0, fp, noise).n_photon_repeaters;
  summary.summary["crossover_L_km"] = crossover;
  summary.summary["n_p_star_past_crossover"] = n_star_after;
}

void run_fig3(const ExperimentConfig& cfg, OutputWriter& out, RunSummary& summary) {
  topo::LoadedGraph net = build_network(cfg);
  const topo::GeoGraph& graph = net.graph;

  std::map<int, int> degree_hist;
  for (int v = 0; v < graph.node_count(); ++v)
    ++degree_hist[static_cast<int>(graph.neighbors(v).size())];
  std::vector<std::string> deg_rows;
  double degree_sum = 0.0;
  for (const auto& [deg, count] : degree_hist) {
    deg_rows.push_back(std::to_string(deg) + "," + std::to_string(count));
    degree_sum += static_cast<double>(deg) * count;
  }
  out.write_csv("fig3_degree_histogram.csv", "degree,count", deg_rows);

  std::map<int, int> len_hist;
  int over_threshold = 0;
  for (const topo::Link& l : graph.links()) {
    ++len_hist[static_cast<int>(l.length_km / 5.0)];
    if (l.length_km > cfg.graph.threshold_km) ++over_threshold;
  }
  std::vector<std::string> len_rows;
  for (const auto& [bin, count] : len_hist)
    len_rows.push_back(fmt(bin * 5.0) + "," + fmt(bin * 5.0 + 5.0) + "," + std::to_string(count));
  out.write_csv("fig3_link_length_histogram.csv", "bin_lo_km,bin_hi_km,count", len_rows);

  const auto pairs = sample_pairs(graph, cfg.pair_count, cfg.pair_seed);
  std::vector<double> path_lengths(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), [&](int i) {
    path_lengths[i] = topo::shortest_path(graph, pairs[i].first, pairs[i].second).length_km;
  });
  std::map<int, int> path_hist;
  for (double l : path_lengths) ++path_hist[static_cast<int>(l / 100.0)];
  std::vector<std::string> path_rows;
  for (const auto& [bin, count] : path_hist)
    path_rows.push_back(fmt(bin * 100.0) + "," + fmt(bin * 100.0 + 100.0) + "," +
                        std::to_string(count));
  out.write_csv("fig3_path_length_histogram.csv", "bin_lo_km,bin_hi_km,count", path_rows);

  int over_1000 = 0;
  for (double l : path_lengths)
    if (l > 1000.0) ++over_1000;

  summary.summary["nodes"] = graph.node_count();
  summary.summary["links"] = graph.links().size();
  summary.summary["mean_degree"] = degree_sum / graph.node_count();
  summary.summary["links_over_threshold_fraction"] =
      static_cast<double>(over_threshold) / static_cast<double>(graph.links().size());
  summary.summary["paths_over_1000_km_fraction"] =
      static_cast<double>(over_1000) / static_cast<double>(path_lengths.size());
}

void run_fig4(const ExperimentConfig& cfg, OutputWriter& out, RunSummary& summary) {
  topo::LoadedGraph net = build_network(cfg);
  const topo::GeoGraph& graph = net.graph;
  const auto pairs = sample_pairs(graph, cfg.pair_count, cfg.pair_seed);
  const topo::StationGrid grid = topo::all_station_grid(graph);
  const topo::StationField field = topo::station_field(graph, grid);
  const std::vector<PairRecord> records =
      evaluate_pairs(graph, field, pairs, cfg.physics, cfg.target_fidelity);

  std::vector<protocol::HybridResult> fiber_rate, fiber_fid, satellite, hyb_rate, hyb_fid;
  for (const PairRecord& r : records) {
    fiber_rate.push_back(r.fiber_rate);
    fiber_fid.push_back(r.fiber_fidelity);
    satellite.push_back(r.satellite);
    hyb_rate.push_back(r.hybrid_rate);
    hyb_fid.push_back(r.hybrid_fidelity);
  }
  write_result_set(out, "fig4_fiber_rate", fiber_rate);
  write_result_set(out, "fig4_fiber_fidelity", fiber_fid);
  write_result_set(out, "fig4_satellite", satellite);
  write_result_set(out, "fig4_hybrid_rate", hyb_rate);
  write_result_set(out, "fig4_hybrid_fidelity", hyb_fid);

  const protocol::CrossoverResult cross = crossovers_of(records);
  std::vector<double> sat_rates;
  for (const PairRecord& r : records) sat_rates.push_back(r.satellite.rate_hz);
  summary.summary["d_star_rate_km"] = cross.d_star_rate_km ? json(*cross.d_star_rate_km) : json();
  summary.summary["d_star_fidelity_km"] =
      cross.d_star_fidelity_km ? json(*cross.d_star_fidelity_km) : json();
  summary.summary["mean_satellite_rate_hz"] = mean_of(sat_rates);
  summary.summary["stats"] = spacing_stats(records);
}

void run_grid_family(const ExperimentConfig& cfg, OutputWriter& out, RunSummary& summary,
                     bool emit_pair_sets) {
  topo::LoadedGraph net = build_network(cfg);
  const topo::GeoGraph& graph = net.graph;
  const auto pairs = sample_pairs(graph, cfg.pair_count, cfg.pair_seed);

  std::vector<std::string> table_rows;
  json per_spacing = json::object();
  for (double d : cfg.grid_spacings_km) {
    const topo::StationGrid grid = grid_for_spacing(graph, d, cfg.grid_anchor);
    const topo::StationField field = topo::station_field(graph, grid);
    const std::vector<PairRecord> records =
        evaluate_pairs(graph, field, pairs, cfg.physics, cfg.target_fidelity);

    const std::string tag = "d" + std::to_string(static_cast<int>(d));
    if (emit_pair_sets) {
      std::vector<protocol::HybridResult> hyb_rate, hyb_fid;
      for (const PairRecord& r : records) {
        hyb_rate.push_back(r.hybrid_rate);
        hyb_fid.push_back(r.hybrid_fidelity);
      }
      write_result_set(out, "fig6_hybrid_rate_" + tag, hyb_rate);
      write_result_set(out, "fig6_hybrid_fidelity_" + tag, hyb_fid);
    }

    const protocol::CrossoverResult cross = crossovers_of(records);
    table_rows.push_back(fmt(d) + "," + fmt(d / std::sqrt(2.0)) + "," +
                         (cross.d_star_fidelity_km ? fmt(*cross.d_star_fidelity_km) : "absent") +
                         "," +
                         (cross.d_star_rate_km ? fmt(*cross.d_star_rate_km) : "absent"));
    json entry = spacing_stats(records);
    entry["stations"] = grid.station_ids.size();
    entry["d_star_rate_km"] = cross.d_star_rate_km ? json(*cross.d_star_rate_km) : json();
    entry["d_star_fidelity_km"] =
        cross.d_star_fidelity_km ? json(*cross.d_star_fidelity_km) : json();
    per_spacing[tag] = entry;
  }
  out.write_csv("table1.csv", "d_km,d_over_sqrt2_km,D_F_star_km,D_R_star_km", table_rows);
  summary.summary["per_spacing"] = per_spacing;
}

void run_fig7(const ExperimentConfig& cfg, OutputWriter& out, RunSummary& summary) {
  topo::LoadedGraph net = build_network(cfg);
  const topo::GeoGraph& graph = net.graph;
  const auto pairs = sample_pairs(graph, cfg.pair_count, cfg.pair_seed);
  const double spacing = cfg.grid_spacings_km.empty() ? 0.0 : cfg.grid_spacings_km.front();
  const topo::StationGrid grid = grid_for_spacing(graph, spacing, cfg.grid_anchor);
  const topo::StationField field = topo::station_field(graph, grid);
  const std::vector<PairRecord> records =
      evaluate_pairs(graph, field, pairs, cfg.physics, cfg.target_fidelity);

  std::vector<protocol::HybridResult> baseline;
  for (const PairRecord& r : records) baseline.push_back(r.hybrid_rate);

  json factors = json::object();
  for (double kappa : cfg.scaling_sweep) {
    std::vector<protocol::HybridResult> scaled = baseline;
    protocol::scale(scaled, {kappa, kappa});
    write_result_set(out, "fig7_rate_x" + std::to_string(static_cast<int>(kappa)), scaled);
    std::vector<double> rates;
    for (const protocol::HybridResult& r : scaled) rates.push_back(r.rate_hz);
    factors["x" + std::to_string(static_cast<int>(kappa))] = {
        {"mean_rate_hz", mean_of(rates)}, {"median_rate_hz", median_of(rates)}};
  }
  summary.summary["scaled"] = factors;
}

}  // namespace

RunSummary run(const ExperimentConfig& cfg) {
  RunSummary summary;
  OutputWriter out(cfg, summary);
  if (cfg.experiment == "fig2")
    run_fig2(cfg, out, summary);
  else if (cfg.experiment == "fig3")
    run_fig3(cfg, out, summary);
  else if (cfg.experiment == "fig4")
    run_fig4(cfg, out, summary);
  else if (cfg.experiment == "table1")
    run_grid_family(cfg, out, summary, false);
  else if (cfg.experiment == "fig6")
    run_grid_family(cfg, out, summary, true);
  else if (cfg.experiment == "fig7")
    run_fig7(cfg, out, summary);
  else
    throw ParamError("unknown experiment '" + cfg.experiment + "'");

  summary.summary["experiment"] = cfg.experiment;
  out.write_json_doc(cfg.experiment + "_summary.json", summary.summary);
  return summary;
}

namespace {

using Setter = std::function<void(PhysicsConfig&, double)>;

const std::map<std::string, Setter>& parameter_registry() {
  static const std::map<std::string, Setter> registry = {
      {"fiber.gamma_per_km", [](PhysicsConfig& p, double v) { p.fiber.gamma_per_km = v; }},
      {"fiber.c_fiber_m_s", [](PhysicsConfig& p, double v) { p.fiber.c_fiber_m_s = v; }},
      {"fiber.tau_emit_s", [](PhysicsConfig& p, double v) { p.fiber.tau_emit_s = v; }},
      {"fiber.p_detect", [](PhysicsConfig& p, double v) { p.fiber.p_detect = v; }},
      {"fiber.multiplex",
       [](PhysicsConfig& p, double v) { p.fiber.multiplex = static_cast<int>(v); }},
      {"noise.f0", [](PhysicsConfig& p, double v) { p.noise.f0 = v; }},
      {"noise.f_swap_photon", [](PhysicsConfig& p, double v) { p.noise.f_swap_photon = v; }},
      {"noise.f_swap_ion", [](PhysicsConfig& p, double v) { p.noise.f_swap_ion = v; }},
      {"noise.tau_q", [](PhysicsConfig& p, double v) { p.noise.tau_q = v; }},
      {"satellite.altitude_m", [](PhysicsConfig& p, double v) { p.satellite.altitude_m = v; }},
      {"satellite.pair_rate_hz",
       [](PhysicsConfig& p, double v) { p.satellite.pair_rate_hz = v; }},
      {"satellite.wavelength_m",
       [](PhysicsConfig& p, double v) { p.satellite.wavelength_m = v; }},
      {"satellite.beam_waist_m",
       [](PhysicsConfig& p, double v) { p.satellite.beam_waist_m = v; }},
      {"satellite.source_fidelity",
       [](PhysicsConfig& p, double v) { p.satellite.source_fidelity = v; }},
      {"satellite.subsatellite_lat",
       [](PhysicsConfig& p, double v) { p.satellite.subsatellite.lat_deg = v; }},
      {"satellite.subsatellite_lon",
       [](PhysicsConfig& p, double v) { p.satellite.subsatellite.lon_deg = v; }},
      {"station.telescope_radius_m",
       [](PhysicsConfig& p, double v) { p.station.telescope_radius_m = v; }},
      {"station.eta_tran", [](PhysicsConfig& p, double v) { p.station.eta_tran = v; }},
      {"station.eta_rec", [](PhysicsConfig& p, double v) { p.station.eta_rec = v; }},
      {"station.eta_det", [](PhysicsConfig& p, double v) { p.station.eta_det = v; }},
      {"station.eta_filt", [](PhysicsConfig& p, double v) { p.station.eta_filt = v; }},
      {"station.eta_coup", [](PhysicsConfig& p, double v) { p.station.eta_coup = v; }},
      {"station.eta_atm_zenith",
       [](PhysicsConfig& p, double v) { p.station.eta_atm_zenith = v; }},
  };
  return registry;
}

std::string value_tag(double v) {
  std::string tag = std::isinf(v) ? "inf" : fmt(v);
  for (char& c : tag)
    if (c == '.' || c == '+' || c == '-') c = '_';
  return tag;
}

}  // namespace

std::vector<std::string> sweepable_parameters() {
  std::vector<std::string> names;
  for (const auto& [name, setter] : parameter_registry()) names.push_back(name);
  return names;
}

RunSummary sweep(const ExperimentConfig& cfg, const std::string& parameter,
                 const std::vector<double>& values) {
  const auto& registry = parameter_registry();
  const auto it = registry.find(parameter);
  if (it == registry.end()) throw UsageError("unrecognized sweep parameter '" + parameter + "'");
  if (values.empty()) throw UsageError("sweep needs at least one value");

  RunSummary summary;
  OutputWriter out(cfg, summary);

  topo::LoadedGraph net = build_network(cfg);
  const topo::GeoGraph& graph = net.graph;
  const auto pairs = sample_pairs(graph, cfg.pair_count, cfg.pair_seed);
  const double spacing = cfg.grid_spacings_km.empty() ? 0.0 : cfg.grid_spacings_km.front();
  const topo::StationGrid grid = grid_for_spacing(graph, spacing, cfg.grid_anchor);
  const topo::StationField field = topo::station_field(graph, grid);

  std::vector<std::string> sweep_rows;
  json per_value = json::object();
  for (double value : values) {
    PhysicsConfig physics = cfg.physics;
    it->second(physics, value);
    physics.validate();

    const std::vector<PairRecord> records =
        evaluate_pairs(graph, field, pairs, physics, cfg.target_fidelity);
    const std::string tag = value_tag(value);
    std::vector<protocol::HybridResult> hyb_rate, hyb_fid;
    for (const PairRecord& r : records) {
      hyb_rate.push_back(r.hybrid_rate);
      hyb_fid.push_back(r.hybrid_fidelity);
    }
    write_result_set(out, "sweep_" + tag + "_hybrid_rate", hyb_rate);
    write_result_set(out, "sweep_" + tag + "_hybrid_fidelity", hyb_fid);

    std::vector<double> rates, fids, sat_rates;
    for (const PairRecord& r : records) {
      rates.push_back(r.hybrid_rate.rate_hz);
      fids.push_back(r.hybrid_fidelity.fidelity);
      sat_rates.push_back(r.satellite.rate_hz);
    }
    sweep_rows.push_back((std::isinf(value) ? std::string("inf") : fmt(value)) + "," +
                         fmt(median_of(rates)) + "," + fmt(median_of(fids)) + "," +
                         fmt(mean_of(sat_rates)));
    per_value[tag] = spacing_stats(records);
  }
  out.write_csv("sweep_" + parameter + ".csv",
                "value,median_hybrid_rate_hz,median_hybrid_fidelity,mean_satellite_rate_hz",
                sweep_rows);
  summary.summary["parameter"] = parameter;
  summary.summary["per_value"] = per_value;
  out.write_json_doc("sweep_summary.json", summary.summary);
  return summary;
}

namespace {

struct Check {
  ValidationReport& report;

  void expect(bool ok, const std::string& what) {
    report.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    report.ok = report.ok && ok;
  }
};

bell::BellDiagonalState random_state(Rng& rng) {
  double w[4], sum = 0.0;
  for (double& x : w) {
    x = -std::log(std::max(rng.uniform01(), 1e-300));
    sum += x;
  }
  bell::BellDiagonalState s;
  for (int i = 0; i < 4; ++i) s.w[i] = w[i] / sum;
  return s;
}

}  // namespace

ValidationReport validate(std::int64_t trials, std::uint64_t seed) {
  ValidationReport report;
  Check check{report};

  // Density-matrix oracle vs the Bell-weight swap algebra.
  {
    Rng rng(seed ^ 0x5eedULL);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const bell::BellDiagonalState a = random_state(rng);
      const bell::BellDiagonalState b = random_state(rng);
      for (double f : {1.0, 0.99, 0.9, 0.25}) {
        const double fast = bell::swap_dbsm(a, b, std::max(f, 0.5)).fidelity();
        const double slow = oracle::dm_swap_oracle(a, b, std::max(f, 0.5)).fidelity();
        worst = std::max(worst, std::abs(fast - slow));
      }
    }
    check.expect(worst <= 1e-12,
                 "swap algebra matches density-matrix oracle (worst " + fmt(worst) + ")");
  }

  // Weight conservation through random operation chains.
  {
    Rng rng(seed ^ 0xc0daULL);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      bell::BellDiagonalState s = random_state(rng);
      s = bell::swap_dbsm(s, random_state(rng), 0.5 + 0.5 * rng.uniform01());
      s = bell::dephase(s, rng.uniform01(), 0.5);
      double sum = 0.0;
      for (double w : s.w) {
        sum += w;
        worst = std::max(worst, -w);
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    check.expect(worst <= 1e-12, "weights stay normalized through random chains");
  }

  // Distillation recurrence: fixed points and strict improvement.
  {
    bool ok = bell::distill(0.5, 0.5).fidelity == 0.5 && bell::distill(1.0, 1.0).fidelity == 1.0;
    for (double f = 0.501; f < 1.0; f += 0.001) ok = ok && bell::distill(f, f).fidelity > f;
    check.expect(ok, "distillation improves every fidelity in (0.5, 1)");
  }

  // Dephasing monotonicity.
  {
    bool ok = true;
    double prev = 1.0;
    for (double t = 0.0; t <= 5.0; t += 0.05) {
      const double f =
          bell::dephase(bell::BellDiagonalState::pure_psi_minus(), t, 1.0).fidelity();
      ok = ok && f <= prev + 1e-15 && f >= 0.5 - 1e-15;
      prev = f;
    }
    check.expect(ok, "dephasing is monotone and bounded below by 1/2");
  }

  // Swap symmetry.
  {
    Rng rng(seed ^ 0x51abULL);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const bell::BellDiagonalState a = random_state(rng);
      const bell::BellDiagonalState b = random_state(rng);
      worst = std::max(worst, std::abs(bell::swap_dbsm(a, b, 0.93).fidelity() -
                                       bell::swap_dbsm(b, a, 0.93).fidelity()));
    }
    check.expect(worst <= 1e-14, "swap fidelity is symmetric in its inputs");
  }

  // Monte Carlo waiting vs exact closed forms for 1 and 2 links.
  {
    const oracle::McConfig cfg{seed, trials};
    const double one = oracle::mc_waiting_rounds(1, 0.5, cfg);
    const double two = oracle::mc_waiting_rounds(2, 0.5, cfg);
    const double se = 3.0 / std::sqrt(static_cast<double>(trials));  // generous sigma bound
    const bool ok = std::abs(one - 2.0) < 4.0 * se && std::abs(two - 8.0 / 3.0) < 4.0 * se;
    check.expect(ok, "MC waiting matches exact E[max] for 1 and 2 links (got " + fmt(one) +
                         ", " + fmt(two) + ")");

    std::vector<double> means(static_cast<std::size_t>(8));
    oracle::mc_waiting_rounds_batched(4, 0.2, cfg, 8, means.data());
    double m = mean_of(means), var = 0.0;
    for (double x : means) var += (x - m) * (x - m);
    check.expect(var > 0.0, "MC batches disperse (variance self-check)");
  }

  // Monte Carlo distillation yield vs the closed-form expectation.
  {
    const oracle::McConfig cfg{seed, trials};
    bool ok = true;
    for (const auto& [f, rounds] : std::vector<std::pair<double, int>>{{0.8, 1}, {0.9, 3}}) {
      const oracle::McDistillYield yield = oracle::mc_distill_yield(f, rounds, cfg);
      const bell::DistillPlan plan = bell::nested_distill(f, rounds);
      // Loose 3-sigma band: per-trial sd is below the mean for these sizes.
      const double band = 3.0 * plan.expected_raw_pairs / std::sqrt(static_cast<double>(trials));
      ok = ok && std::abs(yield.mean_raw_pairs - plan.expected_raw_pairs) <
                     std::max(band, 0.02 * plan.expected_raw_pairs);
      ok = ok && yield.fidelity == plan.fidelity;
    }
    check.expect(ok, "MC distillation yield matches the closed-form cost");
  }

  // Satellite link-budget invariants.
  {
    const sat::SatelliteParams satellite;
    const sat::StationParams station;
    const GeoPoint a{38.0, -97.0}, b{34.5, -92.0};
    const double fwd = sat::pair_rate(a, b, satellite, station);
    const double rev = sat::pair_rate(b, a, satellite, station);
    check.expect(fwd == rev, "pair rate is symmetric");

    sat::StationParams larger = station;
    larger.telescope_radius_m = 1.0;
    const double scaled = sat::pair_rate(a, b, satellite, larger);
    check.expect(std::abs(scaled / fwd - 16.0) < 1e-9, "rate scales as telescope radius^4");

    bool close = true;
    for (double z : {1e7, 2e7, 3.6e7}) {
      const double exact = sat::diffraction_eta(z, satellite, station, sat::DiffractionMode::exact);
      const double far =
          sat::diffraction_eta(z, satellite, station, sat::DiffractionMode::far_field);
      close = close && sat::far_field_valid(z, satellite) && std::abs(exact - far) / exact < 1e-3;
    }
    check.expect(close, "exact and far-field diffraction agree past 100 Rayleigh ranges");
  }

  // Fiber timing invariants.
  {
    const fiber::FiberParams fp;
    bool optimal = true, unimodal = true;
    for (double L : {30.0, 61.7, 100.0, 300.0, 600.0}) {
      const fiber::ChainResult best = fiber::optimal_repeater_count(L, fp, {}, 128);
      double prev = 0.0;
      bool rising = true;
      for (int n = 1; n <= 128; ++n) {
        const double rate = 1.0 / fiber::time_with_repeaters(L, n, fp);
        optimal = optimal && rate <= best.rate_hz + 1e-12;
        if (n <= best.n_photon_repeaters && best.n_photon_repeaters >= 1)
          rising = rising && rate >= prev - 1e-12;
        prev = rate;
      }
      optimal = optimal && 1.0 / fiber::time_direct(L, fp) <= best.rate_hz + 1e-12;
      unimodal = unimodal && rising;
    }
    check.expect(optimal, "optimal repeater count beats every candidate");
    check.expect(unimodal, "rate rises monotonically up to the optimum");

    fiber::FiberParams doubled = fp;
    doubled.multiplex = 2;
    const bool linear =
        fiber::time_with_repeaters(100.0, 4, doubled) * 2.0 ==
            fiber::time_with_repeaters(100.0, 4, fp) &&
        fiber::time_direct(50.0, doubled) * 2.0 == fiber::time_direct(50.0, fp);
    check.expect(linear, "multiplexing rescales times exactly linearly");
  }

  return report;
}

}  // namespace qnet::runner
