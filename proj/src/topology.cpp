#include "qnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace qnet::topo {

namespace {

constexpr double kMinEdgeKm = 1e-6;  // keeps coincident nodes at positive length

std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace

int GeoGraph::add_node(GeoPoint location, NodeKind kind) {
  validate_geo(location);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({id, location, kind, false});
  adjacency_.emplace_back();
  return id;
}

bool GeoGraph::add_link(int u, int v, double length_km) {
  if (u == v) throw ParamError("self loops are not allowed");
  if (u < 0 || v < 0 || u >= node_count() || v >= node_count())
    throw ParamError("link endpoint out of range");
  if (has_link(u, v)) return false;
  const double len = std::max(length_km, kMinEdgeKm);
  links_.push_back({std::min(u, v), std::max(u, v), len});
  adjacency_[u].emplace_back(v, len);
  adjacency_[v].emplace_back(u, len);
  return true;
}

bool GeoGraph::has_link(int u, int v) const {
  const auto& adj = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
  const int other = adjacency_[u].size() <= adjacency_[v].size() ? v : u;
  for (const auto& [w, len] : adj)
    if (w == other) return true;
  return false;
}

bool region_contains(const Region& region, const GeoPoint& p) {
  // Ray casting in (lon, lat) coordinates; adequate away from the poles
  // and the antimeridian.
  bool inside = false;
  const std::size_t n = region.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double yi = region[i].lat_deg, xi = region[i].lon_deg;
    const double yj = region[j].lat_deg, xj = region[j].lon_deg;
    if ((yi > p.lat_deg) != (yj > p.lat_deg)) {
      const double x_cross = xi + (p.lat_deg - yi) / (yj - yi) * (xj - xi);
      if (p.lon_deg < x_cross) inside = !inside;
    }
  }
  return inside;
}

Region us_region() {
  return {{48.9, -124.6}, {49.0, -95.2}, {47.5, -69.3}, {44.8, -67.0}, {41.5, -70.0},
          {35.3, -75.5},  {30.6, -81.3}, {25.2, -80.3}, {28.9, -83.0}, {29.5, -94.0},
          {26.0, -97.3},  {31.8, -106.4}, {32.5, -117.2}, {40.3, -124.4}};
}

std::vector<NodeRecord> load_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open node file: " + path);

  std::vector<NodeRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "id,lat,lon") throw ParseError("expected header 'id,lat,lon'", line_no);
      continue;
    }
    std::istringstream row(line);
    std::string id_s, lat_s, lon_s, extra;
    if (!std::getline(row, id_s, ',') || !std::getline(row, lat_s, ',') ||
        !std::getline(row, lon_s, ','))
      throw ParseError("malformed row: " + line, line_no);
    if (std::getline(row, extra, ',')) throw ParseError("too many fields: " + line, line_no);
    NodeRecord rec;
    try {
      rec.id = std::stoi(id_s);
      rec.location = {std::stod(lat_s), std::stod(lon_s)};
    } catch (const std::exception&) {
      throw ParseError("non-numeric field: " + line, line_no);
    }
    try {
      validate_geo(rec.location);
    } catch (const ParamError& e) {
      throw ParseError(e.what(), line_no);
    }
    rec.kind = NodeKind::endpoint;
    out.push_back(rec);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].id != static_cast<int>(i))
      throw ParseError("node ids must be dense from 0; got " + std::to_string(out[i].id),
                       i + 2);
  return out;
}

std::vector<NodeRecord> synth_nodes(std::uint64_t seed, int count, const Region& region,
                                    int cluster_count) {
  if (count < 1) throw ParamError("count must be >= 1");
  if (cluster_count < 1) throw ParamError("cluster_count must be >= 1");
  if (region.size() < 3) throw ParamError("region polygon needs at least 3 vertices");

  double lat_lo = 90.0, lat_hi = -90.0, lon_lo = 180.0, lon_hi = -180.0;
  for (const GeoPoint& v : region) {
    lat_lo = std::min(lat_lo, v.lat_deg);
    lat_hi = std::max(lat_hi, v.lat_deg);
    lon_lo = std::min(lon_lo, v.lon_deg);
    lon_hi = std::max(lon_hi, v.lon_deg);
  }
  if (!(lat_hi > lat_lo) || !(lon_hi > lon_lo)) throw ParamError("degenerate region");

  Rng rng(seed);
  const auto sample_in_region = [&](int max_tries) -> GeoPoint {
    for (int i = 0; i < max_tries; ++i) {
      GeoPoint p{lat_lo + rng.uniform01() * (lat_hi - lat_lo),
                 lon_lo + rng.uniform01() * (lon_hi - lon_lo)};
      if (region_contains(region, p)) return p;
    }
    throw ParamError("region appears to have near-zero area");
  };

  struct Cluster {
    GeoPoint center;
    double sigma_lat;
    double sigma_lon;
    double weight;
  };
  std::vector<Cluster> clusters;
  double total_weight = 0.0;
  for (int c = 0; c < cluster_count; ++c) {
    Cluster cl;
    cl.center = sample_in_region(4096);
    // Spread between roughly 40 and 250 km, heavier weights on tighter
    // clusters to mimic metropolitan density.
    const double sigma_km = 40.0 + 210.0 * rng.uniform01();
    cl.sigma_lat = sigma_km / 111.0;
    cl.sigma_lon = sigma_km / (111.0 * std::cos(deg2rad(cl.center.lat_deg)));
    cl.weight = 1.0 / sigma_km;
    total_weight += cl.weight;
    clusters.push_back(cl);
  }

  std::vector<NodeRecord> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    GeoPoint p;
    if (rng.uniform01() < 0.30) {
      p = sample_in_region(4096);
    } else {
      double pick = rng.uniform01() * total_weight;
      std::size_t ci = 0;
      while (ci + 1 < clusters.size() && pick > clusters[ci].weight) {
        pick -= clusters[ci].weight;
        ++ci;
      }
      const Cluster& cl = clusters[ci];
      p = {cl.center.lat_deg + rng.normal() * cl.sigma_lat,
           cl.center.lon_deg + rng.normal() * cl.sigma_lon};
      if (!region_contains(region, p)) continue;
    }
    out.push_back({static_cast<int>(out.size()), p, NodeKind::endpoint, false});
  }
  return out;
}

namespace {

// Uniform lat/lon cell index over the node bounding box, searched in
// expanding rings. Correctness does not depend on the cell size; it is
// validated against brute force in the tests.
class CellIndex {
 public:
  CellIndex(const std::vector<NodeRecord>& nodes, double target_per_cell = 4.0) : nodes_(nodes) {
    lat_lo_ = 90.0;
    lat_hi_ = -90.0;
    lon_lo_ = 180.0;
    lon_hi_ = -180.0;
    for (const NodeRecord& n : nodes) {
      lat_lo_ = std::min(lat_lo_, n.location.lat_deg);
      lat_hi_ = std::max(lat_hi_, n.location.lat_deg);
      lon_lo_ = std::min(lon_lo_, n.location.lon_deg);
      lon_hi_ = std::max(lon_hi_, n.location.lon_deg);
    }
    const double span_lat = std::max(lat_hi_ - lat_lo_, 1e-9);
    const double span_lon = std::max(lon_hi_ - lon_lo_, 1e-9);
    const double cells = std::max(1.0, static_cast<double>(nodes.size()) / target_per_cell);
    const double aspect = span_lon / span_lat;
    rows_ = std::max(1, static_cast<int>(std::sqrt(cells / aspect)));
    cols_ = std::max(1, static_cast<int>(cells / rows_));
    grid_.assign(static_cast<std::size_t>(rows_) * cols_, {});
    for (const NodeRecord& n : nodes) grid_[cell_of(n.location)].push_back(n.id);
    // Conservative km size of one cell step, used for ring pruning.
    step_km_ = std::min(span_lat / rows_ * 111.0,
                        span_lon / cols_ * 111.0 * std::cos(deg2rad(std::max(std::abs(lat_lo_),
                                                                             std::abs(lat_hi_)))));
    step_km_ = std::max(step_km_, 1e-6);
  }

  /// k nearest nodes to `query` excluding `exclude_id`; ties by lower id.
  std::vector<std::pair<double, int>> nearest(const GeoPoint& query, int k,
                                              int exclude_id = -1) const {
    std::vector<std::pair<double, int>> best;  // max-heap by (dist, id)
    const auto consider = [&](int id) {
      if (id == exclude_id) return;
      const double d = haversine_km(query, nodes_[id].location);
      best.emplace_back(d, id);
      std::push_heap(best.begin(), best.end());
      if (static_cast<int>(best.size()) > k) {
        std::pop_heap(best.begin(), best.end());
        best.pop_back();
      }
    };

    const int qr = row_of(query.lat_deg), qc = col_of(query.lon_deg);
    const int max_ring = std::max(rows_, cols_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      if (static_cast<int>(best.size()) == k) {
        // All cells beyond this ring are at least (ring-1) steps away.
        const double lower_bound_km = (ring - 1) * step_km_;
        if (lower_bound_km > best.front().first) break;
      }
      bool any = false;
      for (int r = qr - ring; r <= qr + ring; ++r) {
        if (r < 0 || r >= rows_) continue;
        for (int c = qc - ring; c <= qc + ring; ++c) {
          if (c < 0 || c >= cols_) continue;
          if (std::max(std::abs(r - qr), std::abs(c - qc)) != ring) continue;
          any = true;
          for (int id : grid_[static_cast<std::size_t>(r) * cols_ + c]) consider(id);
        }
      }
      if (!any && ring > std::max(rows_, cols_)) break;
    }
    std::sort(best.begin(), best.end());
    return best;
  }

 private:
  int row_of(double lat) const {
    const int r = static_cast<int>((lat - lat_lo_) / std::max(lat_hi_ - lat_lo_, 1e-9) * rows_);
    return std::clamp(r, 0, rows_ - 1);
  }
  int col_of(double lon) const {
    const int c = static_cast<int>((lon - lon_lo_) / std::max(lon_hi_ - lon_lo_, 1e-9) * cols_);
    return std::clamp(c, 0, cols_ - 1);
  }
  std::size_t cell_of(const GeoPoint& p) const {
    return static_cast<std::size_t>(row_of(p.lat_deg)) * cols_ + col_of(p.lon_deg);
  }

  const std::vector<NodeRecord>& nodes_;
  std::vector<std::vector<int>> grid_;
  double lat_lo_, lat_hi_, lon_lo_, lon_hi_;
  double step_km_;
  int rows_, cols_;
};

}  // namespace

GeoGraph build_knn_graph(std::vector<NodeRecord> nodes, int k) {
  if (k < 1) throw ParamError("k must be >= 1");
  if (static_cast<int>(nodes.size()) < k + 1)
    throw ParamError("need at least k+1 nodes for a k-NN graph");

  GeoGraph graph;
  for (const NodeRecord& n : nodes) graph.add_node(n.location, n.kind);

  const CellIndex index(graph.nodes());
  for (int v = 0; v < graph.node_count(); ++v) {
    const auto near = index.nearest(graph.location(v), k, v);
    for (const auto& [d, u] : near) graph.add_link(v, u, d);
  }
  return graph;
}

namespace {

std::vector<int> component_labels(const GeoGraph& graph, int* component_count) {
  std::vector<int> label(graph.node_count(), -1);
  int comp = 0;
  std::vector<int> stack;
  for (int s = 0; s < graph.node_count(); ++s) {
    if (label[s] != -1) continue;
    stack.push_back(s);
    label[s] = comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [u, len] : graph.neighbors(v))
        if (label[u] == -1) {
          label[u] = comp;
          stack.push_back(u);
        }
    }
    ++comp;
  }
  *component_count = comp;
  return label;
}

}  // namespace

std::vector<Link> connect_components(GeoGraph& graph) {
  std::vector<Link> added;
  for (;;) {
    int comp_count = 0;
    std::vector<int> label = component_labels(graph, &comp_count);
    if (comp_count <= 1) break;

    // Size per component; scanning nodes outside the largest component
    // against everything covers every cross-component pair.
    std::vector<int> size(comp_count, 0);
    for (int l : label) ++size[l];
    const int giant =
        static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());

    double best_d = std::numeric_limits<double>::infinity();
    int best_u = -1, best_v = -1;
    for (int u = 0; u < graph.node_count(); ++u) {
      if (label[u] == giant) continue;
      for (int v = 0; v < graph.node_count(); ++v) {
        if (label[v] == label[u]) continue;
        const double d = haversine_km(graph.location(u), graph.location(v));
        if (d < best_d || (d == best_d && std::minmax(u, v) < std::minmax(best_u, best_v))) {
          best_d = d;
          best_u = u;
          best_v = v;
        }
      }
    }
    graph.add_link(best_u, best_v, best_d);
    added.push_back({std::min(best_u, best_v), std::max(best_u, best_v), best_d});
  }
  return added;
}

int insert_intermediate_repeaters(GeoGraph& graph, double threshold_km, double max_segment_km) {
  if (!(threshold_km > 0.0)) throw ParamError("threshold_km must be positive");
  if (!(max_segment_km > 0.0)) throw ParamError("max_segment_km must be positive");

  const std::vector<Link> original = graph.links();
  GeoGraph rebuilt;
  for (const NodeRecord& n : graph.nodes()) {
    const int id = rebuilt.add_node(n.location, n.kind);
    rebuilt.mutable_nodes()[id].station = n.station;
  }

  int inserted = 0;
  for (const Link& link : original) {
    if (link.length_km <= threshold_km) {
      rebuilt.add_link(link.u, link.v, link.length_km);
      continue;
    }
    const int segments = static_cast<int>(std::ceil(link.length_km / max_segment_km));
    const GeoPoint a = graph.location(link.u);
    const GeoPoint b = graph.location(link.v);
    int prev = link.u;
    for (int s = 1; s < segments; ++s) {
      const GeoPoint mid = slerp(a, b, static_cast<double>(s) / segments);
      const int id = rebuilt.add_node(mid, NodeKind::inserted_repeater);
      rebuilt.add_link(prev, id, link.length_km / segments);
      prev = id;
      ++inserted;
    }
    rebuilt.add_link(prev, link.v, link.length_km / segments);
  }
  graph = std::move(rebuilt);
  return inserted;
}

StationGrid place_station_grid(const GeoGraph& graph, double spacing_km, const GeoPoint& anchor) {
  if (!(spacing_km > 0.0)) throw ParamError("spacing_km must be positive");
  validate_geo(anchor);

  // Equirectangular km projection about the anchor.
  const double coslat = std::cos(deg2rad(anchor.lat_deg));
  const auto project = [&](const GeoPoint& p) -> std::pair<double, double> {
    return {kEarthRadiusKm * deg2rad(p.lon_deg - anchor.lon_deg) * coslat,
            kEarthRadiusKm * deg2rad(p.lat_deg - anchor.lat_deg)};
  };
  const auto unproject = [&](double x_km, double y_km) -> GeoPoint {
    return {anchor.lat_deg + rad2deg(y_km / kEarthRadiusKm),
            anchor.lon_deg + rad2deg(x_km / (kEarthRadiusKm * coslat))};
  };

  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  for (const NodeRecord& n : graph.nodes()) {
    const auto [x, y] = project(n.location);
    if (first) {
      x_lo = x_hi = x;
      y_lo = y_hi = y;
      first = false;
    } else {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }

  const CellIndex index(graph.nodes());
  const double snap_limit = spacing_km / std::sqrt(2.0);
  std::vector<int> ids;
  std::unordered_set<int> seen;
  const long i_lo = static_cast<long>(std::floor(x_lo / spacing_km));
  const long i_hi = static_cast<long>(std::ceil(x_hi / spacing_km));
  const long j_lo = static_cast<long>(std::floor(y_lo / spacing_km));
  const long j_hi = static_cast<long>(std::ceil(y_hi / spacing_km));
  for (long j = j_lo; j <= j_hi; ++j) {
    for (long i = i_lo; i <= i_hi; ++i) {
      const GeoPoint cross = unproject(i * spacing_km, j * spacing_km);
      if (!(cross.lat_deg >= -90.0 && cross.lat_deg <= 90.0)) continue;
      const auto near = index.nearest(cross, 1);
      if (near.empty() || near[0].first > snap_limit) continue;
      if (seen.insert(near[0].second).second) ids.push_back(near[0].second);
    }
  }
  std::sort(ids.begin(), ids.end());
  return {spacing_km, anchor, ids};
}

StationGrid all_station_grid(const GeoGraph& graph) {
  StationGrid grid;
  grid.spacing_km = 0.0;
  grid.station_ids.resize(graph.node_count());
  for (int v = 0; v < graph.node_count(); ++v) grid.station_ids[v] = v;
  return grid;
}

void apply_station_flags(GeoGraph& graph, const StationGrid& grid) {
  for (NodeRecord& n : graph.mutable_nodes()) n.station = false;
  for (int id : grid.station_ids) {
    if (id < 0 || id >= graph.node_count()) throw ParamError("station id out of range");
    graph.mutable_nodes()[id].station = true;
  }
}

namespace {

// Lexicographic comparison of the settled path to `u` plus v against
// the current path to `v`. Paths are reconstructed over parents, which
// are final for settled vertices; ties are rare so this stays cheap.
std::vector<int> reconstruct(const std::vector<int>& parent, int v) {
  std::vector<int> seq;
  for (int x = v; x != -1; x = parent[x]) seq.push_back(x);
  std::reverse(seq.begin(), seq.end());
  return seq;
}

bool path_less(const std::vector<int>& parent, int via_u, int v, int current_pred) {
  std::vector<int> cand = reconstruct(parent, via_u);
  cand.push_back(v);
  std::vector<int> cur = reconstruct(parent, current_pred);
  cur.push_back(v);
  return cand < cur;
}

}  // namespace

PathResult shortest_path(const GeoGraph& graph, int a, int b) {
  if (a == b) throw ParamError("endpoints must differ");
  if (a < 0 || b < 0 || a >= graph.node_count() || b >= graph.node_count())
    throw ParamError("node id out of range");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.node_count(), inf);
  std::vector<int> parent(graph.node_count(), -1);
  std::vector<bool> settled(graph.node_count(), false);

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[a] = 0.0;
  heap.emplace(0.0, a);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = true;
    if (v == b) break;
    for (const auto& [u, len] : graph.neighbors(v)) {
      const double nd = d + len;
      if (nd < dist[u]) {
        dist[u] = nd;
        parent[u] = v;
        heap.emplace(nd, u);
      } else if (nd == dist[u] && !settled[u] && parent[u] != v &&
                 path_less(parent, v, u, parent[u])) {
        parent[u] = v;
        heap.emplace(nd, u);
      }
    }
  }
  if (!settled[b]) throw InternalError("no path between requested nodes");

  PathResult out;
  out.nodes = reconstruct(parent, b);
  out.length_km = dist[b];
  return out;
}

StationField station_field(const GeoGraph& graph, const StationGrid& grid) {
  if (grid.station_ids.empty()) throw ParamError("station grid is empty");

  const double inf = std::numeric_limits<double>::infinity();
  StationField field;
  field.owner.assign(graph.node_count(), -1);
  field.dist_km.assign(graph.node_count(), inf);
  field.parent.assign(graph.node_count(), -1);

  // (distance, owner, node): equal distances pop the lower station id
  // first, which then claims the node.
  using Entry = std::tuple<double, int, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<int> sorted = grid.station_ids;
  std::sort(sorted.begin(), sorted.end());
  for (int s : sorted) heap.emplace(0.0, s, s);

  std::vector<bool> settled(graph.node_count(), false);
  while (!heap.empty()) {
    const auto [d, owner, v] = heap.top();
    heap.pop();
    if (settled[v]) continue;
    settled[v] = true;
    field.owner[v] = owner;
    field.dist_km[v] = d;
    for (const auto& [u, len] : graph.neighbors(v)) {
      if (settled[u]) continue;
      const double nd = d + len;
      if (nd < field.dist_km[u] ||
          (nd == field.dist_km[u] && owner < field.owner[u])) {
        field.dist_km[u] = nd;
        field.owner[u] = owner;
        field.parent[u] = v;
        heap.emplace(nd, owner, u);
      }
    }
  }
  return field;
}

PathResult field_path(const StationField& field, int node) {
  PathResult out;
  out.length_km = field.dist_km[node];
  for (int x = node; x != -1; x = field.parent[x]) out.nodes.push_back(x);
  return out;
}

NearestStation nearest_station(const GeoGraph& graph, const StationGrid& grid, int node) {
  if (grid.station_ids.empty()) throw ParamError("station grid is empty");
  const StationField field = station_field(graph, grid);
  if (field.owner[node] == -1) throw InternalError("node cannot reach any station");
  return {field.owner[node], field_path(field, node)};
}

void save_graph_json(const GeoGraph& graph, const GraphMeta& meta,
                     const std::optional<StationGrid>& grid, const std::string& path) {
  nlohmann::json doc;
  doc["version"] = 1;
  nlohmann::json nodes = nlohmann::json::array();
  for (const NodeRecord& n : graph.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"lat", n.location.lat_deg},
                     {"lon", n.location.lon_deg},
                     {"kind", n.kind == NodeKind::endpoint ? "endpoint" : "inserted_repeater"},
                     {"station", n.station}});
  }
  doc["nodes"] = std::move(nodes);
  nlohmann::json links = nlohmann::json::array();
  for (const Link& l : graph.links())
    links.push_back({{"u", l.u}, {"v", l.v}, {"length_km", l.length_km}});
  doc["links"] = std::move(links);
  doc["meta"] = {{"seed", meta.seed}, {"k", meta.k}, {"threshold_km", meta.threshold_km}};
  if (grid) {
    doc["meta"]["grid"] = {{"spacing_km", grid->spacing_km},
                           {"anchor", {{"lat", grid->anchor.lat_deg}, {"lon", grid->anchor.lon_deg}}},
                           {"station_ids", grid->station_ids}};
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file: " + path);
  out << doc.dump(1) << "\n";
}

LoadedGraph load_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid graph JSON: ") + e.what(), 0);
  }
  if (doc.value("version", 0) != 1) throw ParseError("unsupported graph version", 0);

  LoadedGraph out;
  for (const auto& n : doc.at("nodes")) {
    const std::string kind = n.at("kind").get<std::string>();
    const int id = out.graph.add_node({n.at("lat").get<double>(), n.at("lon").get<double>()},
                                      kind == "endpoint" ? NodeKind::endpoint
                                                         : NodeKind::inserted_repeater);
    if (id != n.at("id").get<int>()) throw ParseError("node ids must be dense from 0", 0);
    out.graph.mutable_nodes()[id].station = n.value("station", false);
  }
  for (const auto& l : doc.at("links"))
    out.graph.add_link(l.at("u").get<int>(), l.at("v").get<int>(), l.at("length_km").get<double>());

  const auto& meta = doc.at("meta");
  out.meta.seed = meta.value("seed", std::uint64_t{0});
  out.meta.k = meta.value("k", 0);
  out.meta.threshold_km = meta.value("threshold_km", 0.0);
  if (meta.contains("grid")) {
    StationGrid grid;
    grid.spacing_km = meta["grid"].at("spacing_km").get<double>();
    grid.anchor = {meta["grid"].at("anchor").at("lat").get<double>(),
                   meta["grid"].at("anchor").at("lon").get<double>()};
    grid.station_ids = meta["grid"].at("station_ids").get<std::vector<int>>();
    out.grid = std::move(grid);
  }
  return out;
}

}  // namespace qnet::topo
