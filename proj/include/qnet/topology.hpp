#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnet/common.hpp"

namespace qnet::topo {

enum class NodeKind { endpoint, inserted_repeater };

struct NodeRecord {
  int id = 0;
  GeoPoint location;
  NodeKind kind = NodeKind::endpoint;
  bool station = false;
};

struct Link {
  int u = 0;
  int v = 0;
  double length_km = 0.0;
};

/// Undirected geographic fiber graph. Nodes keep dense ids from 0; no
/// self loops or duplicate edges.
class GeoGraph {
 public:
  int add_node(GeoPoint location, NodeKind kind);
  /// Adds the edge if absent; returns false on duplicates. Lengths are
  /// floored at 1e-6 km so coincident nodes keep positive edge length.
  bool add_link(int u, int v, double length_km);

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<std::pair<int, double>>& neighbors(int v) const { return adjacency_[v]; }
  std::vector<NodeRecord>& mutable_nodes() { return nodes_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const GeoPoint& location(int v) const { return nodes_[v].location; }
  bool has_link(int u, int v) const;

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

struct StationGrid {
  double spacing_km = 0.0;  // 0 means every node hosts a station
  GeoPoint anchor;
  std::vector<int> station_ids;
};

/// Closed polygon region given by its vertices (at least 3).
using Region = std::vector<GeoPoint>;

bool region_contains(const Region& region, const GeoPoint& p);

/// Rough outline of the contiguous United States, the default synthesis
/// region.
Region us_region();

/// CSV ingestion: header `id,lat,lon`, decimal degrees.
std::vector<NodeRecord> load_nodes(const std::string& path);

/// Clustered synthetic point cloud (mixture of 2-D Gaussians plus a
/// uniform background) inside `region`; deterministic in the seed.
std::vector<NodeRecord> synth_nodes(std::uint64_t seed, int count, const Region& region,
                                    int cluster_count);

/// Union of each node's k nearest neighbors by great-circle distance.
GeoGraph build_knn_graph(std::vector<NodeRecord> nodes, int k);

/// Greedily joins connected components with the globally shortest
/// inter-component edge until one component remains; returns the added
/// links (components - 1 of them).
std::vector<Link> connect_components(GeoGraph& graph);

/// Splits every link longer than threshold_km into segments of at most
/// max_segment_km by inserting evenly spaced repeater nodes along the
/// great circle. Returns the number of inserted nodes.
int insert_intermediate_repeaters(GeoGraph& graph, double threshold_km,
                                  double max_segment_km = 50.0);

/// Snaps the intersections of a square grid (equirectangular projection
/// about `anchor`) to their nearest nodes; intersections farther than
/// spacing/sqrt(2) from any node are dropped.
StationGrid place_station_grid(const GeoGraph& graph, double spacing_km, const GeoPoint& anchor);

/// Grid with spacing 0: every node is a station.
StationGrid all_station_grid(const GeoGraph& graph);

/// Sets the node station flags to match the grid.
void apply_station_flags(GeoGraph& graph, const StationGrid& grid);

struct PathResult {
  std::vector<int> nodes;
  double length_km = 0.0;
};

/// Dijkstra with deterministic lexicographic tie-breaking on the node
/// sequence for equal-length paths.
PathResult shortest_path(const GeoGraph& graph, int a, int b);

struct NearestStation {
  int station_id = -1;
  PathResult path;
};

/// Station with the minimum shortest-path fiber distance from `node`;
/// exact distance ties go to the lower station id.
NearestStation nearest_station(const GeoGraph& graph, const StationGrid& grid, int node);

/// Batch form of nearest_station: one multi-source relaxation gives the
/// owning station, distance, and tree parent for every node.
struct StationField {
  std::vector<int> owner;      // station id per node, -1 if unreachable
  std::vector<double> dist_km;
  std::vector<int> parent;     // next hop toward the owning station
};

StationField station_field(const GeoGraph& graph, const StationGrid& grid);

/// Path from `node` to its owning station along the field's tree.
PathResult field_path(const StationField& field, int node);

struct GraphMeta {
  std::uint64_t seed = 0;
  int k = 0;
  double threshold_km = 0.0;
};

struct LoadedGraph {
  GeoGraph graph;
  GraphMeta meta;
  std::optional<StationGrid> grid;
};

void save_graph_json(const GeoGraph& graph, const GraphMeta& meta,
                     const std::optional<StationGrid>& grid, const std::string& path);
LoadedGraph load_graph_json(const std::string& path);

}  // namespace qnet::topo
