// Command-line experiment runner for the hybrid satellite-fiber
// entanglement distribution model: named experiments, parameter sweeps,
// the self-validation battery, and network construction/inspection.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnet/experiments.hpp"
#include "qnet/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "inf")
      values.push_back(std::numeric_limits<double>::infinity());
    else
      values.push_back(std::stod(item));
  }
  return values;
}

void print_summary(const qnet::runner::RunSummary& summary) {
  for (const std::string& f : summary.files_written) std::cout << "wrote " << f << "\n";
  std::cout << summary.summary.dump(1) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid satellite-fiber quantum network simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, param, values_csv, graph_out, graph_in;
  long long trials = 100000;
  std::uint64_t seed = 1;

  CLI::App* cmd_run = app.add_subcommand("run", "run a named experiment from a config file");
  cmd_run->add_option("--config", config_path, "experiment config (JSON)")->required();
  cmd_run->add_option("--out", out_dir, "output directory override");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run one experiment per parameter value");
  cmd_sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
  cmd_sweep->add_option("--param", param, "physics field, e.g. satellite.altitude_m")->required();
  cmd_sweep->add_option("--values", values_csv, "comma-separated values (inf allowed)")
      ->required();
  cmd_sweep->add_option("--out", out_dir, "output directory override");

  CLI::App* cmd_validate = app.add_subcommand("validate", "oracle suite and invariant battery");
  cmd_validate->add_option("--trials", trials, "Monte Carlo trials per check");
  cmd_validate->add_option("--seed", seed, "root RNG seed");

  CLI::App* cmd_graph = app.add_subcommand("graph", "build or inspect network files");
  CLI::App* cmd_build = cmd_graph->add_subcommand("build", "synthesize and persist a network");
  cmd_build->add_option("file", graph_out, "output graph JSON path")->required();
  cmd_build->add_option("--config", config_path, "experiment config providing the graph spec");
  CLI::App* cmd_info = cmd_graph->add_subcommand("info", "print summary stats of a graph file");
  cmd_info->add_option("file", graph_in, "graph JSON path")->required();
  cmd_graph->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_run->parsed()) {
      qnet::runner::ExperimentConfig cfg = qnet::runner::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      print_summary(qnet::runner::run(cfg));
      return kExitOk;
    }

    if (cmd_sweep->parsed()) {
      qnet::runner::ExperimentConfig cfg = qnet::runner::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      print_summary(qnet::runner::sweep(cfg, param, parse_values(values_csv)));
      return kExitOk;
    }

    if (cmd_validate->parsed()) {
      const qnet::runner::ValidationReport report = qnet::runner::validate(trials, seed);
      for (const std::string& line : report.lines) std::cout << line << "\n";
      std::cout << (report.ok ? "validation passed" : "validation FAILED") << "\n";
      return report.ok ? kExitOk : kExitValidation;
    }

    if (cmd_build->parsed()) {
      qnet::runner::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = qnet::runner::load_config(config_path);
      qnet::topo::LoadedGraph net = qnet::runner::build_network(cfg);
      std::optional<qnet::topo::StationGrid> grid;
      if (!cfg.grid_spacings_km.empty() && cfg.grid_spacings_km.front() > 0.0) {
        grid = qnet::topo::place_station_grid(net.graph, cfg.grid_spacings_km.front(),
                                              cfg.grid_anchor);
        qnet::topo::apply_station_flags(net.graph, *grid);
      }
      qnet::topo::save_graph_json(net.graph, net.meta, grid, graph_out);
      std::cout << "wrote " << graph_out << " (" << net.graph.node_count() << " nodes, "
                << net.graph.links().size() << " links)\n";
      return kExitOk;
    }

    if (cmd_info->parsed()) {
      const qnet::topo::LoadedGraph net = qnet::topo::load_graph_json(graph_in);
      int endpoints = 0, inserted = 0, stations = 0;
      for (const auto& n : net.graph.nodes()) {
        (n.kind == qnet::topo::NodeKind::endpoint ? endpoints : inserted) += 1;
        stations += n.station ? 1 : 0;
      }
      double total_km = 0.0, longest = 0.0;
      for (const auto& l : net.graph.links()) {
        total_km += l.length_km;
        longest = std::max(longest, l.length_km);
      }
      std::cout << "nodes: " << net.graph.node_count() << " (" << endpoints << " endpoints, "
                << inserted << " inserted repeaters, " << stations << " stations)\n"
                << "links: " << net.graph.links().size() << ", total " << total_km
                << " km, longest " << longest << " km\n"
                << "meta: seed=" << net.meta.seed << " k=" << net.meta.k
                << " threshold_km=" << net.meta.threshold_km << "\n";
      if (net.grid)
        std::cout << "grid: spacing_km=" << net.grid->spacing_km << " stations="
                  << net.grid->station_ids.size() << "\n";
      return kExitOk;
    }
  } catch (const qnet::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const qnet::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const qnet::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qnet::ParamError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
