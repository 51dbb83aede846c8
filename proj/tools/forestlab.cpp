#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

#include "forestlab/experiments.hpp"

using forestlab::ExperimentConfig;
using nlohmann::json;

namespace {

// Flag values land in a JSON overlay keyed like the config file, so a flag
// overrides the file field of the same name.
struct FlagSet {
  std::vector<std::function<void(json&)>> apply;

  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    apply.push_back([opt, value, key](json& j) {
      if (opt->count() > 0) j[key] = *value;
    });
  }
};

void add_common(CLI::App* app, FlagSet& flags) {
  flags.add<std::uint64_t>(app, "--seed", "seed", "RNG seed");
  flags.add<unsigned>(app, "--threads", "threads", "worker threads");
  flags.add<std::uint64_t>(app, "--budget-vertices", "budget_vertices", "vertex budget per box");
  flags.add<std::string>(app, "--out", "out", "output directory");
  flags.add<std::uint64_t>(app, "--replicas", "replicas", "replicas or samples");
  flags.add<double>(app, "--confidence", "confidence", "confidence level of reported intervals");
}

void add_box(CLI::App* app, FlagSet& flags) {
  flags.add<int>(app, "--d", "d", "lattice dimension");
  flags.add<int>(app, "--radius", "radius", "box radius");
  flags.add<double>(app, "--drop-fraction", "drop_fraction", "far fraction of the ray left unreported");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forestlab: spanning forest experiments"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its fields");

  FlagSet flags;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", config_path, "JSON config file; flags override its fields");
    add_common(s, flags);
    return s;
  };

  CLI::App* sample = sub("sample", "wired spanning forests of a box, dumped as text");
  add_box(sample, flags);

  CLI::App* resistance = sub("resistance", "wired effective resistance over radii, or on a graph file");
  add_box(resistance, flags);
  flags.add<std::vector<int>>(resistance, "--radii", "radii", "box radii");
  flags.add<std::vector<int>>(resistance, "--x", "x", "first lattice point");
  flags.add<std::vector<int>>(resistance, "--y", "y", "second lattice point");
  flags.add<std::string>(resistance, "--graph", "graph", "edge-list file");
  flags.add<std::uint32_t>(resistance, "--source", "source", "source vertex in the graph file");
  flags.add<std::uint32_t>(resistance, "--target", "target", "target vertex in the graph file");

  CLI::App* resample = sub("resample-test", "direct vs resampled forest law on a ball");
  add_box(resample, flags);
  flags.add<int>(resample, "--ball", "ball", "ball radius");
  flags.add<std::uint64_t>(resample, "--bootstrap", "bootstrap", "bootstrap resamples");
  flags.add<double>(resample, "--significance", "significance", "chi-square significance");

  CLI::App* cuttime = sub("cuttime", "cut times T_n and loop-erasure counts L_n on Z^d");
  flags.add<int>(cuttime, "--d", "d", "lattice dimension");
  flags.add<std::uint64_t>(cuttime, "--horizon", "horizon", "steps per walk direction");
  flags.add<std::uint64_t>(cuttime, "--truncation", "truncation", "z-value truncation");
  flags.add<std::vector<unsigned>>(cuttime, "--levels", "levels", "levels n");
  flags.add<double>(cuttime, "--censor-threshold", "censor_threshold", "censoring warning level");

  CLI::App* njl = sub("njl", "bush-joining tail sums over an (n, m) grid");
  add_box(njl, flags);
  flags.add<std::vector<unsigned>>(njl, "--n-values", "n_values", "grid n values");
  flags.add<std::vector<unsigned>>(njl, "--m-values", "m_values", "grid m values");

  CLI::App* growth = sub("growth", "resistance along the ray against the cut-set bound");
  add_box(growth, flags);
  flags.add<unsigned>(growth, "--n-max", "n_max", "largest ray index");

  CLI::App* recurrence = sub("recurrence", "resistance to the box boundary over radii");
  add_box(recurrence, flags);
  flags.add<std::vector<int>>(recurrence, "--radii", "radii", "box radii");
  flags.add<std::vector<int>>(recurrence, "--x", "x", "tracked lattice point");

  CLI::App* counterexample = sub("counterexample", "bridge frequency between two wired Z^5 boxes");
  flags.add<int>(counterexample, "--radius", "radius", "box radius");
  flags.add<std::vector<int>>(counterexample, "--radii", "radii", "box radii");

  CLI::App* kac = sub("kac", "return times of a small chain against 1/P[E]");
  flags.add<std::string>(kac, "--chain", "chain", "two-state or three-cycle");
  flags.add<std::vector<std::size_t>>(kac, "--event", "event", "event states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw forestlab::ConfigError("/", "cannot open config file " + config_path);
      json file;
      try {
        in >> file;
      } catch (const json::exception& e) {
        throw forestlab::ConfigError("/", e.what());
      }
      forestlab::apply_json(file, config);
    }
    json overlay = json::object();
    overlay["experiment"] = app.get_subcommands().front()->get_name();
    for (const auto& f : flags.apply) f(overlay);
    forestlab::apply_json(overlay, config);
  } catch (const forestlab::ConfigError& e) {
    std::cerr << "invalid config at " << e.what() << '\n';
    return 2;
  }
  const int code = forestlab::run(config, std::cerr);
  if (code == 0) std::cout << "wrote " << config.out << '\n';
  return code;
}
