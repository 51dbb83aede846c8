#include "forestlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "forestlab/forest_analysis.hpp"
#include "forestlab/lattice.hpp"
#include "forestlab/parallel.hpp"
#include "forestlab/resample.hpp"
#include "forestlab/resistance.hpp"
#include "forestlab/stats.hpp"
#include "forestlab/walk.hpp"
#include "forestlab/wilson.hpp"

namespace forestlab {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::string_view kVersion = "0.1.0";

constexpr std::array<std::pair<Experiment, std::string_view>, 9> kNames{{
    {Experiment::Sample, "sample"},
    {Experiment::Resistance, "resistance"},
    {Experiment::ResampleTest, "resample-test"},
    {Experiment::CutTime, "cuttime"},
    {Experiment::Njl, "njl"},
    {Experiment::Growth, "growth"},
    {Experiment::Recurrence, "recurrence"},
    {Experiment::Counterexample, "counterexample"},
    {Experiment::Kac, "kac"},
}};

template <class T>
void read_field(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("/") + key, e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

Limits limits_of(const ExperimentConfig& c) { return {c.budget_vertices}; }

std::vector<int> point_or(const std::vector<int>& p, int dimension, int unit_axis) {
  if (!p.empty()) return p;
  std::vector<int> out(dimension, 0);
  if (unit_axis >= 0) out[unit_axis] = 1;
  return out;
}

std::vector<int> radii_or(const ExperimentConfig& c) {
  if (!c.radii.empty()) return c.radii;
  if (c.experiment == Experiment::Counterexample) return {c.radius};
  std::vector<int> out;
  for (int r = 1; r <= c.radius; ++r) out.push_back(r);
  return out;
}

// Replica i of every experiment draws from root.substream(i).
RngStream root_stream(const ExperimentConfig& c) {
  return RngStream(c.seed, static_cast<std::uint64_t>(c.experiment) + 1);
}

struct Output {
  fs::path dir;
  RunSummary summary;

  void write(const std::string& name, std::string_view content) {
    write_atomic(dir / name, content);
    summary.artifacts.push_back(dir / name);
  }
};

void run_sample(const ExperimentConfig& c, Output& out) {
  const LatticeBoxSpec spec{c.dimension, c.radius, Boundary::Wired};
  const LatticeBox box(spec, limits_of(c));
  const RngStream root = root_stream(c);
  struct Chunk {
    std::string dumps;
    std::string rows;
  };
  const auto chunks = parallel_chunks<Chunk>(c.replicas, c.threads, [&](auto begin, auto end) {
    Chunk chunk;
    std::ostringstream dumps, rows;
    for (auto i = begin; i < end; ++i) {
      RngStream s = root.substream(i);
      const SpanningForest forest = wsf_wired_box(box, s);
      write_forest(dumps, forest);
      const RayDecomposition dec = ray_decompose(forest, box.origin(), c.drop_fraction);
      rows << i << ',' << forest.components.component_count << ',' << forest.edge_count() << ','
           << dec.tree.size() << ',' << path_length(dec.ray) << ',' << dec.reported << '\n';
    }
    chunk.dumps = dumps.str();
    chunk.rows = rows.str();
    return chunk;
  });
  std::string dumps, csv = "replica,components,edges,origin_tree_size,origin_ray_length,reported_ray_indices\n";
  for (const auto& ch : chunks) {
    dumps += ch.dumps;
    csv += ch.rows;
  }
  out.write("forests.txt", dumps);
  out.write("sample.csv", csv);
  out.summary.censoring["ray_drop_fraction"] = c.drop_fraction;
}

void run_resistance(const ExperimentConfig& c, Output& out) {
  std::string csv;
  if (!c.graph.empty()) {
    std::ifstream in(c.graph);
    if (!in) throw ConfigError("/graph", "cannot open " + c.graph);
    const Graph g = read_edge_list(in);
    if (c.source >= g.vertex_count()) throw ConfigError("/source", "vertex out of range");
    if (c.target >= g.vertex_count()) throw ConfigError("/target", "vertex out of range");
    if (c.source == c.target) throw ConfigError("/target", "must differ from source");
    const double r = effective_resistance(g, c.source, c.target);
    csv = "source,target,resistance\n" + std::to_string(c.source) + ',' +
          std::to_string(c.target) + ',' + fmt(r) + '\n';
    out.summary.headline["resistance"] = r;
  } else {
    const auto radii = radii_or(c);
    for (const int r : radii) lattice_box_size(c.dimension, r, limits_of(c));
    const auto x = point_or(c.x, c.dimension, -1);
    const auto y = point_or(c.y, c.dimension, 0);
    const auto values = wired_effective_resistance(c.dimension, radii, x, y);
    csv = "radius,resistance\n";
    for (std::size_t i = 0; i < radii.size(); ++i) csv += std::to_string(radii[i]) + ',' + fmt(values[i]) + '\n';
    out.summary.headline["resistance_at_largest_radius"] = values.back();
    out.summary.censoring["truncated_at_radius"] = radii.back();
  }
  out.write("resistance.csv", csv);
}

void run_resample(const ExperimentConfig& c, Output& out) {
  const LatticeBoxSpec spec{c.dimension, c.radius, Boundary::Wired};
  lattice_box_size(c.dimension, c.radius, limits_of(c));
  ResampleOptions options;
  options.threads = c.threads;
  options.bootstrap_resamples = c.bootstrap;
  options.confidence = c.confidence;
  options.significance = c.significance;
  RngStream rng = root_stream(c);
  StatisticalResampleReport report;
  try {
    report = statistical_resample_test(spec, c.ball, c.replicas, rng, options);
  } catch (const ContractViolation& e) {
    throw ConfigError("/ball", e.what());
  }
  json cells = json::array();
  for (const auto& cell : report.cells) {
    cells.push_back({{"key", cell.key},
                     {"direct", cell.direct / report.replicas},
                     {"resampled", cell.resampled / report.replicas}});
  }
  json j = {
      {"dimension", c.dimension},
      {"radius", c.radius},
      {"ball", c.ball},
      {"ball_vertices", report.ball_vertices},
      {"ball_edges", report.ball_edges},
      {"replicas", report.replicas},
      {"tv", report.tv},
      {"bootstrap", {{"null_quantile", report.bootstrap.null_quantile},
                     {"null_mean", report.bootstrap.null_mean},
                     {"confidence", c.confidence},
                     {"within", report.bootstrap.within}}},
      {"chi_square", {{"statistic", report.chi_square.statistic},
                      {"dof", report.chi_square.dof},
                      {"p_value", report.chi_square.p_value},
                      {"cells", report.chi_square.cells},
                      {"pooled_from", report.chi_square.pooled_from}}},
      {"coarsened", report.coarsened},
      {"sparse_mass", report.sparse_mass},
      {"marginal_direct", report.marginal_direct},
      {"marginal_resampled", report.marginal_resampled},
      {"max_marginal_z", report.max_marginal_z},
      {"partition_mismatches", report.partition_mismatches},
      {"passed", report.passed},
      {"cells", cells},
  };
  out.write("resample_report.json", j.dump(2) + '\n');
  out.summary.headline = {{"tv", report.tv}, {"passed", report.passed}};
  out.summary.censoring["coarsened"] = report.coarsened;
  out.summary.censoring["sparse_mass"] = report.sparse_mass;
}

void run_cuttime(const ExperimentConfig& c, Output& out) {
  const ZValues z = z_values(c.dimension, c.truncation);
  const unsigned n_max = *std::max_element(c.levels.begin(), c.levels.end());
  const std::size_t horizon = c.horizon;
  const RngStream root = root_stream(c);
  struct Chunk {
    std::vector<RunningStats> t, l;
    std::vector<std::uint64_t> t_censored, l_censored;
  };
  const auto chunks = parallel_chunks<Chunk>(c.replicas, c.threads, [&](auto begin, auto end) {
    Chunk ch;
    ch.t.resize(n_max + 1);
    ch.l.resize(n_max + 1);
    ch.t_censored.assign(n_max + 1, 0);
    ch.l_censored.assign(n_max + 1, 0);
    for (auto i = begin; i < end; ++i) {
      RngStream s = root.substream(i);
      const TwoSidedWalkStats w = sample_cut_and_lerw(c.dimension, n_max, horizon, s);
      for (unsigned n = 0; n <= n_max; ++n) {
        const auto& times = w.cut.times;
        const bool t_ok = times.size() > n && static_cast<std::uint64_t>(times[n]) <= horizon / 2;
        if (t_ok) ch.t[n].add(static_cast<double>(times[n]));
        else ++ch.t_censored[n];
        if (w.lerw.censored[n]) ++ch.l_censored[n];
        else ch.l[n].add(static_cast<double>(w.lerw.counts[n]));
      }
    }
    return ch;
  });
  std::vector<RunningStats> t(n_max + 1), l(n_max + 1);
  std::vector<std::uint64_t> tc(n_max + 1, 0), lc(n_max + 1, 0);
  for (const auto& ch : chunks) {
    for (unsigned n = 0; n <= n_max; ++n) {
      t[n].merge(ch.t[n]);
      l[n].merge(ch.l[n]);
      tc[n] += ch.t_censored[n];
      lc[n] += ch.l_censored[n];
    }
  }
  const double z1 = z.z1_upper();
  const double z2 = z.z2_upper();
  std::string csv =
      "n,samples_T,mean_T,half_width_T,censored_T,bound_T,samples_L,mean_L,half_width_L,"
      "censored_L,bound_L\n";
  json rates = json::object();
  double worst = 0;
  for (const unsigned n : c.levels) {
    const double reps = static_cast<double>(c.replicas);
    const double bound = z1 * n + z2;
    csv += std::to_string(n) + ',' + std::to_string(t[n].count()) + ',' + fmt(t[n].mean()) + ',' +
           fmt(t[n].half_width(c.confidence)) + ',' + fmt(tc[n] / reps) + ',' + fmt(bound) + ',' +
           std::to_string(l[n].count()) + ',' + fmt(l[n].mean()) + ',' +
           fmt(l[n].half_width(c.confidence)) + ',' + fmt(lc[n] / reps) + ',' + fmt(bound + 1) + '\n';
    rates["T_" + std::to_string(n)] = tc[n] / reps;
    rates["L_" + std::to_string(n)] = lc[n] / reps;
    worst = std::max({worst, tc[n] / reps, lc[n] / reps});
  }
  out.write("cuttime.csv", csv);
  json zj = {{"dimension", z.dimension},
             {"truncation", z.truncation},
             {"tail_constant", z.tail_constant},
             {"z1_truncated", z.z1_truncated},
             {"z1_tail", z.z1_tail},
             {"z2_truncated", *z.z2_truncated},
             {"z2_tail", *z.z2_tail}};
  out.write("z_values.json", zj.dump(2) + '\n');
  out.summary.censoring = {{"horizon", c.horizon}, {"rates", rates},
                           {"threshold", c.censor_threshold},
                           {"above_threshold", worst > c.censor_threshold}};
}

void run_njl(const ExperimentConfig& c, Output& out) {
  const LatticeBox box({c.dimension, c.radius, Boundary::Wired}, limits_of(c));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
  for (const unsigned n : c.n_values) {
    for (const unsigned m : c.m_values) {
      if (n < m) grid.emplace_back(n, m);
    }
  }
  if (grid.empty()) throw ConfigError("/m_values", "no (n, m) pair with n < m");
  const RngStream root = root_stream(c);
  struct Chunk {
    std::vector<std::vector<double>> rows;
    std::uint64_t ray_total = 0;
  };
  const auto chunks = parallel_chunks<Chunk>(c.replicas, c.threads, [&](auto begin, auto end) {
    Chunk ch;
    for (auto i = begin; i < end; ++i) {
      RngStream s = root.substream(i);
      const SpanningForest forest = wsf_wired_box(box, s);
      const RayDecomposition dec = ray_decompose(forest, box.origin(), c.drop_fraction);
      const JoinStatistics stats = join_counts(box, dec);
      std::vector<double> row;
      for (const auto& [n, m] : grid) row.push_back(static_cast<double>(stats.tail_sum(n, m)));
      ch.rows.push_back(std::move(row));
      ch.ray_total += path_length(dec.ray);
    }
    return ch;
  });
  std::vector<std::vector<double>> rows;
  std::uint64_t ray_total = 0;
  for (const auto& ch : chunks) {
    rows.insert(rows.end(), ch.rows.begin(), ch.rows.end());
    ray_total += ch.ray_total;
  }
  std::ostringstream csv;
  csv << "replica,n,m,tail_sum\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k)
      csv << i << ',' << grid[k].first << ',' << grid[k].second << ',' << rows[i][k] << '\n';
  }
  out.write("njl.csv", csv.str());
  const EnvelopeFit fit = fit_join_envelope(grid, rows, c.confidence);
  json points = json::array();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    points.push_back({{"n", grid[k].first},
                      {"m", grid[k].second},
                      {"mean", fit.mean[k]},
                      {"residual", fit.residual[k]}});
  }
  json j = {{"constant", fit.constant},
            {"trend", fit.trend},
            {"trend_half_width", fit.trend_half_width},
            {"points", points}};
  out.write("njl_fit.json", j.dump(2) + '\n');
  out.summary.headline = {{"constant", fit.constant}, {"trend", fit.trend}};
  out.summary.censoring = {{"ray_drop_fraction", c.drop_fraction},
                           {"mean_ray_length", static_cast<double>(ray_total) / c.replicas}};
}

void run_growth(const ExperimentConfig& c, Output& out) {
  const LatticeBox box({c.dimension, c.radius, Boundary::Wired}, limits_of(c));
  const RngStream root = root_stream(c);
  struct Chunk {
    std::string rows;
    std::uint64_t violations = 0;
  };
  const auto chunks = parallel_chunks<Chunk>(c.replicas, c.threads, [&](auto begin, auto end) {
    Chunk ch;
    std::ostringstream rows;
    for (auto i = begin; i < end; ++i) {
      RngStream s = root.substream(i);
      const SpanningForest forest = wsf_wired_box(box, s);
      const auto profile =
          resistance_growth_profile(box, forest, box.origin(), c.n_max, c.drop_fraction);
      for (const GrowthRow& r : profile) {
        const bool ok = r.lower_bound <= r.resistance + 1e-9 && r.resistance <= r.n + 1e-9;
        if (!ok) ++ch.violations;
        rows << i << ',' << r.n << ',' << fmt(r.resistance) << ',' << fmt(r.lower_bound) << ','
             << (ok ? 1 : 0) << '\n';
      }
    }
    ch.rows = rows.str();
    return ch;
  });
  std::string csv = "replica,n,resistance,lower_bound,within_bounds\n";
  std::uint64_t violations = 0;
  for (const auto& ch : chunks) {
    csv += ch.rows;
    violations += ch.violations;
  }
  out.write("growth.csv", csv);
  out.summary.headline["bound_violations"] = violations;
  out.summary.censoring["ray_drop_fraction"] = c.drop_fraction;
}

void run_recurrence(const ExperimentConfig& c, Output& out) {
  const auto radii = radii_or(c);
  for (const int r : radii) lattice_box_size(c.dimension, r, limits_of(c));
  const auto v = point_or(c.x, c.dimension, -1);
  const RngStream root = root_stream(c);
  struct Chunk {
    std::string rows, cuts;
  };
  const auto chunks = parallel_chunks<Chunk>(c.replicas, c.threads, [&](auto begin, auto end) {
    Chunk ch;
    std::ostringstream rows, cuts;
    for (auto i = begin; i < end; ++i) {
      RngStream s = root.substream(i);
      const auto diag = recurrence_diagnostic(c.dimension, radii, v, s, c.drop_fraction);
      for (const RecurrenceRow& r : diag) {
        rows << i << ',' << r.radius << ',' << fmt(r.resistance) << ',' << r.component_size << '\n';
        for (std::size_t k = 0; k < r.cut_partial_sums.size(); ++k)
          cuts << i << ',' << r.radius << ',' << k << ',' << fmt(r.cut_partial_sums[k]) << '\n';
      }
    }
    ch.rows = rows.str();
    ch.cuts = cuts.str();
    return ch;
  });
  std::string rows = "replica,radius,resistance,component_size\n";
  std::string cuts = "replica,radius,k,partial_sum\n";
  for (const auto& ch : chunks) {
    rows += ch.rows;
    cuts += ch.cuts;
  }
  out.write("recurrence.csv", rows);
  out.write("recurrence_cuts.csv", cuts);
  out.summary.censoring["ray_drop_fraction"] = c.drop_fraction;
  out.summary.censoring["largest_radius"] = radii.back();
}

void run_counterexample(const ExperimentConfig& c, Output& out) {
  const RngStream root = root_stream(c);
  std::string csv = "radius,replicas,bridge_frequency,half_width,resistance,z\n";
  for (const int r : radii_or(c)) {
    const CounterexampleGraph cg = counterexample_graph(r, limits_of(c));
    const Graph& g = cg.graph;
    // Wilson rooted at both wired vertices samples the UST of the graph
    // with the two merged, so that is where the resistance is taken.
    std::vector<std::pair<Vertex, Vertex>> merged = g.edges();
    for (auto& [a, b] : merged) {
      if (a == cg.wired[1]) a = cg.wired[0];
      if (b == cg.wired[1]) b = cg.wired[0];
    }
    const double resistance =
        effective_resistance(Graph(g.vertex_count(), std::move(merged)), cg.origins[0], cg.origins[1]);
    const auto order = identity_order(g.vertex_count());
    const RngStream radius_root = root.substream(static_cast<std::uint64_t>(r));
    const auto chunks = parallel_chunks<RunningStats>(c.replicas, c.threads, [&](auto begin, auto end) {
      RunningStats st;
      for (auto i = begin; i < end; ++i) {
        RngStream s = radius_root.substream(i);
        const SpanningForest f = wilson_forest(g, std::span<const Vertex>(cg.wired), order, s);
        const auto [a, b] = g.endpoints(cg.bridge);
        st.add(f.parent_edge[a] == cg.bridge || f.parent_edge[b] == cg.bridge ? 1.0 : 0.0);
      }
      return st;
    });
    RunningStats freq;
    for (const auto& ch : chunks) freq.merge(ch);
    const double se = freq.standard_error();
    const double z = se > 0 ? (freq.mean() - resistance) / se : 0.0;
    csv += std::to_string(r) + ',' + std::to_string(c.replicas) + ',' + fmt(freq.mean()) + ',' +
           fmt(freq.half_width(c.confidence)) + ',' + fmt(resistance) + ',' + fmt(z) + '\n';
    out.summary.headline["bridge_frequency_r" + std::to_string(r)] = freq.mean();
  }
  out.write("counterexample.csv", csv);
  // In the free forest of the finite graph the bridge is a cut edge, so it
  // is always present.
  out.summary.headline["free_bridge_probability"] = 1.0;
}

void run_kac(const ExperimentConfig& c, Output& out) {
  Eigen::MatrixXd p;
  if (!c.transition.empty()) {
    const std::size_t n = c.transition.size();
    p.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (c.transition[i].size() != n) throw ConfigError("/transition", "matrix is not square");
      for (std::size_t k = 0; k < n; ++k) p(i, k) = c.transition[i][k];
    }
  } else if (c.chain == "two-state") {
    p = Eigen::MatrixXd::Constant(2, 2, 0.5);
  } else if (c.chain == "three-cycle") {
    p = Eigen::MatrixXd::Zero(3, 3);
    p(0, 1) = p(1, 2) = p(2, 0) = 1;
  } else {
    throw ConfigError("/chain", "unknown chain '" + c.chain + "'");
  }
  for (const std::size_t s : c.event) {
    if (s >= static_cast<std::size_t>(p.rows())) throw ConfigError("/event", "state out of range");
  }
  RngStream rng = root_stream(c);
  KacResult k;
  try {
    k = kac_check(p, c.event, c.replicas, rng, c.confidence);
  } catch (const ContractViolation& e) {
    throw ConfigError("/transition", e.what());
  } catch (const DomainError& e) {
    throw ConfigError("/transition", e.what());
  }
  json j = {{"mean_return_time", k.mean_return_time},
            {"inverse_event_probability", k.inverse_event_probability},
            {"half_width", k.half_width},
            {"event_probability", k.event_probability},
            {"samples", k.samples},
            {"within_ci", std::abs(k.mean_return_time - k.inverse_event_probability) <=
                               k.half_width + 1e-9 * k.inverse_event_probability}};
  out.write("kac.json", j.dump(2) + '\n');
  out.summary.headline = j;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

json to_json(const ExperimentConfig& c) {
  return {
      {"experiment", experiment_name(c.experiment)},
      {"d", c.dimension},
      {"radius", c.radius},
      {"radii", c.radii},
      {"ball", c.ball},
      {"replicas", c.replicas},
      {"horizon", c.horizon},
      {"truncation", c.truncation},
      {"levels", c.levels},
      {"n_values", c.n_values},
      {"m_values", c.m_values},
      {"n_max", c.n_max},
      {"x", c.x},
      {"y", c.y},
      {"graph", c.graph},
      {"source", c.source},
      {"target", c.target},
      {"chain", c.chain},
      {"transition", c.transition},
      {"event", c.event},
      {"drop_fraction", c.drop_fraction},
      {"confidence", c.confidence},
      {"significance", c.significance},
      {"censor_threshold", c.censor_threshold},
      {"bootstrap", c.bootstrap},
      {"seed", c.seed},
      {"threads", c.threads},
      {"budget_vertices", c.budget_vertices},
      {"out", c.out},
  };
}

void apply_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  if (const auto it = j.find("experiment"); it != j.end()) {
    const auto e = it->is_string() ? parse_experiment(it->get<std::string>()) : std::nullopt;
    if (!e) throw ConfigError("/experiment", "unknown experiment");
    c.experiment = *e;
  }
  read_field(j, "d", c.dimension);
  read_field(j, "radius", c.radius);
  read_field(j, "radii", c.radii);
  read_field(j, "ball", c.ball);
  read_field(j, "replicas", c.replicas);
  read_field(j, "horizon", c.horizon);
  read_field(j, "truncation", c.truncation);
  read_field(j, "levels", c.levels);
  read_field(j, "n_values", c.n_values);
  read_field(j, "m_values", c.m_values);
  read_field(j, "n_max", c.n_max);
  read_field(j, "x", c.x);
  read_field(j, "y", c.y);
  read_field(j, "graph", c.graph);
  read_field(j, "source", c.source);
  read_field(j, "target", c.target);
  read_field(j, "chain", c.chain);
  read_field(j, "transition", c.transition);
  read_field(j, "event", c.event);
  read_field(j, "drop_fraction", c.drop_fraction);
  read_field(j, "confidence", c.confidence);
  read_field(j, "significance", c.significance);
  read_field(j, "censor_threshold", c.censor_threshold);
  read_field(j, "bootstrap", c.bootstrap);
  read_field(j, "seed", c.seed);
  read_field(j, "threads", c.threads);
  read_field(j, "budget_vertices", c.budget_vertices);
  read_field(j, "out", c.out);
}

void validate(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
  };
  require(c.dimension >= 1 && c.dimension <= 32, "/d", "dimension must lie in [1, 32]");
  require(c.radius >= 1, "/radius", "radius must be >= 1");
  for (const int r : c.radii) require(r >= 1, "/radii", "every radius must be >= 1");
  require(std::is_sorted(c.radii.begin(), c.radii.end()), "/radii", "radii must increase");
  require(c.replicas >= 1, "/replicas", "need at least one replica");
  require(c.threads >= 1, "/threads", "need at least one thread");
  require(c.budget_vertices >= 1, "/budget_vertices", "budget must be positive");
  require(c.drop_fraction >= 0 && c.drop_fraction < 1, "/drop_fraction", "must lie in [0, 1)");
  require(c.confidence > 0 && c.confidence < 1, "/confidence", "must lie in (0, 1)");
  require(c.significance > 0 && c.significance < 1, "/significance", "must lie in (0, 1)");
  require(!c.out.empty(), "/out", "output directory required");
  require(c.x.empty() || static_cast<int>(c.x.size()) == c.dimension, "/x",
          "point must have d coordinates");
  require(c.y.empty() || static_cast<int>(c.y.size()) == c.dimension, "/y",
          "point must have d coordinates");

  const Limits limits{c.budget_vertices};
  switch (c.experiment) {
    case Experiment::Sample:
    case Experiment::Njl:
    case Experiment::Growth:
      lattice_box_size(c.dimension, c.radius, limits);
      break;
    case Experiment::ResampleTest:
      require(c.ball >= 1 && c.ball * 4 <= c.radius, "/ball",
              "ball radius must be >= 1 and at most radius/4");
      require(c.bootstrap >= 1, "/bootstrap", "need bootstrap resamples");
      lattice_box_size(c.dimension, c.radius, limits);
      break;
    case Experiment::CutTime:
      require(c.dimension >= 7, "/d", "cut-time bounds need d >= 7");
      require(c.horizon >= 2, "/horizon", "horizon must be >= 2");
      require(c.horizon <= 100'000'000, "/horizon", "horizon above the step cap");
      require(!c.levels.empty(), "/levels", "need at least one level");
      if (c.horizon * 2 * 16 > c.budget_vertices * 64)
        throw ResourceError("cuttime: walk storage for horizon " + std::to_string(c.horizon) +
                            " exceeds the budget");
      break;
    case Experiment::Resistance:
    case Experiment::Recurrence:
      if (c.graph.empty()) {
        for (const int r : c.radii) lattice_box_size(c.dimension, r, limits);
        if (c.radii.empty()) lattice_box_size(c.dimension, c.radius, limits);
      }
      break;
    case Experiment::Counterexample:
      for (const int r : c.radii) lattice_box_size(5, r, {c.budget_vertices / 2});
      if (c.radii.empty()) lattice_box_size(5, c.radius, {c.budget_vertices / 2});
      break;
    case Experiment::Kac:
      require(!c.event.empty(), "/event", "event must be nonempty");
      break;
  }
  if (c.experiment == Experiment::Njl) {
    require(!c.n_values.empty() && !c.m_values.empty(), "/m_values", "grid must be nonempty");
    for (const unsigned n : c.n_values) require(n >= 1, "/n_values", "n must be >= 1");
  }
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("threads");
  j.erase("out");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunSummary run_experiment(const ExperimentConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  Output out{fs::path(c.out), {}};
  fs::create_directories(out.dir);
  switch (c.experiment) {
    case Experiment::Sample: run_sample(c, out); break;
    case Experiment::Resistance: run_resistance(c, out); break;
    case Experiment::ResampleTest: run_resample(c, out); break;
    case Experiment::CutTime: run_cuttime(c, out); break;
    case Experiment::Njl: run_njl(c, out); break;
    case Experiment::Growth: run_growth(c, out); break;
    case Experiment::Recurrence: run_recurrence(c, out); break;
    case Experiment::Counterexample: run_counterexample(c, out); break;
    case Experiment::Kac: run_kac(c, out); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(c);
  json artifacts = json::array();
  for (const auto& p : out.summary.artifacts) artifacts.push_back(p.filename().string());
  const json manifest = {
      {"experiment", experiment_name(c.experiment)},
      {"version", kVersion},
      {"seed", c.seed},
      {"threads", c.threads},
      {"config_hash", hash.str()},
      {"config", to_json(c)},
      {"wall_time_seconds", wall},
      {"censoring", out.summary.censoring},
      {"headline", out.summary.headline},
      {"artifacts", artifacts},
  };
  write_atomic(out.dir / "manifest.json", manifest.dump(2) + '\n');
  out.summary.artifacts.push_back(out.dir / "manifest.json");
  return out.summary;
}

int run(const ExperimentConfig& c, std::ostream& err) {
  try {
    run_experiment(c);
    return 0;
  } catch (const ConfigError& e) {
    err << "invalid config at " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace forestlab
