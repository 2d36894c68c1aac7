#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rank1part/errors.hpp"
#include "rank1part/eval.hpp"
#include "rank1part/extract.hpp"
#include "rank1part/lbm.hpp"
#include "rank1part/matrix.hpp"
#include "rank1part/potts.hpp"

namespace rank1part {

enum class Step2 { kPotts, kSortedPotts, kThreshold };

inline const char* to_string(Step2 s) {
  switch (s) {
    case Step2::kPotts: return "potts";
    case Step2::kSortedPotts: return "sorted_potts";
    case Step2::kThreshold: return "threshold";
  }
  return "unknown";
}

inline std::optional<Step2> step2_from_string(std::string_view s) {
  if (s == "potts") return Step2::kPotts;
  if (s == "sorted_potts") return Step2::kSortedPotts;
  if (s == "threshold") return Step2::kThreshold;
  return std::nullopt;
}

struct PipelineOptions {
  Method method = Method::kNmf;
  Step2 step2 = Step2::kSortedPotts;
  int p = 1;
  std::optional<double> lambda;         // absent -> silhouette-selected
  std::optional<double> epsilon;        // entropic OT methods
  std::optional<double> threshold_eps;  // step2 = threshold
  int nmf_restarts = 100;
  std::uint64_t seed = 0;
};

// One clustered mode (rows or columns).
struct ModeResult {
  Vector cg;
  Vector denoised;
  std::vector<int> labels;
  int k = 0;
  double lambda = 0.0;
};

struct PipelineResult {
  ModeResult rows;
  std::optional<ModeResult> cols;
  Method method = Method::kNmf;
  double shift_offset = 0.0;
  double wall_seconds = 0.0;
  ExtractDiagnostics diag;
};

namespace detail {

inline ModeResult denoise_mode(const Vector& cg, const PipelineOptions& opts) {
  ModeResult mode;
  mode.cg = cg;
  const int n = static_cast<int>(cg.size());

  if (opts.step2 == Step2::kThreshold) {
    double eps = 0.0;
    if (opts.threshold_eps.has_value()) {
      eps = *opts.threshold_eps;
    } else {
      // default: twice the mean positive consecutive gap of the sorted vector
      Vector s = cg;
      std::sort(s.data(), s.data() + n);
      double gap_sum = 0.0;
      int gap_count = 0;
      for (int i = 1; i < n; ++i)
        if (s(i) > s(i - 1)) {
          gap_sum += s(i) - s(i - 1);
          ++gap_count;
        }
      eps = gap_count > 0 ? 2.0 * gap_sum / gap_count : 1.0;
    }
    mode.labels = threshold_jump_labels(cg, eps);
    mode.k = *std::max_element(mode.labels.begin(), mode.labels.end()) + 1;
    mode.denoised = Vector(n);
    std::vector<double> sums(mode.k, 0.0);
    std::vector<int> counts(mode.k, 0);
    for (int i = 0; i < n; ++i) {
      sums[mode.labels[i]] += cg(i);
      counts[mode.labels[i]] += 1;
    }
    for (int i = 0; i < n; ++i)
      mode.denoised(i) = sums[mode.labels[i]] / counts[mode.labels[i]];
    return mode;
  }

  PiecewiseResult solution;
  if (opts.lambda.has_value()) {
    mode.lambda = *opts.lambda;
    solution = (opts.step2 == Step2::kPotts) ? potts_solve(cg, mode.lambda, opts.p)
                                             : sorted_potts_solve(cg, mode.lambda, opts.p);
    mode.labels = labels_from_values(solution);
  } else {
    LambdaSelection sel = select_lambda(cg, opts.p);
    mode.lambda = sel.lambda;
    if (opts.step2 == Step2::kPotts) {
      solution = potts_solve(cg, mode.lambda, opts.p);
      mode.labels = labels_from_values(solution);
    } else {
      solution = std::move(sel.solution);
      mode.labels = std::move(sel.labels);
    }
  }
  mode.denoised = solution.x;
  mode.k = *std::max_element(mode.labels.begin(), mode.labels.end()) + 1;
  return mode;
}

inline DataMatrix transposed(const DataMatrix& a) {
  DataMatrix t;
  t.values = a.values.transpose();
  if (a.mask.has_value()) t.mask = a.mask->transpose();
  return t;
}

}  // namespace detail

// Step 1 extractor followed by Step 2 coordinate clustering, for rows and
// (where the method defines one) columns; spectral and PageRank column
// partitions come from re-running on the transpose. Methods that need
// nonnegative data see the input shifted by max(0, -min) + 0.01.
inline PipelineResult run_pipeline(const DataMatrix& a, const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult result;
  result.method = opts.method;

  const bool needs_nonneg = opts.method == Method::kNmf || opts.method == Method::kPageRank ||
                            opts.method == Method::kMarginal;
  DataMatrix input = a;
  if (needs_nonneg) {
    auto [shifted, offset] = shift_to_nonnegative(a);
    input = std::move(shifted);
    result.shift_offset = offset;
  }

  Vector u;
  std::optional<Vector> v;
  switch (opts.method) {
    case Method::kNmf: {
      CgVectorPair pair =
          extract_nmf_rank1(input, NmfLoss::kKl, opts.nmf_restarts, 1000, 1e-9, opts.seed);
      u = std::move(pair.u);
      v = std::move(pair.v);
      result.diag = std::move(pair.diag);
      break;
    }
    case Method::kCcot: {
      CgVectorPair pair = extract_ccot(input, opts.epsilon);
      u = std::move(pair.u);
      v = std::move(pair.v);
      result.diag = std::move(pair.diag);
      break;
    }
    case Method::kCcotGw: {
      CgVectorPair pair = extract_ccot_gw(input, opts.epsilon);
      u = std::move(pair.u);
      v = std::move(pair.v);
      result.diag = std::move(pair.diag);
      break;
    }
    case Method::kMarginal: {
      CgVectorPair pair = extract_marginals(input);
      u = std::move(pair.u);
      v = std::move(pair.v);
      result.diag = std::move(pair.diag);
      break;
    }
    case Method::kFiedler:
    case Method::kFiedlerDs: {
      const FiedlerVariant variant = opts.method == Method::kFiedler
                                         ? FiedlerVariant::kRaw
                                         : FiedlerVariant::kDoublyStochastic;
      CgVectorPair pair = extract_fiedler(input, variant);
      u = std::move(pair.u);
      result.diag = std::move(pair.diag);
      v = extract_fiedler(detail::transposed(input), variant).u;
      break;
    }
    case Method::kPageRank: {
      CgVectorPair pair = extract_pagerank(input);
      u = std::move(pair.u);
      result.diag = std::move(pair.diag);
      v = extract_pagerank(detail::transposed(input)).u;
      break;
    }
  }

  result.rows = detail::denoise_mode(u, opts);
  if (v.has_value()) result.cols = detail::denoise_mode(*v, opts);

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  std::vector<std::string> configs;  // preset names or config file paths
  std::vector<Method> methods;
  Step2 step2 = Step2::kSortedPotts;
  int p = 1;
  std::optional<double> noise_sigma;
  int runs = 20;
  std::uint64_t base_seed = 0;
  std::string output_dir = "bench_out";

  void validate() const {
    if (configs.empty()) throw ArgumentError("ExperimentSpec: field configs must be nonempty");
    if (methods.empty()) throw ArgumentError("ExperimentSpec: field methods must be nonempty");
    if (runs < 1) throw ArgumentError("ExperimentSpec: field runs must be >= 1");
    if (p != 1 && p != 2) throw ArgumentError("ExperimentSpec: field p must be 1 or 2");
    if (noise_sigma.has_value() && !(*noise_sigma >= 0.0))
      throw ArgumentError("ExperimentSpec: field noise_sigma must be nonnegative");
  }
};

inline void from_json(const nlohmann::json& j, ExperimentSpec& spec) {
  try {
    spec.configs = j.at("configs").get<std::vector<std::string>>();
    for (const auto& name : j.at("methods").get<std::vector<std::string>>()) {
      const auto m = method_from_string(name);
      if (!m) throw ArgumentError("ExperimentSpec: unknown method '" + name + "'");
      spec.methods.push_back(*m);
    }
    if (j.contains("step2")) {
      const auto s = step2_from_string(j.at("step2").get<std::string>());
      if (!s) throw ArgumentError("ExperimentSpec: unknown step2 '" +
                                  j.at("step2").get<std::string>() + "'");
      spec.step2 = *s;
    }
    spec.p = j.value("p", 1);
    if (j.contains("noise_sigma") && !j.at("noise_sigma").is_null())
      spec.noise_sigma = j.at("noise_sigma").get<double>();
    spec.runs = j.value("runs", 20);
    spec.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
    spec.output_dir = j.value("output_dir", std::string("bench_out"));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("ExperimentSpec: malformed JSON: ") + e.what());
  }
  spec.validate();
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": invalid JSON: " + e.what());
  }
  return j.get<ExperimentSpec>();
}

struct BenchCell {
  int completed = 0;
  int failed = 0;
  double nmi_rows_mean = 0.0;
  double nmi_rows_std = 0.0;
  double nmi_cols_mean = 0.0;
  bool has_cols = false;
  double cce_mean = 0.0;
  double wall_mean = 0.0;
};

struct BenchTable {
  std::vector<std::string> config_names;
  std::vector<Method> methods;
  std::vector<std::vector<BenchCell>> cells;  // [method][config]
};

namespace detail {

inline std::string sidecar_path(const std::string& matrix_path) {
  const std::string ext = ".csv";
  if (matrix_path.size() > ext.size() &&
      matrix_path.compare(matrix_path.size() - ext.size(), ext.size(), ext) == 0)
    return matrix_path.substr(0, matrix_path.size() - ext.size()) + ".labels.csv";
  return matrix_path + ".labels.csv";
}

inline void write_indexed_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << (i + 1) << ' ' << format_double(v(i)) << '\n';
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline nlohmann::json report_to_json(const PipelineResult& result, const PipelineOptions& opts,
                                     const std::optional<RunReport>& metrics) {
  nlohmann::json j;
  j["method"] = to_string(result.method);
  j["step2"] = to_string(opts.step2);
  j["p"] = opts.p;
  j["seed"] = opts.seed;
  j["shift_offset"] = result.shift_offset;
  j["wall_seconds"] = result.wall_seconds;
  j["rows"] = {{"k", result.rows.k}, {"lambda", result.rows.lambda}};
  if (result.cols.has_value())
    j["cols"] = {{"k", result.cols->k}, {"lambda", result.cols->lambda}};
  if (metrics.has_value()) {
    j["nmi_rows"] = metrics->nmi_rows;
    j["ce_rows"] = metrics->ce_rows;
    if (result.cols.has_value()) {
      j["nmi_cols"] = metrics->nmi_cols;
      j["ce_cols"] = metrics->ce_cols;
      j["cce"] = metrics->cce;
    }
  }
  return j;
}

inline void write_run_artifacts(const std::filesystem::path& dir, const PipelineResult& result,
                                const PipelineOptions& opts,
                                const std::optional<RunReport>& metrics) {
  std::filesystem::create_directories(dir);
  write_indexed_vector((dir / "u.txt").string(), result.rows.cg);
  write_indexed_vector((dir / "u_denoised.txt").string(), result.rows.denoised);
  std::vector<int> col_labels;
  if (result.cols.has_value()) {
    write_indexed_vector((dir / "v.txt").string(), result.cols->cg);
    write_indexed_vector((dir / "v_denoised.txt").string(), result.cols->denoised);
    col_labels = result.cols->labels;
  }
  write_labels_csv((dir / "labels.csv").string(), result.rows.labels, col_labels);
  std::ofstream out(dir / "report.json");
  if (!out) throw IoError("cannot open '" + (dir / "report.json").string() + "' for writing");
  out << report_to_json(result, opts, metrics).dump(2) << '\n';
}

inline RunReport evaluate_against_truth(const PipelineResult& result,
                                        const std::vector<int>& z_rows,
                                        const std::vector<int>& z_cols) {
  RunReport rep;
  rep.method = to_string(result.method);
  rep.k_rows = result.rows.k;
  rep.wall_seconds = result.wall_seconds;
  rep.nmi_rows = nmi(z_rows, result.rows.labels);
  rep.ce_rows = clustering_error(z_rows, result.rows.labels);
  if (result.cols.has_value() && !z_cols.empty()) {
    rep.k_cols = result.cols->k;
    rep.nmi_cols = nmi(z_cols, result.cols->labels);
    rep.ce_cols = clustering_error(z_cols, result.cols->labels);
    rep.cce = rep.ce_rows + rep.ce_cols - rep.ce_rows * rep.ce_cols;
  }
  return rep;
}

inline LbmConfig resolve_config(const std::string& name_or_path) {
  if (auto preset = preset_config(name_or_path)) return *preset;
  if (std::filesystem::exists(name_or_path)) return load_lbm_config(name_or_path);
  throw ArgumentError("unknown config '" + name_or_path +
                      "' (not a preset name and not an existing file)");
}

inline int worker_count(std::size_t tasks) {
  const char* env = std::getenv("RANK1PART_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  const long t = std::strtol(env, nullptr, 10);
  if (t <= 1) return 1;
  return static_cast<int>(std::min<long>(t, static_cast<long>(tasks)));
}

}  // namespace detail

// Runs the full (config x method x run) grid, writes per-run artifacts under
// output_dir/<config>/<method>/run<k>/ and the aggregate files table1.csv,
// table1.json and figure4.txt. Individual run failures are recorded per cell
// without aborting the suite.
inline BenchTable run_bench(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<LbmConfig> configs;
  configs.reserve(spec.configs.size());
  for (const auto& c : spec.configs) configs.push_back(detail::resolve_config(c));
  const bool noisy = spec.noise_sigma.has_value() && *spec.noise_sigma > 0.0;

  BenchTable table;
  table.methods = spec.methods;
  for (const auto& cfg : configs) table.config_names.push_back(cfg.name + (noisy ? "-n" : ""));

  const std::size_t n_configs = configs.size();
  const std::size_t n_methods = spec.methods.size();
  const std::size_t n_runs = static_cast<std::size_t>(spec.runs);

  struct Outcome {
    bool ok = false;
    RunReport report;
    std::string error;
  };
  std::vector<Outcome> outcomes(n_configs * n_methods * n_runs);
  const auto slot = [&](std::size_t c, std::size_t m, std::size_t r) {
    return (c * n_methods + m) * n_runs + r;
  };

  const std::filesystem::path out_root(spec.output_dir);
  std::filesystem::create_directories(out_root);

  const auto run_task = [&](std::size_t task) {
    const std::size_t c = task / n_runs;
    const std::size_t r = task % n_runs;
    const std::uint64_t seed = spec.base_seed + r;
    const GeneratedDataset ds = generate_lbm(configs[c], seed);
    const DataMatrix data = noisy ? add_noise(ds.A, *spec.noise_sigma, seed) : ds.A;
    for (std::size_t m = 0; m < n_methods; ++m) {
      PipelineOptions opts;
      opts.method = spec.methods[m];
      opts.step2 = spec.step2;
      opts.p = spec.p;
      opts.seed = seed;
      Outcome& outcome = outcomes[slot(c, m, r)];
      const auto run_dir = out_root / table.config_names[c] / to_string(opts.method) /
                           ("run" + std::to_string(r));
      try {
        const PipelineResult result = run_pipeline(data, opts);
        RunReport rep = detail::evaluate_against_truth(result, ds.row_labels, ds.col_labels);
        rep.config = table.config_names[c];
        rep.seed = seed;
        detail::write_run_artifacts(run_dir, result, opts, rep);
        outcome.ok = true;
        outcome.report = std::move(rep);
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
        std::filesystem::create_directories(run_dir);
        nlohmann::json j;
        j["method"] = to_string(opts.method);
        j["config"] = table.config_names[c];
        j["seed"] = seed;
        j["error"] = outcome.error;
        std::ofstream out(run_dir / "report.json");
        out << j.dump(2) << '\n';
      }
    }
  };

  const std::size_t n_tasks = n_configs * n_runs;
  const int workers = detail::worker_count(n_tasks);
  if (workers <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (std::size_t t = next.fetch_add(1); t < n_tasks; t = next.fetch_add(1)) run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  table.cells.assign(n_methods, std::vector<BenchCell>(n_configs));
  for (std::size_t m = 0; m < n_methods; ++m)
    for (std::size_t c = 0; c < n_configs; ++c) {
      BenchCell& cell = table.cells[m][c];
      std::vector<double> nmis;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const Outcome& o = outcomes[slot(c, m, r)];
        if (!o.ok) {
          cell.failed += 1;
          continue;
        }
        cell.completed += 1;
        nmis.push_back(o.report.nmi_rows);
        cell.nmi_cols_mean += o.report.nmi_cols;
        cell.has_cols = cell.has_cols || o.report.k_cols > 0;
        cell.cce_mean += o.report.cce;
        cell.wall_mean += o.report.wall_seconds;
      }
      if (cell.completed > 0) {
        double mean = 0.0;
        for (double x : nmis) mean += x;
        mean /= nmis.size();
        double var = 0.0;
        for (double x : nmis) var += (x - mean) * (x - mean);
        cell.nmi_rows_mean = mean;
        cell.nmi_rows_std = nmis.size() > 1 ? std::sqrt(var / (nmis.size() - 1)) : 0.0;
        cell.nmi_cols_mean /= cell.completed;
        cell.cce_mean /= cell.completed;
        cell.wall_mean /= cell.completed;
      }
    }

  // table1.csv: rows = methods, columns = configs, cells = mean±std of row NMI
  {
    std::ofstream out(out_root / "table1.csv");
    if (!out) throw IoError("cannot open table1.csv for writing");
    out << "method";
    for (const auto& name : table.config_names) out << ',' << name;
    out << '\n';
    for (std::size_t m = 0; m < n_methods; ++m) {
      out << to_string(table.methods[m]);
      for (std::size_t c = 0; c < n_configs; ++c) {
        const BenchCell& cell = table.cells[m][c];
        out << ',';
        if (cell.completed > 0)
          out << detail::format_fixed(cell.nmi_rows_mean, 3) << "±"
              << detail::format_fixed(cell.nmi_rows_std, 3);
        else
          out << '-';
      }
      out << '\n';
    }
  }

  // figure4.txt: co-clustering error in percent, one block per method
  {
    std::ofstream out(out_root / "figure4.txt");
    if (!out) throw IoError("cannot open figure4.txt for writing");
    for (std::size_t m = 0; m < n_methods; ++m) {
      out << "# method=" << to_string(table.methods[m]) << '\n';
      for (std::size_t c = 0; c < n_configs; ++c) {
        const BenchCell& cell = table.cells[m][c];
        out << table.config_names[c] << ' '
            << detail::format_fixed(cell.completed > 0 ? 100.0 * cell.cce_mean : -1.0, 3) << '\n';
      }
    }
  }

  {
    nlohmann::json j;
    j["configs"] = table.config_names;
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t m = 0; m < n_methods; ++m) {
      nlohmann::json row;
      row["method"] = to_string(table.methods[m]);
      nlohmann::json per_config = nlohmann::json::array();
      for (std::size_t c = 0; c < n_configs; ++c) {
        const BenchCell& cell = table.cells[m][c];
        per_config.push_back({{"config", table.config_names[c]},
                              {"completed", cell.completed},
                              {"failed", cell.failed},
                              {"nmi_rows_mean", cell.nmi_rows_mean},
                              {"nmi_rows_std", cell.nmi_rows_std},
                              {"nmi_cols_mean", cell.nmi_cols_mean},
                              {"cce_mean", cell.cce_mean},
                              {"wall_mean_seconds", cell.wall_mean}});
      }
      row["cells"] = std::move(per_config);
      cells.push_back(std::move(row));
    }
    j["table"] = std::move(cells);
    std::ofstream out(out_root / "table1.json");
    if (!out) throw IoError("cannot open table1.json for writing");
    out << j.dump(2) << '\n';
  }

  return table;
}

// ---------------------------------------------------------------------------
// Subcommand bodies shared by the CLI and the tests
// ---------------------------------------------------------------------------

inline void cmd_generate(const std::string& config_spec, std::uint64_t seed,
                         const std::string& out_matrix, std::ostream& os) {
  const LbmConfig cfg = detail::resolve_config(config_spec);
  const GeneratedDataset ds = generate_lbm(cfg, seed);
  write_matrix_csv(out_matrix, ds.A);
  const std::string sidecar = detail::sidecar_path(out_matrix);
  write_labels_csv(sidecar, ds.row_labels, ds.col_labels);

  std::vector<int> row_counts(cfg.k_r, 0);
  std::vector<int> col_counts(cfg.k_c, 0);
  for (int z : ds.row_labels) row_counts[z] += 1;
  for (int z : ds.col_labels) col_counts[z] += 1;
  os << "dataset " << cfg.name << ": " << cfg.m << "x" << cfg.n << ", k_r=" << cfg.k_r
     << ", k_c=" << cfg.k_c << '\n';
  os << "row cluster sizes:";
  for (int c : row_counts) os << ' ' << c;
  os << "\ncol cluster sizes:";
  for (int c : col_counts) os << ' ' << c;
  os << "\nwrote " << out_matrix << " and " << sidecar << '\n';
}

inline void cmd_run(const std::string& matrix_file, const PipelineOptions& opts,
                    const std::string& out_dir, std::ostream& os) {
  const DataMatrix a = read_matrix_csv(matrix_file);
  const PipelineResult result = run_pipeline(a, opts);

  std::optional<RunReport> metrics;
  const std::string sidecar = detail::sidecar_path(matrix_file);
  if (std::filesystem::exists(sidecar)) {
    const CoPartition truth = read_labels_csv(sidecar);
    metrics = detail::evaluate_against_truth(result, truth.rows, truth.cols);
  }
  detail::write_run_artifacts(out_dir, result, opts, metrics);

  os << "method " << to_string(opts.method) << ": k_rows=" << result.rows.k;
  if (result.cols.has_value()) os << ", k_cols=" << result.cols->k;
  if (metrics.has_value()) {
    os << ", nmi_rows=" << detail::format_fixed(metrics->nmi_rows, 4);
    if (result.cols.has_value()) os << ", cce=" << detail::format_fixed(metrics->cce, 4);
  }
  os << "\nwrote artifacts to " << out_dir << '\n';
}

inline void cmd_evaluate(const std::string& truth_path, const std::string& pred_path,
                         std::ostream& os) {
  const CoPartition truth = read_labels_csv(truth_path);
  const CoPartition pred = read_labels_csv(pred_path);
  nlohmann::json j;
  j["nmi_rows"] = nmi(truth.rows, pred.rows);
  j["ce_rows"] = clustering_error(truth.rows, pred.rows);
  if (!truth.cols.empty() && !pred.cols.empty()) {
    const double er = clustering_error(truth.rows, pred.rows);
    const double ec = clustering_error(truth.cols, pred.cols);
    j["nmi_cols"] = nmi(truth.cols, pred.cols);
    j["ce_cols"] = ec;
    j["cce"] = er + ec - er * ec;
  }
  os << j.dump(2) << '\n';
}

}  // namespace rank1part
