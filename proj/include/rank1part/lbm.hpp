#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rank1part/errors.hpp"
#include "rank1part/eval.hpp"
#include "rank1part/matrix.hpp"
#include "rank1part/rng.hpp"

namespace rank1part {

// Gaussian latent block model: row labels ~ Multinomial(row_props), column
// labels ~ Multinomial(col_props), entries ~ N(block_means[z_R, z_C], block_std^2).
struct LbmConfig {
  int m = 0;
  int n = 0;
  int k_r = 0;
  int k_c = 0;
  std::vector<double> row_props;
  std::vector<double> col_props;
  Matrix block_means;
  double block_std = 1.0;
  std::string name;

  void validate() const {
    if (m < 1 || n < 1) throw ArgumentError("LbmConfig '" + name + "': m and n must be positive");
    if (k_r < 1 || k_r > m)
      throw ArgumentError("LbmConfig '" + name + "': field k_r must lie in [1, m]");
    if (k_c < 1 || k_c > n)
      throw ArgumentError("LbmConfig '" + name + "': field k_c must lie in [1, n]");
    if (static_cast<int>(row_props.size()) != k_r)
      throw ArgumentError("LbmConfig '" + name + "': field row_props must have k_r entries");
    if (static_cast<int>(col_props.size()) != k_c)
      throw ArgumentError("LbmConfig '" + name + "': field col_props must have k_c entries");
    const auto check_simplex = [&](const std::vector<double>& p, const char* field) {
      double sum = 0.0;
      for (double x : p) {
        if (!(x > 0.0))
          throw ArgumentError("LbmConfig '" + name + "': field " + field +
                              " must have strictly positive entries");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ArgumentError("LbmConfig '" + name + "': field " + field + " must sum to 1 (got " +
                            std::to_string(sum) + ")");
    };
    check_simplex(row_props, "row_props");
    check_simplex(col_props, "col_props");
    if (block_means.rows() != k_r || block_means.cols() != k_c)
      throw ArgumentError("LbmConfig '" + name + "': field block_means must be k_r x k_c");
    if (!block_means.allFinite())
      throw ArgumentError("LbmConfig '" + name + "': field block_means must be finite");
    if (!(block_std > 0.0))
      throw ArgumentError("LbmConfig '" + name + "': field block_std must be positive");
  }
};

struct GeneratedDataset {
  DataMatrix A;
  std::vector<int> row_labels;
  std::vector<int> col_labels;
  LbmConfig config;
  std::uint64_t seed = 0;
};

// RNG stream ids used by the generators; one stream per array draw so the
// draws stay reproducible independently of each other.
namespace lbm_streams {
constexpr std::uint64_t kRowLabels = 0;
constexpr std::uint64_t kColLabels = 1;
constexpr std::uint64_t kEntries = 2;
constexpr std::uint64_t kNoise = 3;
}  // namespace lbm_streams

namespace detail {

inline bool draw_labels(Rng& rng, const std::vector<double>& props, int count,
                        std::vector<int>& out) {
  const int k = static_cast<int>(props.size());
  out.resize(count);
  std::vector<bool> seen(k, false);
  for (int i = 0; i < count; ++i) {
    out[i] = rng.categorical(props);
    seen[out[i]] = true;
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace detail

inline GeneratedDataset generate_lbm(const LbmConfig& config, std::uint64_t seed) {
  config.validate();
  GeneratedDataset out;
  out.config = config;
  out.seed = seed;

  Rng row_rng(seed, lbm_streams::kRowLabels);
  Rng col_rng(seed, lbm_streams::kColLabels);
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    const bool rows_ok = detail::draw_labels(row_rng, config.row_props, config.m, out.row_labels);
    const bool cols_ok = detail::draw_labels(col_rng, config.col_props, config.n, out.col_labels);
    ok = rows_ok && cols_ok;
  }
  if (!ok)
    throw GenerationError("generate_lbm: empty cluster after 100 label redraws for '" +
                          config.name + "'");

  Rng entry_rng(seed, lbm_streams::kEntries);
  Matrix values(config.m, config.n);
  for (int i = 0; i < config.m; ++i)
    for (int j = 0; j < config.n; ++j)
      values(i, j) = config.block_means(out.row_labels[i], out.col_labels[j]) +
                     config.block_std * entry_rng.normal();
  out.A = DataMatrix(std::move(values));
  return out;
}

// Adds i.i.d. Gaussian white noise to every entry.
inline DataMatrix add_noise(const DataMatrix& a, double sigma_noise, std::uint64_t seed) {
  if (!(sigma_noise >= 0.0)) throw ArgumentError("add_noise: sigma_noise must be nonnegative");
  if (!a.fully_observed()) throw ArgumentError("add_noise: input must be fully observed");
  Rng rng(seed, lbm_streams::kNoise);
  Matrix values = a.values;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      values(i, j) += sigma_noise * rng.normal();
  return DataMatrix(std::move(values));
}

// The four benchmark configurations. Sizes, cluster counts, overlap degree and
// equal/unequal proportions follow the protocol; block means sit on an
// additive lattice alpha[g][h] = spacing * (g + h) with spacing 3 for the
// well-separated configs and 1 for the ill-separated ones, so row and column
// mean profiles stay distinct in every mode.
inline std::vector<LbmConfig> preset_configs() {
  const auto lattice = [](int kr, int kc, double spacing) {
    Matrix alpha(kr, kc);
    for (int g = 0; g < kr; ++g)
      for (int h = 0; h < kc; ++h) alpha(g, h) = spacing * static_cast<double>(g + h);
    return alpha;
  };
  std::vector<LbmConfig> configs;

  LbmConfig d1;
  d1.name = "D1";
  d1.m = 600;
  d1.n = 300;
  d1.k_r = 3;
  d1.k_c = 3;
  d1.row_props = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  d1.col_props = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  d1.block_means = lattice(3, 3, 3.0);
  d1.block_std = 1.0;
  configs.push_back(d1);

  LbmConfig d2 = d1;
  d2.name = "D2";
  d2.row_props = {0.5, 0.3, 0.2};
  d2.col_props = {0.5, 0.3, 0.2};
  configs.push_back(d2);

  LbmConfig d3;
  d3.name = "D3";
  d3.m = 300;
  d3.n = 200;
  d3.k_r = 2;
  d3.k_c = 4;
  d3.row_props = {0.5, 0.5};
  d3.col_props = {0.25, 0.25, 0.25, 0.25};
  d3.block_means = lattice(2, 4, 1.0);
  d3.block_std = 1.0;
  configs.push_back(d3);

  LbmConfig d4;
  d4.name = "D4";
  d4.m = 300;
  d4.n = 300;
  d4.k_r = 5;
  d4.k_c = 4;
  d4.row_props = {0.3, 0.25, 0.2, 0.15, 0.1};
  d4.col_props = {0.4, 0.3, 0.2, 0.1};
  d4.block_means = lattice(5, 4, 1.0);
  d4.block_std = 1.0;
  configs.push_back(d4);

  return configs;
}

inline std::optional<LbmConfig> preset_config(const std::string& name) {
  for (auto& cfg : preset_configs())
    if (cfg.name == name) return cfg;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Config JSON and labels sidecar
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const LbmConfig& cfg) {
  std::vector<std::vector<double>> means(cfg.k_r, std::vector<double>(cfg.k_c));
  for (int g = 0; g < cfg.k_r; ++g)
    for (int h = 0; h < cfg.k_c; ++h) means[g][h] = cfg.block_means(g, h);
  j = nlohmann::json{{"m", cfg.m},
                     {"n", cfg.n},
                     {"k_r", cfg.k_r},
                     {"k_c", cfg.k_c},
                     {"row_props", cfg.row_props},
                     {"col_props", cfg.col_props},
                     {"block_means", means},
                     {"block_std", cfg.block_std},
                     {"name", cfg.name}};
}

inline void from_json(const nlohmann::json& j, LbmConfig& cfg) {
  try {
    cfg.m = j.at("m").get<int>();
    cfg.n = j.at("n").get<int>();
    cfg.k_r = j.at("k_r").get<int>();
    cfg.k_c = j.at("k_c").get<int>();
    cfg.row_props = j.at("row_props").get<std::vector<double>>();
    cfg.col_props = j.at("col_props").get<std::vector<double>>();
    const auto means = j.at("block_means").get<std::vector<std::vector<double>>>();
    cfg.block_means = Matrix(cfg.k_r, cfg.k_c);
    if (static_cast<int>(means.size()) != cfg.k_r)
      throw ArgumentError("LbmConfig: field block_means must have k_r rows");
    for (int g = 0; g < cfg.k_r; ++g) {
      if (static_cast<int>(means[g].size()) != cfg.k_c)
        throw ArgumentError("LbmConfig: field block_means must have k_c columns per row");
      for (int h = 0; h < cfg.k_c; ++h) cfg.block_means(g, h) = means[g][h];
    }
    cfg.block_std = j.at("block_std").get<double>();
    cfg.name = j.value("name", std::string("unnamed"));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("LbmConfig: malformed JSON: ") + e.what());
  }
  cfg.validate();
}

inline LbmConfig load_lbm_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": invalid JSON: " + e.what());
  }
  return j.get<LbmConfig>();
}

inline void write_labels_csv(const std::string& path, const std::vector<int>& z_rows,
                             const std::vector<int>& z_cols) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "z_R";
  for (int v : z_rows) out << ',' << v;
  out << "\nz_C";
  for (int v : z_cols) out << ',' << v;
  out << '\n';
  if (!out) throw IoError("error while writing '" + path + "'");
}

inline CoPartition read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  CoPartition part;
  std::string line;
  const auto parse_line = [&](const std::string& tag) {
    if (!std::getline(in, line)) throw IoError(path + ": missing " + tag + " line");
    const auto fields = detail::split_csv_line(line);
    if (fields.empty() || fields[0] != tag)
      throw IoError(path + ": expected line starting with '" + tag + "'");
    std::vector<int> labels;
    labels.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        labels.push_back(std::stoi(fields[i]));
      } catch (const std::exception&) {
        throw IoError(path + ": cannot parse label '" + fields[i] + "'");
      }
    }
    return labels;
  };
  part.rows = parse_line("z_R");
  part.cols = parse_line("z_C");
  return part;
}

}  // namespace rank1part
