#include "stc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "stc/ambiguization.hpp"
#include "stc/coding.hpp"
#include "stc/io.hpp"
#include "stc/kernels.hpp"
#include "stc/rng.hpp"
#include "stc/synthetic.hpp"

namespace stc {

void validate(const ExperimentConfig& cfg) {
  if (cfg.N < 1 || cfg.L < 1 || cfg.M < 1 || cfg.k < 1)
    throw std::invalid_argument("config: dimensions must be positive");
  if (cfg.k > cfg.M || cfg.M % cfg.k != 0)
    throw std::invalid_argument("config: M must split evenly into k clusters");
  if (cfg.S_x < 1 || cfg.S_x > cfg.L) throw std::invalid_argument("config: S_x out of range");
  if (cfg.S_y < 1 || cfg.S_y > cfg.L) throw std::invalid_argument("config: S_y out of range");
  if (cfg.S_ns < 0 || cfg.S_x + cfg.S_ns > cfg.L)
    throw std::invalid_argument("config: S_ns out of range");
  if (cfg.S_nq < 0 || cfg.S_y + cfg.S_nq > cfg.L)
    throw std::invalid_argument("config: S_nq out of range");
  if (!(cfg.sigma_x_sq > 0)) throw std::invalid_argument("config: sigma_x_sq must be positive");
  if (cfg.sigma_z_sq < 0 || cfg.cluster_variance < 0)
    throw std::invalid_argument("config: negative variance");
}

std::string leak_summary_json(const LeakSummary& s) {
  nlohmann::json j;
  j["kld"] = s.kld;
  j["delta"] = s.delta;
  j["passed"] = s.passed;
  j["accuracy"] = s.accuracy;
  j["ratio"] = s.ratio;
  return j.dump(2) + "\n";
}

std::string run_fig2(const std::vector<int>& Ns, const std::vector<int>& Sxs,
                     const std::vector<double>& sigma_ratios, int vectors, uint64_t seed) {
  if (vectors < 1) throw std::invalid_argument("fig2: need probe vectors");
  std::vector<int> ns = Ns, sxs = Sxs;
  std::vector<double> ratios = sigma_ratios;
  std::sort(ns.begin(), ns.end());
  std::sort(sxs.begin(), sxs.end());
  std::sort(ratios.begin(), ratios.end());

  CsvWriter csv({"schema_version", "N", "S_x", "sigma_ratio", "Sy_over_L"});
  for (int N : ns) {
    const Matrix W = random_row_orthonormal(N, N, seed + static_cast<uint64_t>(N));
    const Matrix X = gaussian_matrix(N, vectors, seed + static_cast<uint64_t>(N) + 1);
    for (int S_x : sxs) {
      for (double ratio : ratios) {
        NoiseModel noise{ratio * 1.0, 1.0};
        std::vector<int> sy(vectors);
#pragma omp parallel for schedule(dynamic)
        for (int v = 0; v < vectors; ++v) {
          uint64_t vs = seed ^ (static_cast<uint64_t>(N) << 32) ^
                        (static_cast<uint64_t>(S_x) << 20) ^
                        (static_cast<uint64_t>(std::lround(ratio * 1000)) << 8) ^
                        static_cast<uint64_t>(v);
          sy[v] = required_sparsity(W, X.col(v), noise, S_x, 40, vs).S_y;
        }
        double mean = 0.0;
        for (int v : sy) mean += v;
        mean /= static_cast<double>(vectors);
        csv.row({"1", std::to_string(N), std::to_string(S_x), format_double(ratio),
                 format_double(mean / N)});
      }
    }
  }
  return csv.str();
}

std::string run_fig4(const std::vector<double>& radii, const std::vector<int>& sns_grid,
                     const ExperimentConfig& cfg, int pairs) {
  validate(cfg);
  if (pairs < 2) throw std::invalid_argument("fig4: need pairs");
  for (int sns : sns_grid)
    if (sns < 0 || cfg.S_x + sns > cfg.L) throw std::invalid_argument("fig4: S_ns out of range");
  std::vector<double> rs = radii;
  std::vector<int> grid = sns_grid;
  std::sort(rs.begin(), rs.end());
  std::sort(grid.begin(), grid.end());

  const Matrix W = random_row_orthonormal(cfg.L, cfg.N, cfg.seed + 1);
  const Matrix X = gaussian_matrix(cfg.N, pairs, cfg.seed + 2);
  const CodeMatrix A = encode_columns(W, X, cfg.S_x);

  CsvWriter csv({"schema_version", "S_ns", "radius", "server_mean", "server_std", "client_mean",
                 "client_std"});
  for (int sns : grid) {
    const CodeMatrix Apub = ambiguize_columns(A, sns, cfg.seed + 3);
    for (double r : rs) {
      double sm = 0, ss = 0, cm = 0, cs = 0;
      for (int p = 0; p < pairs; ++p) {
        Rng rng(cfg.seed + 4 + static_cast<uint64_t>(p) * 2 +
                static_cast<uint64_t>(std::lround(r * 10)) * 100003);
        Vector y = point_at_distance(X.col(p), r, rng);
        TernaryCode b = ternary_encode(W, y, cfg.S_y);
        double server_sq = 0, client_sq = 0;
        for (int l = 0; l < cfg.L; ++l) {
          double da = static_cast<double>(Apub(l, p)) - static_cast<double>(b.values[l]);
          server_sq += da * da;
          double dt = static_cast<double>(A(l, p)) - static_cast<double>(b.values[l]);
          client_sq += dt * dt;
        }
        double sd = std::sqrt(server_sq), cd = std::sqrt(client_sq);
        sm += sd;
        ss += sd * sd;
        cm += cd;
        cs += cd * cd;
      }
      sm /= pairs;
      cm /= pairs;
      double sv = std::max(0.0, ss / pairs - sm * sm);
      double cv = std::max(0.0, cs / pairs - cm * cm);
      csv.row({"1", std::to_string(sns), format_double(r), format_double(sm),
               format_double(std::sqrt(sv)), format_double(cm), format_double(std::sqrt(cv))});
    }
  }
  return csv.str();
}

std::string run_fig5_table(const std::vector<int>& sx_grid, const std::vector<double>& beta_fracs,
                           const ExperimentConfig& cfg, LeakSummary* summary) {
  validate(cfg);
  std::vector<int> sxs = sx_grid;
  std::vector<double> fracs = beta_fracs;
  std::sort(sxs.begin(), sxs.end());
  std::sort(fracs.begin(), fracs.end());
  for (int sx : sxs)
    if (sx < 1 || sx > cfg.L) throw std::invalid_argument("fig5: S_x out of range");
  for (double f : fracs)
    if (f < 0.0 || f > 1.0) throw std::invalid_argument("fig5: beta fraction out of range");
  if (summary &&
      (std::find(fracs.begin(), fracs.end(), 0.0) == fracs.end() ||
       std::find(fracs.begin(), fracs.end(), 1.0) == fracs.end() ||
       std::find(sxs.begin(), sxs.end(), cfg.S_x) == sxs.end()))
    throw std::invalid_argument("fig5: summary needs fractions 0 and 1 and the config S_x");

  const int bins = 25;
  const FeatureMatrix data =
      gen_clustered(cfg.k, cfg.M / cfg.k, cfg.N, cfg.sigma_x_sq, cfg.cluster_variance, cfg.seed);
  const Matrix W = random_row_orthonormal(cfg.L, cfg.N, cfg.seed + 1);

  CsvWriter csv({"schema_version", "S_x", "alpha_x", "S_ns", "beta_x", "kld", "accuracy"});
  double kld0 = 0, kld_full = 0, acc_full = 0;
  for (int sx : sxs) {
    const CodeMatrix base = encode_columns(W, data.X, sx);
    for (double f : fracs) {
      const int sns = static_cast<int>(std::lround(f * (cfg.L - sx)));
      const CodeMatrix pub =
          sns > 0 ? ambiguize_columns(base, sns,
                                      cfg.seed + 7000 + static_cast<uint64_t>(sx) * 977 +
                                          static_cast<uint64_t>(sns))
                  : base;
      DistancePDFs pdfs = distance_pdfs(pub, data.labels, sx, sns, bins);
      LeakReport rep = kld_leak(pdfs, 0.0);
      ClusterAttackResult att =
          kmeans_attack(pub, cfg.k, data.labels, 20,
                        cfg.seed + 9000 + static_cast<uint64_t>(sx) * 977 +
                            static_cast<uint64_t>(sns));
      csv.row({"1", std::to_string(sx), format_double(static_cast<double>(sx) / cfg.L),
               std::to_string(sns), format_double(static_cast<double>(sns) / cfg.L),
               format_double(rep.kld), format_double(att.accuracy)});
      if (sx == cfg.S_x && f == 0.0) kld0 = rep.kld;
      if (sx == cfg.S_x && f == 1.0) {
        kld_full = rep.kld;
        acc_full = att.accuracy;
      }
    }
  }
  if (summary) {
    summary->kld = kld_full;
    summary->delta = 0.1 * kld0;
    summary->passed = kld_full <= summary->delta;
    summary->accuracy = acc_full;
    summary->ratio = kld0 > 0 ? kld_full / kld0 : 0.0;
  }
  return csv.str();
}

namespace {

void emit_entries(CsvWriter& csv, const std::string& section, const std::vector<RatioEntry>& tab,
                  int S_y, int L, int k) {
  for (const auto& e : tab) {
    const double x = static_cast<double>(S_y + e.S_ny) / L;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        csv.row({"1", section, format_double(e.beta_x), format_double(e.beta_y),
                 std::to_string(e.S_ns), std::to_string(e.S_ny), format_double(x),
                 std::to_string(i), std::to_string(j), format_double(e.means(i, j)),
                 format_double(e.d_diag), format_double(e.d_off), format_double(e.ratio)});
  }
}

}  // namespace

std::string run_table1_fig7(const ExperimentConfig& table_cfg,
                            const std::vector<double>& beta_x_grid,
                            const std::vector<double>& beta_y_grid,
                            const ExperimentConfig& curve_cfg, const std::vector<int>& snq_grid) {
  validate(table_cfg);
  validate(curve_cfg);
  std::vector<double> bxs = beta_x_grid, bys = beta_y_grid;
  std::sort(bxs.begin(), bxs.end());
  std::sort(bys.begin(), bys.end());
  std::vector<int> snqs = snq_grid;
  std::sort(snqs.begin(), snqs.end());

  CsvWriter csv({"schema_version", "section", "beta_x", "beta_y", "S_ns", "S_nq", "x", "row",
                 "col", "cell", "d_diag", "d_off", "ratio"});
  {
    const auto& cfg = table_cfg;
    FeatureMatrix data = gen_clustered(cfg.k, cfg.M / cfg.k, cfg.N, cfg.sigma_x_sq,
                                       cfg.cluster_variance, cfg.seed);
    Matrix W = random_row_orthonormal(cfg.L, cfg.N, cfg.seed + 1);
    NoiseModel noise{cfg.sigma_z_sq, cfg.sigma_x_sq};
    std::vector<RatioSetting> settings;
    for (double bx : bxs)
      for (double by : bys) settings.push_back({bx, by});
    auto tab = ratio_table(data, W, cfg.S_x, cfg.S_y, noise, settings, 40, cfg.seed + 2);
    emit_entries(csv, "table", tab, cfg.S_y, cfg.L, cfg.k);
  }
  {
    const auto& cfg = curve_cfg;
    FeatureMatrix data = gen_clustered(cfg.k, cfg.M / cfg.k, cfg.N, cfg.sigma_x_sq,
                                       cfg.cluster_variance, cfg.seed);
    Matrix W = random_row_orthonormal(cfg.L, cfg.N, cfg.seed + 1);
    NoiseModel noise{cfg.sigma_z_sq, cfg.sigma_x_sq};
    std::vector<RatioSetting> settings;
    for (int snq : snqs) {
      if (cfg.S_y + snq > cfg.L) throw std::invalid_argument("fig7: S_nq out of range");
      double b = static_cast<double>(snq) / cfg.L;
      settings.push_back({b, b});
    }
    auto tab = ratio_table(data, W, cfg.S_x, cfg.S_y, noise, settings, 40, cfg.seed + 2);
    emit_entries(csv, "curve", tab, cfg.S_y, cfg.L, cfg.k);
  }
  return csv.str();
}

ExperimentConfig table1_defaults() {
  ExperimentConfig cfg;
  cfg.cluster_variance = 1e-6;  // see the recorded fixtures; the published
                                // disclosure table needs near-identical members
  return cfg;
}

ExperimentConfig fig7_defaults() {
  ExperimentConfig cfg;
  cfg.S_y = 12;
  cfg.cluster_variance = 1e-5;
  return cfg;
}

std::vector<double> table1_beta_x_grid() { return {10.0 / 256, 246.0 / 256}; }

std::vector<double> table1_beta_y_grid() { return {10.0 / 256, 40.0 / 256, 246.0 / 256}; }

std::vector<int> fig7_snq_grid() { return {0, 2, 4, 10, 20, 40, 80, 140, 200, 244}; }

}  // namespace stc
