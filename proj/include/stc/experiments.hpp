#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "stc/privacy.hpp"
#include "stc/types.hpp"

namespace stc {

// One bag of knobs shared by the experiment commands; each command reads the
// subset it needs and documents its own defaults.
struct ExperimentConfig {
  int N = 512;
  int L = 256;
  int M = 1000;
  int k = 4;
  int S_x = 10;
  int S_y = 10;
  int S_ns = 0;
  int S_nq = 0;
  double sigma_x_sq = 1.0;
  double sigma_z_sq = 0.15;
  double cluster_variance = 0.1;
  uint64_t seed = 42;
  std::string out_path;
};

// counts within their dimensional ceilings, variances where required
void validate(const ExperimentConfig& cfg);

// Headline numbers of the leak sweep, serialized next to the fig5 CSV.
// ratio = full-ambiguization KLD over beta_x = 0 KLD at the config's S_x;
// delta = the leak threshold (0.1 x the beta_x = 0 KLD), passed = kld <= delta.
struct LeakSummary {
  double kld = 0.0;
  double delta = 0.0;
  bool passed = false;
  double accuracy = 0.0;
  double ratio = 0.0;
};
std::string leak_summary_json(const LeakSummary& s);

// Required query sparsity against noise. One row per (N, S_x, sigma_ratio)
// with Sy_over_L averaged over `vectors` probes; square transforms, L = N.
std::string run_fig2(const std::vector<int>& Ns, const std::vector<int>& Sxs,
                     const std::vector<double>& sigma_ratios, int vectors, uint64_t seed);

// Server-side vs client-side view of code distances under ambiguization.
// Pairs at each input radius; the client view strips decoys via the true
// support, so its columns must not move across the S_ns grid.
std::string run_fig4(const std::vector<double>& radii, const std::vector<int>& sns_grid,
                     const ExperimentConfig& cfg, int pairs);

// Leak table: rows S_x (alpha_x = S_x/L), columns beta fractions of the
// available complement (S_ns = frac * (L - S_x)). Each cell: KLD of the
// distance histograms and the clustering-attack accuracy. The summary, when
// requested, reads the cfg.S_x row.
std::string run_fig5_table(const std::vector<int>& sx_grid, const std::vector<double>& beta_fracs,
                           const ExperimentConfig& cfg, LeakSummary* summary);

// Disclosure table over the (beta_x, beta_y) grid at table_cfg, then the
// decoy-convergence curve at curve_cfg: beta_x = beta_y = S_nq/L sweeping
// snq_grid, x = (S_y + S_nq)/L. One long-format CSV, both sections.
std::string run_table1_fig7(const ExperimentConfig& table_cfg, const std::vector<double>& beta_x_grid,
                            const std::vector<double>& beta_y_grid,
                            const ExperimentConfig& curve_cfg, const std::vector<int>& snq_grid);

// The calibrated defaults behind the table1 subcommand (also what the
// acceptance run uses).
ExperimentConfig table1_defaults();
ExperimentConfig fig7_defaults();
std::vector<double> table1_beta_x_grid();
std::vector<double> table1_beta_y_grid();
std::vector<int> fig7_snq_grid();

}  // namespace stc
