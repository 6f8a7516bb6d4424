#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <ctime>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "stc/ambiguization.hpp"
#include "stc/coding.hpp"
#include "stc/database.hpp"
#include "stc/experiments.hpp"
#include "stc/identification.hpp"
#include "stc/io.hpp"
#include "stc/kernels.hpp"
#include "stc/net.hpp"
#include "stc/rng.hpp"
#include "stc/synthetic.hpp"
#include "stc/transform.hpp"

namespace {

std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }

bool is_endpoint(const std::string& s) { return s.find(':') != std::string::npos; }

std::pair<std::string, uint16_t> split_endpoint(const std::string& s) {
  auto pos = s.rfind(':');
  int port = std::stoi(s.substr(pos + 1));
  if (port < 1 || port > 65535) throw std::runtime_error("bad port in " + s);
  std::string host = s.substr(0, pos);
  return {host.empty() ? std::string("127.0.0.1") : host, static_cast<uint16_t>(port)};
}

stc::SparsifyingTransform make_transform(const stc::Matrix& X, int L, int S_x, uint64_t key) {
  const int N = static_cast<int>(X.rows());
  if (L == N) return stc::learn_transform(X, stc::key_from_seed(N, key), S_x);
  stc::SparsifyingTransform t;
  t.W = stc::random_row_orthonormal(L, N, key);
  t.key_id = stc::key_fingerprint(stc::key_from_seed(N, key).K);
  t.converged = true;
  return t;
}

stc::Matrix load_or_derive_transform(const std::string& path, int L, int N, uint64_t key) {
  try {
    return stc::load_transform(path).W;
  } catch (const std::exception&) {
    if (L == N)
      throw std::runtime_error("transform file " + path +
                               " not readable and square transforms cannot be re-derived "
                               "from the key alone");
    std::printf("note: deriving keyed transform (no file at %s)\n", path.c_str());
    return stc::random_row_orthonormal(L, N, key);
  }
}

void write_out(const std::string& path, const std::string& text) {
  stc::write_text_file(path, text);
  std::printf("wrote %s\n", path.c_str());
}

void print_candidates(const stc::CandidateList& cand, bool ascending) {
  std::printf("%zu candidate(s), threshold %.4g\n", cand.entries.size(), cand.threshold);
  const size_t show = std::min<size_t>(cand.entries.size(), 10);
  for (size_t i = 0; i < show; ++i)
    std::printf("  %2zu. id=%u  %s=%.6g\n", i + 1, cand.entries[i].first,
                ascending ? "dist2" : "score", cand.entries[i].second);
  if (cand.entries.size() > show) std::printf("  ... %zu more\n", cand.entries.size() - show);
  if (cand.decision == stc::Decision::H1)
    std::printf("decision: H1 (id=%u)\n", cand.match_id);
  else
    std::printf("decision: H0\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse ternary code toolbox"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file with defaults for any option");

  uint64_t seed = 42;
  std::string out;
  app.add_option("--seed", seed, "master seed; every command is deterministic in it");
  app.add_option("--out", out, "output path (per-command default otherwise)");

  // gen
  auto* gen = app.add_subcommand("gen", "write a clustered synthetic dataset");
  int g_k = 4, g_per = 250, g_dim = 512;
  double g_center = 1.0, g_within = 0.1;
  gen->add_option("--clusters", g_k, "cluster count")->check(CLI::PositiveNumber);
  gen->add_option("--per-cluster", g_per, "items per cluster")->check(CLI::PositiveNumber);
  gen->add_option("--dim", g_dim, "feature dimension")->check(CLI::PositiveNumber);
  gen->add_option("--center-var", g_center, "cluster-center variance");
  gen->add_option("--within-var", g_within, "within-cluster variance");

  // learn
  auto* learn = app.add_subcommand("learn", "learn a square sparsifying transform");
  std::string l_data;
  int l_sx = 10, l_iters = 50;
  double l_tol = 1e-6;
  uint64_t l_key = 0;
  bool l_key_set = false;
  learn->add_option("--data", l_data, "dataset csv")->required();
  learn->add_option("--sparsity", l_sx, "S_x used during learning")->check(CLI::PositiveNumber);
  learn->add_option("--key", l_key, "key seed (defaults to --seed)")
      ->each([&](const std::string&) { l_key_set = true; });
  learn->add_option("--max-iters", l_iters, "iteration cap");
  learn->add_option("--tol", l_tol, "relative objective tolerance");

  // enroll
  auto* enroll = app.add_subcommand("enroll", "encode, ambiguize and store a dataset");
  std::string e_db, e_data, e_transform;
  int e_rows = 256, e_sx = 10, e_sns = 0;
  uint64_t e_key = 0;
  bool e_key_set = false;
  enroll->add_option("--db", e_db, "database file, or host:port of a running server")->required();
  enroll->add_option("--data", e_data, "dataset csv")->required();
  enroll->add_option("--rows", e_rows, "code length L")->check(CLI::PositiveNumber);
  enroll->add_option("--sparsity", e_sx, "S_x")->check(CLI::PositiveNumber);
  enroll->add_option("--amb", e_sns, "S_ns noise entries per stored code");
  enroll->add_option("--key", e_key, "key seed (defaults to --seed)")
      ->each([&](const std::string&) { e_key_set = true; });
  enroll->add_option("--transform-out", e_transform, "where to save the transform");

  // query
  auto* query = app.add_subcommand("query", "identify one probe against a database");
  std::string q_db, q_data, q_transform, q_mode = "private";
  int q_index = 0, q_rows = 256, q_sy = 10, q_snq = 0, q_esx = 10;
  double q_noise = 0.0, q_gamma = -1.0;
  uint64_t q_key = 0;
  bool q_key_set = false;
  query->add_option("--db", q_db, "database file, or host:port")->required();
  query->add_option("--data", q_data, "dataset csv the probe comes from")->required();
  query->add_option("--index", q_index, "which dataset column to probe");
  query->add_option("--noise", q_noise, "query noise variance sigma_z^2");
  query->add_option("--sparsity", q_sy, "S_y")->check(CLI::PositiveNumber);
  query->add_option("--decoys", q_snq, "S_nq decoy positions");
  query->add_option("--enroll-sparsity", q_esx, "S_x the database was enrolled with");
  query->add_option("--gamma", q_gamma, "distance cap as a fraction of L (default: bound midpoint)");
  query->add_option("--rows", q_rows, "code length L")->check(CLI::PositiveNumber);
  query->add_option("--transform", q_transform, "transform file (default <db>.w)");
  query->add_option("--mode", q_mode, "private | public")
      ->check(CLI::IsMember({"private", "public"}));
  query->add_option("--key", q_key, "key seed (defaults to --seed)")
      ->each([&](const std::string&) { q_key_set = true; });

  // experiment commands
  auto* fig2 = app.add_subcommand("fig2", "required query sparsity vs noise, as csv");
  std::vector<int> f2_dims{500, 1000, 1500}, f2_sx{10, 40};
  std::vector<double> f2_ratios{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
  int f2_vectors = 16;
  fig2->add_option("--dims", f2_dims, "N grid");
  fig2->add_option("--sparsities", f2_sx, "S_x grid");
  fig2->add_option("--ratios", f2_ratios, "sigma_z^2/sigma_x^2 grid");
  fig2->add_option("--vectors", f2_vectors, "probe vectors per cell");

  auto* fig4 = app.add_subcommand("fig4", "server vs owner view of distances, as csv");
  std::vector<double> f4_radii{2.1, 5.8};
  std::vector<int> f4_sns{0, 62, 123, 185, 246};
  int f4_pairs = 300;
  fig4->add_option("--radii", f4_radii, "probe distances");
  fig4->add_option("--amb-grid", f4_sns, "S_ns grid");
  fig4->add_option("--pairs", f4_pairs, "probe pairs per cell");

  auto* fig5 = app.add_subcommand("fig5", "privacy leak table, as csv plus a json verdict");
  std::vector<int> f5_sx{10, 20, 40};
  std::vector<double> f5_fracs{0.0, 0.25, 0.5, 0.75, 1.0};
  double f5_within = 0.1;
  fig5->add_option("--sparsities", f5_sx, "S_x grid");
  fig5->add_option("--fracs", f5_fracs, "ambiguization fractions of L-S_x");
  fig5->add_option("--within-var", f5_within, "dataset within-cluster variance");

  auto* table1 = app.add_subcommand("table1", "pairwise disclosure grid and decoy sweep, as csv");

  // serve
  auto* serve = app.add_subcommand("serve", "run the storage endpoint");
  stc::ServerConfig scfg;
  scfg.port = 7700;
  serve->add_option("--port", scfg.port, "listen port (0 picks one)");
  serve->add_option("--db-path", scfg.db_path, "persist enrollments here (STC_DB overrides)");
  serve->add_flag("--readonly", scfg.readonly, "refuse enrollments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto data = stc::gen_clustered(g_k, g_per, g_dim, g_center, g_within, seed);
      const std::string path = out.empty() ? "dataset.csv" : out;
      stc::save_dataset(data, path);
      std::printf("wrote %s: %d vectors, dim %d, %d clusters\n", path.c_str(),
                  static_cast<int>(data.X.cols()), g_dim, g_k);
    } else if (*learn) {
      auto data = stc::load_dataset(l_data);
      const int N = static_cast<int>(data.X.rows());
      stc::LearnOptions opts;
      opts.max_iters = l_iters;
      opts.rel_tol = l_tol;
      auto t = stc::learn_transform(data.X, stc::key_from_seed(N, l_key_set ? l_key : seed), l_sx,
                                    opts);
      const std::string path = out.empty() ? "transform.stcw" : out;
      stc::save_transform(t, path);
      std::printf("wrote %s: %d iterations, converged=%d, objective %.6g -> %.6g\n", path.c_str(),
                  t.iterations, t.converged ? 1 : 0, t.objective_trace.front(),
                  t.objective_trace.back());

      // approximation quality in place of per-component plots: relative
      // reconstruction error and the support stability of a re-encoded round trip
      const stc::Matrix A = stc::sparse_code_step(t.W, data.X, l_sx);
      double err_mean = 0, err_sq = 0, overlap = 0;
      const int M = static_cast<int>(data.X.cols());
      for (int m = 0; m < M; ++m) {
        const stc::Vector xhat = t.W.transpose() * A.col(m);
        const double rel = (data.X.col(m) - xhat).norm() / data.X.col(m).norm();
        err_mean += rel;
        err_sq += rel * rel;
        auto a = stc::ternary_encode(t.W, data.X.col(m), l_sx);
        auto ahat = stc::ternary_encode(t.W, xhat, l_sx);
        int common = 0;
        for (size_t i = 0, j = 0; i < a.support.size() && j < ahat.support.size();)
          if (a.support[i] < ahat.support[j])
            ++i;
          else if (a.support[i] > ahat.support[j])
            ++j;
          else
            ++common, ++i, ++j;
        overlap += static_cast<double>(common) / l_sx;
      }
      err_mean /= M;
      overlap /= M;
      double err_std = std::sqrt(std::max(0.0, err_sq / M - err_mean * err_mean));
      std::printf("relative error %.4f +/- %.4f, support overlap %.4f\n", err_mean, err_std,
                  overlap);
    } else if (*enroll) {
      auto data = stc::load_dataset(e_data);
      const int N = static_cast<int>(data.X.rows());
      const uint64_t key = e_key_set ? e_key : seed;
      auto t = make_transform(data.X, e_rows, e_sx, key);
      const std::string tpath =
          !e_transform.empty() ? e_transform
                               : (is_endpoint(e_db) ? std::string("transform.stcw") : e_db + ".w");
      stc::save_transform(t, tpath);
      auto codes = stc::encode_columns(t.W, data.X, e_sx);
      auto pub = stc::ambiguize_columns(codes, e_sns, seed);
      if (is_endpoint(e_db)) {
        auto [host, port] = split_endpoint(e_db);
        stc::StorageClient client(host, port);
        uint32_t total = stc::remote_enroll(client, pub);
        std::printf("enrolled %d items at %s, server now holds %u\n",
                    static_cast<int>(pub.cols()), e_db.c_str(), total);
      } else {
        stc::PublicDatabase db;
        bool appended = false;
        try {
          db = stc::load_database(e_db);
          stc::enroll_append(db, pub);
          appended = true;
        } catch (const std::exception&) {
          db = stc::enroll(pub, static_cast<uint64_t>(std::time(nullptr)));
        }
        stc::save_database(db, e_db);
        std::printf("%s %d items into %s (L=%d, density %.4f), %u total\n",
                    appended ? "appended" : "enrolled", static_cast<int>(pub.cols()),
                    e_db.c_str(), db.L, db.density, db.M);
      }
      std::printf("transform saved to %s\n", tpath.c_str());
    } else if (*query) {
      auto data = stc::load_dataset(q_data);
      const int N = static_cast<int>(data.X.rows());
      if (q_index < 0 || q_index >= data.X.cols())
        throw std::runtime_error("--index outside the dataset");
      const bool remote = is_endpoint(q_db);
      const std::string tpath =
          !q_transform.empty() ? q_transform
                               : (remote ? std::string("transform.stcw") : q_db + ".w");
      const uint64_t key = q_key_set ? q_key : seed;
      const stc::Matrix W = load_or_derive_transform(tpath, q_rows, N, key);
      const int L = static_cast<int>(W.rows());

      stc::Vector y = data.X.col(q_index);
      if (q_noise > 0.0) {
        stc::Rng rng(seed + static_cast<uint64_t>(q_index));
        const double sd = std::sqrt(q_noise);
        for (int i = 0; i < N; ++i) y[i] += sd * rng.gaussian();
      }
      auto req = stc::build_query(y, W, q_sy, q_snq, seed);
      const auto bounds = stc::ternary_distance_bounds(q_esx, q_sy);
      const double gammaL =
          q_gamma >= 0.0 ? q_gamma * L : 0.5 * (bounds.lower + bounds.upper);
      std::printf("probe %d: %d positions disclosed, gamma*L = %.4g, mode %s\n", q_index,
                  static_cast<int>(req.positions.size()), gammaL, q_mode.c_str());

      stc::CandidateList cand;
      if (q_mode == "private") {
        auto b = stc::ternary_encode(W, y, q_sy);
        if (remote) {
          auto [host, port] = split_endpoint(q_db);
          stc::StorageClient client(host, port);
          std::vector<int8_t> code(b.values.data(), b.values.data() + b.values.size());
          cand.entries = stc::remote_query_full(client, code, gammaL);
          cand.threshold = gammaL;
          if (!cand.entries.empty()) {
            cand.decision = stc::Decision::H1;
            cand.match_id = cand.entries.front().first;
          }
        } else {
          auto db = stc::load_database(q_db);
          cand = stc::private_decode(b, stc::reconstruct_codes(db), gammaL / L);
        }
        print_candidates(cand, true);
      } else {
        stc::PositionLists lists;
        uint32_t M = 0;
        if (remote) {
          auto [host, port] = split_endpoint(q_db);
          stc::StorageClient client(host, port);
          lists = stc::remote_query_positions(client, req.positions);
          for (const auto& l : lists.plus)
            for (uint32_t id : l) M = std::max(M, id + 1);
          for (const auto& l : lists.minus)
            for (uint32_t id : l) M = std::max(M, id + 1);
        } else {
          auto db = stc::load_database(q_db);
          lists = stc::server_lookup(req.positions, db);
          M = db.M;
        }
        cand = stc::aggregate_scores(lists, req, M);
        print_candidates(cand, false);
      }
    } else if (*fig2) {
      write_out(out.empty() ? "fig2.csv" : out,
                stc::run_fig2(f2_dims, f2_sx, f2_ratios, f2_vectors, seed));
    } else if (*fig4) {
      stc::ExperimentConfig cfg;
      cfg.seed = seed;
      write_out(out.empty() ? "fig4.csv" : out, stc::run_fig4(f4_radii, f4_sns, cfg, f4_pairs));
    } else if (*fig5) {
      stc::ExperimentConfig cfg = stc::table1_defaults();
      cfg.cluster_variance = f5_within;
      cfg.seed = seed;
      stc::LeakSummary summary;
      const bool want_summary = std::find(f5_fracs.begin(), f5_fracs.end(), 0.0) != f5_fracs.end() &&
                                std::find(f5_fracs.begin(), f5_fracs.end(), 1.0) != f5_fracs.end() &&
                                std::find(f5_sx.begin(), f5_sx.end(), cfg.S_x) != f5_sx.end();
      const std::string csv =
          stc::run_fig5_table(f5_sx, f5_fracs, cfg, want_summary ? &summary : nullptr);
      const std::string path = out.empty() ? "fig5.csv" : out;
      write_out(path, csv);
      if (want_summary) {
        const std::string js = stc::leak_summary_json(summary);
        write_out(path + ".json", js);
        std::fputs(js.c_str(), stdout);
      }
    } else if (*table1) {
      stc::ExperimentConfig tcfg = stc::table1_defaults(), ccfg = stc::fig7_defaults();
      tcfg.seed = seed;
      ccfg.seed = seed;
      write_out(out.empty() ? "table1.csv" : out,
                stc::run_table1_fig7(tcfg, stc::table1_beta_x_grid(), stc::table1_beta_y_grid(),
                                     ccfg, stc::fig7_snq_grid()));
    } else if (*serve) {
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      stc::StorageServer server(scfg);
      std::printf("listening on port %u, db %s%s\n", server.port(),
                  server.db_path().empty() ? "(memory only)" : server.db_path().c_str(),
                  scfg.readonly ? ", readonly" : "");
      std::fflush(stdout);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      std::printf("stopped, %u items held\n", server.item_count());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
