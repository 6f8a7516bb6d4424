#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "stc/identification.hpp"
#include "stc/kernels.hpp"
#include "stc/privacy.hpp"
#include "stc/rng.hpp"
#include "stc/synthetic.hpp"
#include "stc/transform.hpp"

using namespace stc;
using clock_t_ = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps = 3) {
  fn();  // warm caches and the thread pool
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = clock_t_::now();
    fn();
    auto t1 = clock_t_::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-36s %10.2f %12.2f %8.2fx  %s\n", name.c_str(), serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "yes" : "NO");
}

// random ternary codes straight from the generator; cheaper than encoding a
// matching feature matrix at benchmark scale
CodeMatrix make_codes(int L, int M, int S, uint64_t seed) {
  CodeMatrix out = CodeMatrix::Zero(L, M);
  std::vector<int> idx(L);
  for (int m = 0; m < M; ++m) {
    Rng rng(seed + static_cast<uint64_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < S; ++i) {
      int j = i + static_cast<int>(rng.below(static_cast<uint64_t>(L - i)));
      std::swap(idx[i], idx[j]);
      out(idx[i], m) = static_cast<int8_t>(rng.coin_sign());
    }
  }
  return out;
}

}  // namespace

int main() {
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
  std::printf("%-36s %10s %12s %9s  %s\n", "kernel", "serial_ms", "parallel_ms", "speedup",
              "identical");

  {
    const Matrix W = random_row_orthonormal(256, 512, 1);
    const Matrix X = gaussian_matrix(512, 4000, 2);
    CodeMatrix a, b;
    double s = time_ms([&] { a = encode_columns(W, X, 10, Exec::serial); });
    double p = time_ms([&] { b = encode_columns(W, X, 10, Exec::parallel); });
    report("encode_columns 256x512, M=4000", s, p, a == b);

    CodeMatrix aa, ab;
    double s2 = time_ms([&] { aa = ambiguize_columns(a, 123, 7, Exec::serial); });
    double p2 = time_ms([&] { ab = ambiguize_columns(b, 123, 7, Exec::parallel); });
    report("ambiguize_columns S_ns=123, M=4000", s2, p2, aa == ab);
  }

  {
    const Matrix W = random_row_orthonormal(512, 512, 3);
    const Matrix X = gaussian_matrix(512, 4000, 4);
    Matrix a, b;
    double s = time_ms([&] { a = sparse_code_step(W, X, 10, Exec::serial); });
    double p = time_ms([&] { b = sparse_code_step(W, X, 10, Exec::parallel); });
    report("sparse_code_step 512x512, M=4000", s, p, a == b);
  }

  {
    const CodeMatrix db = make_codes(256, 200000, 26, 11);
    const CodeMatrix probe_m = make_codes(256, 1, 10, 12);
    const Eigen::Matrix<int8_t, Eigen::Dynamic, 1> probe = probe_m.col(0);
    std::vector<int> a, b;
    double s = time_ms([&] { a = sqdist_to_all(db, probe, Exec::serial); });
    double p = time_ms([&] { b = sqdist_to_all(db, probe, Exec::parallel); });
    report("sqdist_to_all L=256, M=200000", s, p, a == b);

    std::vector<int> positions(16);
    std::iota(positions.begin(), positions.end(), 40);
    Vector ra, rb;
    double s2 = time_ms([&] { ra = restricted_distances(db, probe, positions, Exec::serial); });
    double p2 = time_ms([&] { rb = restricted_distances(db, probe, positions, Exec::parallel); });
    report("restricted_distances 16 pos", s2, p2, ra == rb);

    TernaryCode bcode;
    bcode.values = probe;
    for (int l = 0; l < 256; ++l)
      if (probe[l] != 0) bcode.support.push_back(l);
    bcode.sparsity = static_cast<int>(bcode.support.size());
    CandidateList ca, cb;
    double s3 = time_ms([&] { ca = private_decode(bcode, db, 40.0 / 256, Exec::serial); });
    double p3 = time_ms([&] { cb = private_decode(bcode, db, 40.0 / 256, Exec::parallel); });
    report("private_decode M=200000", s3, p3,
           ca.entries == cb.entries && ca.decision == cb.decision);
  }

  {
    const CodeMatrix codes = make_codes(256, 3000, 26, 13);
    std::vector<int32_t> labels(3000);
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int32_t>(i % 4);
    PairDistances a, b;
    double s = time_ms([&] { a = pairwise_sqdist_by_label(codes, labels, Exec::serial); });
    double p = time_ms([&] { b = pairwise_sqdist_by_label(codes, labels, Exec::parallel); });
    report("pairwise_sqdist M=3000", s, p, a.intra == b.intra && a.inter == b.inter);

    DistancePDFs pa, pb;
    double s2 = time_ms([&] { pa = distance_pdfs(codes, labels, 10, 16, 25, Exec::serial); });
    double p2 = time_ms([&] { pb = distance_pdfs(codes, labels, 10, 16, 25, Exec::parallel); });
    report("distance_pdfs M=3000", s2, p2,
           pa.intra.mass == pb.intra.mass && pa.inter.mass == pb.inter.mass);
  }

  {
    const Matrix points = gaussian_matrix(256, 50000, 14);
    const Matrix centroids = gaussian_matrix(256, 16, 15);
    std::vector<int> a, b;
    double ea = 0, eb = 0;
    double s = time_ms([&] { ea = assign_to_centroids(points, centroids, a, Exec::serial); });
    double p = time_ms([&] { eb = assign_to_centroids(points, centroids, b, Exec::parallel); });
    report("assign_to_centroids 50000x16", s, p, a == b && ea == eb);
  }

  return 0;
}
