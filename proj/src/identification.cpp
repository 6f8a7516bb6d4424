#include "stc/identification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "stc/kernels.hpp"
#include "stc/rng.hpp"

namespace stc {

CandidateList private_decode(const TernaryCode& b, const CodeMatrix& db_codes, double gamma,
                             Exec exec) {
  if (gamma < 0) throw std::invalid_argument("private_decode: negative gamma");
  const double cap = gamma * static_cast<double>(db_codes.rows());
  std::vector<int> d = sqdist_to_all(db_codes, b.values, exec);
  CandidateList out;
  out.threshold = cap;
  for (size_t m = 0; m < d.size(); ++m)
    if (static_cast<double>(d[m]) <= cap)
      out.entries.emplace_back(static_cast<uint32_t>(m), static_cast<double>(d[m]));
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });
  if (!out.entries.empty()) {
    out.decision = Decision::H1;
    out.match_id = out.entries.front().first;
  }
  return out;
}

QueryRequest build_query(const Vector& y, const Matrix& W, int S_y, int S_nq, uint64_t seed) {
  const int L = static_cast<int>(W.rows());
  if (S_nq < 0) throw std::invalid_argument("build_query: negative decoy count");
  if (S_y + S_nq > L) throw std::runtime_error("query overflow");
  TernaryCode b = ternary_encode(W, y, S_y);
  QueryRequest req;
  req.true_positions = b.support;
  for (int l : b.support) req.true_signs.push_back(b.values[l]);

  std::vector<int> complement;
  complement.reserve(L - b.sparsity);
  for (int l = 0; l < L; ++l)
    if (b.values[l] == 0) complement.push_back(l);
  Rng rng(seed);
  const int n = static_cast<int>(complement.size());
  for (int s = 0; s < S_nq; ++s) {
    int r = s + static_cast<int>(rng.below(static_cast<uint64_t>(n - s)));
    std::swap(complement[s], complement[r]);
    req.decoy_positions.push_back(complement[s]);
  }
  std::sort(req.decoy_positions.begin(), req.decoy_positions.end());

  req.positions.reserve(req.true_positions.size() + req.decoy_positions.size());
  std::merge(req.true_positions.begin(), req.true_positions.end(), req.decoy_positions.begin(),
             req.decoy_positions.end(), std::back_inserter(req.positions));
  return req;
}

PositionLists server_lookup(const std::vector<int>& positions, const PublicDatabase& db) {
  PositionLists lists;
  lists.positions = positions;
  lists.plus.reserve(positions.size());
  lists.minus.reserve(positions.size());
  for (int l : positions) {
    if (l < 0 || l >= db.L) throw std::out_of_range("position " + std::to_string(l));
    lists.plus.push_back(db.plus[l]);
    lists.minus.push_back(db.minus[l]);
  }
  return lists;
}

CandidateList aggregate_scores(const PositionLists& lists, const QueryRequest& req, uint32_t M,
                               int score_threshold) {
  std::unordered_map<int, size_t> where;
  for (size_t i = 0; i < lists.positions.size(); ++i) where[lists.positions[i]] = i;
  std::vector<int> score(M, 0);
  for (size_t t = 0; t < req.true_positions.size(); ++t) {
    auto it = where.find(req.true_positions[t]);
    if (it == where.end()) throw std::invalid_argument("aggregate_scores: missing position");
    int sign = req.true_signs[t];
    for (uint32_t id : lists.plus[it->second]) {
      if (id >= M) throw std::out_of_range("aggregate_scores: id out of range");
      score[id] += sign;
    }
    for (uint32_t id : lists.minus[it->second]) {
      if (id >= M) throw std::out_of_range("aggregate_scores: id out of range");
      score[id] -= sign;
    }
  }
  const int S_y = static_cast<int>(req.true_positions.size());
  const int cut = score_threshold >= 0 ? score_threshold : (S_y + 1) / 2;
  CandidateList out;
  out.threshold = static_cast<double>(cut);
  for (uint32_t m = 0; m < M; ++m)
    if (score[m] > 0) out.entries.emplace_back(m, static_cast<double>(score[m]));
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  if (!out.entries.empty() && out.entries.front().second >= cut) {
    out.decision = Decision::H1;
    out.match_id = out.entries.front().first;
  }
  return out;
}

CommunicationCost communication_cost(double M, double density, int positions) {
  if (density < 0.0 || density > 1.0)
    throw std::invalid_argument("communication_cost: density out of range");
  if (positions < 0) throw std::invalid_argument("communication_cost: negative positions");
  CommunicationCost c;
  c.bits = M * density * static_cast<double>(positions);
  c.megabytes = c.bits / 8.0 / 1e6;
  return c;
}

}  // namespace stc
