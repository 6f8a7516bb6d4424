#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "stc/coding.hpp"
#include "stc/database.hpp"
#include "stc/types.hpp"

namespace stc {

// What the client discloses is `positions` alone; the split into true and
// decoy positions and the signs never leave the client.
struct QueryRequest {
  std::vector<int> positions;        // sorted union, card = S_y + S_nq
  std::vector<int> true_positions;   // sorted, secret
  std::vector<int8_t> true_signs;    // aligned with true_positions, secret
  std::vector<int> decoy_positions;  // sorted, secret
};

struct PositionLists {
  std::vector<int> positions;  // echoes the request order
  std::vector<std::vector<uint32_t>> plus;
  std::vector<std::vector<uint32_t>> minus;

  bool operator==(const PositionLists&) const = default;
};

enum class Decision { H0, H1 };

struct CandidateList {
  // (id, squared code distance) ascending for private decoding,
  // (id, aggregated score) descending for public decoding
  std::vector<std::pair<uint32_t, double>> entries;
  double threshold = 0.0;  // gamma*L respectively the score cut actually used
  Decision decision = Decision::H0;
  uint32_t match_id = 0;   // meaningful only under H1
};

// gamma-list decoder on full codes: all items with ||a(m) - b||^2 <= gamma*L,
// ascending by distance (ties by id). H1 iff the list is nonempty.
CandidateList private_decode(const TernaryCode& b, const CodeMatrix& db_codes, double gamma,
                             Exec exec = Exec::parallel);

// Encode y at S_y, then hide the support among S_nq decoys drawn uniformly
// without replacement from the complement. Throws "query overflow" when
// S_y + S_nq exceeds L.
QueryRequest build_query(const Vector& y, const Matrix& W, int S_y, int S_nq, uint64_t seed);

// Exact posting lists for the requested positions; read-only.
PositionLists server_lookup(const std::vector<int>& positions, const PublicDatabase& db);

// Drop decoy lists, then score(m) = sum over true positions of sign * vote.
// Only items with positive net score are listed. score_threshold < 0 selects
// the default ceil(S_y / 2).
CandidateList aggregate_scores(const PositionLists& lists, const QueryRequest& req, uint32_t M,
                               int score_threshold = -1);

struct CommunicationCost {
  double bits = 0.0;
  double megabytes = 0.0;  // at 8 bits/byte, 1e6 bytes/MB
};
// Volume of the returned lists counted at one bit per id-slot:
// M * density * positions.
CommunicationCost communication_cost(double M, double density, int positions);

}  // namespace stc
