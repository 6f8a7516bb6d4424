#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "stc/types.hpp"

namespace stc {

// Position-major inverted index over the public codes: for every position l,
// the sorted ids carrying +1 there and the sorted ids carrying -1. This is all
// the server ever holds; true supports stay with the data owner.
struct PublicDatabase {
  int L = 0;
  uint32_t M = 0;
  double density = 0.0;  // mean support fraction (S_x + S_ns) / L
  uint64_t created_unix = 0;
  std::vector<std::vector<uint32_t>> plus;
  std::vector<std::vector<uint32_t>> minus;

  bool operator==(const PublicDatabase&) const = default;
};

// Build the index from public codes (one column per item).
PublicDatabase enroll(const CodeMatrix& public_codes, uint64_t created_unix = 0);

// Append more codes to an existing index; lengths must match.
void enroll_append(PublicDatabase& db, const CodeMatrix& public_codes);

// Invert the index back to a code matrix (index/list duality).
CodeMatrix reconstruct_codes(const PublicDatabase& db);

// File format: magic "STCDB1", L u32, M u32, density f64, created u64, then
// per position the plus and minus lists, each varint count + varint-delta ids.
// Little-endian scalars.
void save_database(const PublicDatabase& db, const std::string& path);
PublicDatabase load_database(const std::string& path);

// Structural invariants: sorted strictly increasing lists, ids < M, no id on
// both signs of one position. Throws on violation.
void validate_database(const PublicDatabase& db);

}  // namespace stc
