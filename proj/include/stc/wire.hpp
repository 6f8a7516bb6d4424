#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stc/identification.hpp"
#include "stc/types.hpp"

namespace stc {

// Frame = u32 little-endian payload length, u8 type tag, payload. Integers are
// little-endian throughout; posting lists travel varint-delta encoded.
enum class MsgType : uint8_t {
  ENROLL = 1,
  QUERY_POSITIONS = 2,
  QUERY_FULL = 3,
  LISTS = 4,
  SHORTLIST = 5,
  ERR = 6,
};

struct Frame {
  MsgType type;
  std::vector<uint8_t> payload;
};

// --- little-endian scalar helpers -----------------------------------------
void put_u16(std::vector<uint8_t>& out, uint16_t v);
void put_u32(std::vector<uint8_t>& out, uint32_t v);
void put_u64(std::vector<uint8_t>& out, uint64_t v);
void put_f64(std::vector<uint8_t>& out, double v);

// Cursor over a received payload; every reader throws on truncation.
struct ByteReader {
  const uint8_t* p;
  size_t n;
  size_t off = 0;
  explicit ByteReader(const std::vector<uint8_t>& buf) : p(buf.data()), n(buf.size()) {}
  void need(size_t k) const {
    if (off + k > n) throw std::runtime_error("wire: truncated payload");
  }
  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  double f64();
  uint64_t varint();
  bool done() const { return off == n; }
};

// --- varints and sorted-id lists ------------------------------------------
void put_varint(std::vector<uint8_t>& out, uint64_t v);

// count, first id, then successive gaps, all varint
void put_id_list(std::vector<uint8_t>& out, const std::vector<uint32_t>& sorted_ids);
std::vector<uint32_t> get_id_list(ByteReader& r);

// --- framing over a byte stream -------------------------------------------
std::vector<uint8_t> encode_frame(const Frame& f);
// Parses one frame from buf starting at offset; returns false if incomplete.
// Advances offset past the frame on success. Throws on oversized frames.
bool decode_frame(const std::vector<uint8_t>& buf, size_t& offset, Frame& out,
                  size_t max_payload = 1u << 30);

// --- ternary code bitmap encoding -----------------------------------------
// Two ceil(L/8)-byte masks, positive then negative, LSB-first within bytes.
void put_code_bitmap(std::vector<uint8_t>& out, const std::vector<int8_t>& code);
std::vector<int8_t> get_code_bitmap(ByteReader& r, int L);

// --- message payloads ------------------------------------------------------
// ENROLL request: L u32, M u32, then M code bitmaps. ENROLL response: total
//   item count u32.
// QUERY_POSITIONS: position count u32, then positions varint-delta (sorted).
//   Positions only: signs and decoy flags never appear on the wire.
// QUERY_FULL: L u32, gammaL f64, one code bitmap
// LISTS: count u32, then per position: position u32, plus id-list, minus id-list
// SHORTLIST: count u32, then per entry: id u32, distance f64
// ERR: utf-8 text
std::vector<uint8_t> encode_enroll_payload(const CodeMatrix& codes);
CodeMatrix decode_enroll_payload(const std::vector<uint8_t>& payload);

std::vector<uint8_t> encode_positions_payload(const std::vector<int>& sorted_positions);
std::vector<int> decode_positions_payload(const std::vector<uint8_t>& payload);

std::vector<uint8_t> encode_query_full_payload(const std::vector<int8_t>& code, double gammaL);
void decode_query_full_payload(const std::vector<uint8_t>& payload, std::vector<int8_t>& code,
                               double& gammaL);

std::vector<uint8_t> encode_lists_payload(const PositionLists& lists);
PositionLists decode_lists_payload(const std::vector<uint8_t>& payload);

std::vector<uint8_t> encode_shortlist_payload(
    const std::vector<std::pair<uint32_t, double>>& entries);
std::vector<std::pair<uint32_t, double>> decode_shortlist_payload(
    const std::vector<uint8_t>& payload);

std::string decode_error_payload(const std::vector<uint8_t>& payload);
std::vector<uint8_t> encode_error_payload(const std::string& text);

}  // namespace stc
