#include "stc/wire.hpp"

#include <cstring>

namespace stc {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}
void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_f64(std::vector<uint8_t>& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

uint8_t ByteReader::u8() {
  need(1);
  return p[off++];
}
uint16_t ByteReader::u16() {
  need(2);
  uint16_t v = static_cast<uint16_t>(p[off] | (p[off + 1] << 8));
  off += 2;
  return v;
}
uint32_t ByteReader::u32() {
  need(4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[off + i]) << (8 * i);
  off += 4;
  return v;
}
uint64_t ByteReader::u64() {
  need(8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[off + i]) << (8 * i);
  off += 8;
  return v;
}
double ByteReader::f64() {
  uint64_t bits = u64();
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}
uint64_t ByteReader::varint() {
  uint64_t v = 0;
  int shift = 0;
  for (;;) {
    need(1);
    uint8_t b = p[off++];
    if (shift >= 64 || (shift == 63 && (b & 0x7e)))
      throw std::runtime_error("wire: varint overflow");
    v |= static_cast<uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
  }
}

void put_varint(std::vector<uint8_t>& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<uint8_t>(v));
}

void put_id_list(std::vector<uint8_t>& out, const std::vector<uint32_t>& ids) {
  put_varint(out, ids.size());
  uint32_t prev = 0;
  bool first = true;
  for (uint32_t id : ids) {
    if (first) {
      put_varint(out, id);
      first = false;
    } else {
      if (id <= prev) throw std::runtime_error("wire: id list not strictly increasing");
      put_varint(out, id - prev);
    }
    prev = id;
  }
}

std::vector<uint32_t> get_id_list(ByteReader& r) {
  uint64_t n = r.varint();
  if (n > (1u << 30)) throw std::runtime_error("wire: id list too long");
  std::vector<uint32_t> ids;
  ids.reserve(n);
  uint64_t cur = 0;
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t d = r.varint();
    if (i == 0)
      cur = d;
    else {
      if (d == 0) throw std::runtime_error("wire: zero gap in id list");
      cur += d;
    }
    if (cur > UINT32_MAX) throw std::runtime_error("wire: id overflow");
    ids.push_back(static_cast<uint32_t>(cur));
  }
  return ids;
}

std::vector<uint8_t> encode_frame(const Frame& f) {
  std::vector<uint8_t> out;
  out.reserve(f.payload.size() + 5);
  put_u32(out, static_cast<uint32_t>(f.payload.size() + 1));
  out.push_back(static_cast<uint8_t>(f.type));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

bool decode_frame(const std::vector<uint8_t>& buf, size_t& offset, Frame& out,
                  size_t max_payload) {
  if (buf.size() - offset < 4) return false;
  uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<uint32_t>(buf[offset + i]) << (8 * i);
  if (len < 1) throw std::runtime_error("wire: empty frame");
  if (len > max_payload + 1) throw std::runtime_error("wire: oversized frame");
  if (buf.size() - offset < 4u + len) return false;
  uint8_t tag = buf[offset + 4];
  if (tag < 1 || tag > 6) throw std::runtime_error("wire: unknown message type");
  out.type = static_cast<MsgType>(tag);
  out.payload.assign(buf.begin() + static_cast<long>(offset) + 5,
                     buf.begin() + static_cast<long>(offset) + 4 + len);
  offset += 4u + len;
  return true;
}

void put_code_bitmap(std::vector<uint8_t>& out, const std::vector<int8_t>& code) {
  const size_t L = code.size();
  const size_t bytes = (L + 7) / 8;
  size_t base = out.size();
  out.resize(base + 2 * bytes, 0);
  for (size_t i = 0; i < L; ++i) {
    if (code[i] > 0) out[base + i / 8] |= static_cast<uint8_t>(1u << (i % 8));
    if (code[i] < 0) out[base + bytes + i / 8] |= static_cast<uint8_t>(1u << (i % 8));
  }
}

std::vector<int8_t> get_code_bitmap(ByteReader& r, int L) {
  const size_t bytes = (static_cast<size_t>(L) + 7) / 8;
  r.need(2 * bytes);
  std::vector<int8_t> code(L, 0);
  for (int i = 0; i < L; ++i) {
    bool pos = r.p[r.off + i / 8] & (1u << (i % 8));
    bool neg = r.p[r.off + bytes + i / 8] & (1u << (i % 8));
    if (pos && neg) throw std::runtime_error("wire: malformed code bitmap");
    code[i] = pos ? 1 : (neg ? -1 : 0);
  }
  r.off += 2 * bytes;
  return code;
}

std::vector<uint8_t> encode_enroll_payload(const CodeMatrix& codes) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(codes.rows()));
  put_u32(out, static_cast<uint32_t>(codes.cols()));
  std::vector<int8_t> col(codes.rows());
  for (Eigen::Index m = 0; m < codes.cols(); ++m) {
    for (Eigen::Index i = 0; i < codes.rows(); ++i) col[i] = codes(i, m);
    put_code_bitmap(out, col);
  }
  return out;
}

CodeMatrix decode_enroll_payload(const std::vector<uint8_t>& payload) {
  ByteReader r(payload);
  uint32_t L = r.u32();
  uint32_t M = r.u32();
  if (L == 0 || L > (1u << 20)) throw std::runtime_error("wire: bad code length");
  CodeMatrix codes(L, M);
  for (uint32_t m = 0; m < M; ++m) {
    auto col = get_code_bitmap(r, static_cast<int>(L));
    for (uint32_t i = 0; i < L; ++i) codes(i, m) = col[i];
  }
  if (!r.done()) throw std::runtime_error("wire: trailing bytes");
  return codes;
}

std::vector<uint8_t> encode_positions_payload(const std::vector<int>& sorted_positions) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(sorted_positions.size()));
  int prev = 0;
  bool first = true;
  for (int l : sorted_positions) {
    if (l < 0) throw std::runtime_error("wire: negative position");
    if (first) {
      put_varint(out, static_cast<uint64_t>(l));
      first = false;
    } else {
      if (l <= prev) throw std::runtime_error("wire: positions not strictly increasing");
      put_varint(out, static_cast<uint64_t>(l - prev));
    }
    prev = l;
  }
  return out;
}

std::vector<int> decode_positions_payload(const std::vector<uint8_t>& payload) {
  ByteReader r(payload);
  uint32_t n = r.u32();
  std::vector<int> positions;
  positions.reserve(n);
  uint64_t cur = 0;
  for (uint32_t i = 0; i < n; ++i) {
    uint64_t d = r.varint();
    if (i == 0)
      cur = d;
    else {
      if (d == 0) throw std::runtime_error("wire: duplicate position");
      cur += d;
    }
    if (cur > INT32_MAX) throw std::runtime_error("wire: position overflow");
    positions.push_back(static_cast<int>(cur));
  }
  if (!r.done()) throw std::runtime_error("wire: trailing bytes");
  return positions;
}

std::vector<uint8_t> encode_query_full_payload(const std::vector<int8_t>& code, double gammaL) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(code.size()));
  put_f64(out, gammaL);
  put_code_bitmap(out, code);
  return out;
}

void decode_query_full_payload(const std::vector<uint8_t>& payload, std::vector<int8_t>& code,
                               double& gammaL) {
  ByteReader r(payload);
  uint32_t L = r.u32();
  if (L == 0 || L > (1u << 20)) throw std::runtime_error("wire: bad code length");
  gammaL = r.f64();
  code = get_code_bitmap(r, static_cast<int>(L));
  if (!r.done()) throw std::runtime_error("wire: trailing bytes");
}

std::vector<uint8_t> encode_lists_payload(const PositionLists& lists) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(lists.positions.size()));
  for (size_t i = 0; i < lists.positions.size(); ++i) {
    put_u32(out, static_cast<uint32_t>(lists.positions[i]));
    put_id_list(out, lists.plus[i]);
    put_id_list(out, lists.minus[i]);
  }
  return out;
}

PositionLists decode_lists_payload(const std::vector<uint8_t>& payload) {
  ByteReader r(payload);
  uint32_t n = r.u32();
  PositionLists lists;
  lists.positions.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    lists.positions.push_back(static_cast<int>(r.u32()));
    lists.plus.push_back(get_id_list(r));
    lists.minus.push_back(get_id_list(r));
  }
  if (!r.done()) throw std::runtime_error("wire: trailing bytes");
  return lists;
}

std::vector<uint8_t> encode_shortlist_payload(
    const std::vector<std::pair<uint32_t, double>>& entries) {
  std::vector<uint8_t> out;
  put_u32(out, static_cast<uint32_t>(entries.size()));
  for (const auto& [id, d] : entries) {
    put_u32(out, id);
    put_f64(out, d);
  }
  return out;
}

std::vector<std::pair<uint32_t, double>> decode_shortlist_payload(
    const std::vector<uint8_t>& payload) {
  ByteReader r(payload);
  uint32_t n = r.u32();
  std::vector<std::pair<uint32_t, double>> entries;
  entries.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t id = r.u32();
    double d = r.f64();
    entries.emplace_back(id, d);
  }
  if (!r.done()) throw std::runtime_error("wire: trailing bytes");
  return entries;
}

std::string decode_error_payload(const std::vector<uint8_t>& payload) {
  return std::string(payload.begin(), payload.end());
}

std::vector<uint8_t> encode_error_payload(const std::string& text) {
  return std::vector<uint8_t>(text.begin(), text.end());
}

}  // namespace stc
