#include "stc/database.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "stc/wire.hpp"

namespace stc {

void enroll_append(PublicDatabase& db, const CodeMatrix& public_codes) {
  if (db.L == 0 && public_codes.rows() > 0) {
    db.L = static_cast<int>(public_codes.rows());
    db.plus.assign(db.L, {});
    db.minus.assign(db.L, {});
  }
  if (public_codes.cols() > 0 && static_cast<int>(public_codes.rows()) != db.L)
    throw std::runtime_error("dimension mismatch");
  uint64_t nonzeros = 0;
  if (db.M > 0 && db.L > 0)
    nonzeros = static_cast<uint64_t>(db.density * db.L * db.M + 0.5);
  for (Eigen::Index m = 0; m < public_codes.cols(); ++m) {
    uint32_t id = db.M + static_cast<uint32_t>(m);
    for (int i = 0; i < db.L; ++i) {
      int8_t v = public_codes(i, m);
      if (v > 0)
        db.plus[i].push_back(id);
      else if (v < 0)
        db.minus[i].push_back(id);
      if (v != 0) ++nonzeros;
    }
  }
  db.M += static_cast<uint32_t>(public_codes.cols());
  db.density = (db.M > 0 && db.L > 0)
                   ? static_cast<double>(nonzeros) / (static_cast<double>(db.L) * db.M)
                   : 0.0;
}

PublicDatabase enroll(const CodeMatrix& public_codes, uint64_t created_unix) {
  PublicDatabase db;
  db.created_unix = created_unix;
  enroll_append(db, public_codes);
  return db;
}

CodeMatrix reconstruct_codes(const PublicDatabase& db) {
  CodeMatrix codes = CodeMatrix::Zero(db.L, db.M);
  for (int i = 0; i < db.L; ++i) {
    for (uint32_t id : db.plus[i]) codes(i, id) = 1;
    for (uint32_t id : db.minus[i]) codes(i, id) = -1;
  }
  return codes;
}

void validate_database(const PublicDatabase& db) {
  if (static_cast<int>(db.plus.size()) != db.L || static_cast<int>(db.minus.size()) != db.L)
    throw std::runtime_error("database: list count mismatch");
  for (int i = 0; i < db.L; ++i) {
    const auto check_sorted = [&](const std::vector<uint32_t>& v) {
      for (size_t k = 0; k < v.size(); ++k) {
        if (v[k] >= db.M) throw std::runtime_error("database: id out of range");
        if (k > 0 && v[k] <= v[k - 1]) throw std::runtime_error("database: unsorted list");
      }
    };
    check_sorted(db.plus[i]);
    check_sorted(db.minus[i]);
    size_t a = 0, b = 0;
    while (a < db.plus[i].size() && b < db.minus[i].size()) {
      if (db.plus[i][a] == db.minus[i][b])
        throw std::runtime_error("database: id on both signs");
      if (db.plus[i][a] < db.minus[i][b])
        ++a;
      else
        ++b;
    }
  }
}

void save_database(const PublicDatabase& db, const std::string& path) {
  std::vector<uint8_t> out;
  out.reserve(64 + static_cast<size_t>(db.density * db.L * db.M * 2 + 16));
  const char magic[6] = {'S', 'T', 'C', 'D', 'B', '1'};
  out.insert(out.end(), magic, magic + 6);
  put_u32(out, static_cast<uint32_t>(db.L));
  put_u32(out, db.M);
  put_f64(out, db.density);
  put_u64(out, db.created_unix);
  for (int i = 0; i < db.L; ++i) {
    put_id_list(out, db.plus[i]);
    put_id_list(out, db.minus[i]);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_database: cannot open " + path);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<long>(out.size()));
  if (!os) throw std::runtime_error("save_database: write failed");
}

PublicDatabase load_database(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  if (!is) throw std::runtime_error("load_database: cannot open " + path);
  std::vector<uint8_t> buf(static_cast<size_t>(is.tellg()));
  is.seekg(0);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<long>(buf.size()));
  if (!is) throw std::runtime_error("load_database: read failed");
  if (buf.size() < 6 || std::memcmp(buf.data(), "STCDB1", 6) != 0)
    throw std::runtime_error("load_database: bad magic");
  std::vector<uint8_t> body(buf.begin() + 6, buf.end());
  ByteReader r(body);
  PublicDatabase db;
  db.L = static_cast<int>(r.u32());
  db.M = r.u32();
  db.density = r.f64();
  db.created_unix = r.u64();
  if (db.L < 0 || db.L > (1 << 20)) throw std::runtime_error("load_database: bad length");
  db.plus.resize(db.L);
  db.minus.resize(db.L);
  for (int i = 0; i < db.L; ++i) {
    db.plus[i] = get_id_list(r);
    db.minus[i] = get_id_list(r);
  }
  if (!r.done()) throw std::runtime_error("load_database: trailing bytes");
  validate_database(db);
  return db;
}

}  // namespace stc
