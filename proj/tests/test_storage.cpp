#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stc/database.hpp"
#include "stc/kernels.hpp"
#include "stc/synthetic.hpp"

using namespace stc;

namespace {

std::vector<uint8_t> slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary | std::ios::ate);
  REQUIRE(is);
  std::vector<uint8_t> buf(static_cast<size_t>(is.tellg()));
  is.seekg(0);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<long>(buf.size()));
  return buf;
}

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("storage: enrolling nothing yields an empty index") {
  PublicDatabase db = enroll(CodeMatrix(0, 0));
  CHECK(db.M == 0);
  CHECK(db.L == 0);
  CHECK(db.plus.empty());
  CHECK(db.density == 0.0);
  validate_database(db);
}

TEST_CASE("storage: single code lands in the right posting lists") {
  CodeMatrix c(3, 1);
  c << 1, 0, -1;
  PublicDatabase db = enroll(c);
  CHECK(db.L == 3);
  CHECK(db.M == 1);
  CHECK(db.plus[0] == std::vector<uint32_t>{0});
  CHECK(db.minus[2] == std::vector<uint32_t>{0});
  CHECK(db.plus[1].empty());
  CHECK(db.minus[1].empty());
  CHECK(db.minus[0].empty());
  CHECK(db.plus[2].empty());
  CHECK(db.density == doctest::Approx(2.0 / 3.0));
  validate_database(db);
}

TEST_CASE("storage: appending extends ids and keeps density exact") {
  CodeMatrix first(4, 2);
  first << 1, 0, 0, -1, -1, 1, 0, 0;
  CodeMatrix second(4, 1);
  second << 0, 1, 1, 0;
  PublicDatabase db = enroll(first);
  enroll_append(db, second);
  CHECK(db.M == 3);
  CHECK(db.plus[1] == std::vector<uint32_t>{2});
  CHECK(db.plus[2] == std::vector<uint32_t>{1, 2});
  // 4 nonzeros in the first batch, 2 in the second
  CHECK(db.density == doctest::Approx(6.0 / 12.0).epsilon(1e-14));
  validate_database(db);

  CodeMatrix wrong(5, 1);
  wrong.setZero();
  CHECK_THROWS_WITH(enroll_append(db, wrong), "dimension mismatch");
}

TEST_CASE("storage: posting lists invert back to the enrolled codes") {
  Matrix W = random_row_orthonormal(64, 64, 31);
  Matrix X = gaussian_matrix(64, 30, 32);
  CodeMatrix codes = ambiguize_columns(encode_columns(W, X, 6), 10, 88);
  PublicDatabase db = enroll(codes);
  CodeMatrix back = reconstruct_codes(db);
  REQUIRE(back.rows() == codes.rows());
  REQUIRE(back.cols() == codes.cols());
  CHECK((back == codes));
}

TEST_CASE("storage: structural validation catches corrupted indexes") {
  CodeMatrix c(3, 2);
  c << 1, 0, 0, 1, -1, 0;
  PublicDatabase good = enroll(c);

  SUBCASE("unsorted list") {
    PublicDatabase db = good;
    db.plus[0] = {1, 0};
    CHECK_THROWS_WITH(validate_database(db), "database: unsorted list");
  }
  SUBCASE("id beyond M") {
    PublicDatabase db = good;
    db.minus[1] = {7};
    CHECK_THROWS_WITH(validate_database(db), "database: id out of range");
  }
  SUBCASE("id on both signs of one position") {
    PublicDatabase db = good;
    db.plus[2] = {0};
    db.minus[2] = {0};
    CHECK_THROWS_WITH(validate_database(db), "database: id on both signs");
  }
  SUBCASE("list count mismatch") {
    PublicDatabase db = good;
    db.minus.pop_back();
    CHECK_THROWS_WITH(validate_database(db), "database: list count mismatch");
  }
}

TEST_CASE("storage: desk-scale database round-trips bit-exactly") {
  const int L = 512, M = 1000;
  Matrix W = random_row_orthonormal(L, L, 61);
  Matrix X = gaussian_matrix(L, M, 62);
  CodeMatrix codes = ambiguize_columns(encode_columns(W, X, 16), 48, 63);
  PublicDatabase db = enroll(codes, 1724300000);
  CHECK(db.density == doctest::Approx(64.0 / 512.0));

  std::string p1 = tmp_path("stc_desk_a.db");
  std::string p2 = tmp_path("stc_desk_b.db");
  save_database(db, p1);
  PublicDatabase loaded = load_database(p1);
  CHECK(loaded == db);
  CHECK(loaded.created_unix == 1724300000);

  save_database(loaded, p2);
  CHECK(slurp(p1) == slurp(p2));

  auto bytes = slurp(p1);
  REQUIRE(bytes.size() > 30);
  CHECK(std::string(bytes.begin(), bytes.begin() + 6) == "STCDB1");
  uint32_t L_read = bytes[6] | (bytes[7] << 8) | (bytes[8] << 16) | (uint32_t(bytes[9]) << 24);
  uint32_t M_read = bytes[10] | (bytes[11] << 8) | (bytes[12] << 16) | (uint32_t(bytes[13]) << 24);
  CHECK(L_read == 512);
  CHECK(M_read == 1000);

  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("storage: loader rejects malformed files") {
  CodeMatrix c(3, 1);
  c << 1, 0, -1;
  PublicDatabase db = enroll(c);
  std::string path = tmp_path("stc_malformed.db");

  SUBCASE("bad magic") {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << "NOTSTC junk";
    os.close();
    CHECK_THROWS_WITH(load_database(path), "load_database: bad magic");
  }
  SUBCASE("truncated body") {
    save_database(db, path);
    auto bytes = slurp(path);
    bytes.resize(bytes.size() - 1);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<long>(bytes.size()));
    os.close();
    CHECK_THROWS(load_database(path));
  }
  SUBCASE("trailing garbage") {
    save_database(db, path);
    std::ofstream os(path, std::ios::binary | std::ios::app);
    os << "x";
    os.close();
    CHECK_THROWS_WITH(load_database(path), "load_database: trailing bytes");
  }
  SUBCASE("missing file") {
    CHECK_THROWS(load_database(tmp_path("stc_does_not_exist.db")));
  }
  std::remove(path.c_str());
}
