#include "stc/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <stdexcept>

namespace stc {

namespace {

bool write_all(int fd, const uint8_t* buf, size_t n) {
  while (n > 0) {
    ssize_t rv = ::write(fd, buf, n);
    if (rv <= 0) return false;
    n -= static_cast<size_t>(rv);
    buf += rv;
  }
  return true;
}

Frame error_frame(const std::string& text) {
  return Frame{MsgType::ERR, encode_error_payload(text)};
}

}  // namespace

StorageServer::StorageServer(ServerConfig cfg) : cfg_(std::move(cfg)) {
  if (const char* env = std::getenv("STC_DB"); env && *env) cfg_.db_path = env;
  if (!cfg_.db_path.empty() && std::filesystem::exists(cfg_.db_path)) {
    db_ = load_database(cfg_.db_path);
    codes_ = reconstruct_codes(db_);
  }

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(cfg_.port);
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listen_fd_);
    throw std::runtime_error("bind() failed on port " + std::to_string(cfg_.port));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::listen(listen_fd_, 64) < 0) {
    ::close(listen_fd_);
    throw std::runtime_error("listen() failed");
  }
  acceptor_ = std::thread([this] { accept_loop(); });
}

StorageServer::~StorageServer() { stop(); }

void StorageServer::stop() {
  {
    std::lock_guard<std::mutex> g(conn_mu_);
    stopping_ = true;
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
  }
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> conns;
  {
    std::lock_guard<std::mutex> g(conn_mu_);
    conns.swap(conns_);
  }
  for (auto& t : conns)
    if (t.joinable()) t.join();
}

void StorageServer::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) return;  // listener shut down
    std::lock_guard<std::mutex> g(conn_mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    open_fds_.push_back(fd);
    conns_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void StorageServer::serve_connection(int fd) {
  std::vector<uint8_t> buf;
  size_t off = 0;
  uint8_t chunk[65536];
  for (;;) {
    Frame req;
    bool have = false;
    try {
      have = decode_frame(buf, off, req);
    } catch (const std::exception& e) {
      Frame err = error_frame(e.what());
      auto bytes = encode_frame(err);
      write_all(fd, bytes.data(), bytes.size());
      break;  // framing is unrecoverable; drop the connection
    }
    if (have) {
      Frame resp = handle(req);
      auto bytes = encode_frame(resp);
      if (!write_all(fd, bytes.data(), bytes.size())) break;
      if (off > (1u << 20) && off == buf.size()) {
        buf.clear();
        off = 0;
      }
      continue;
    }
    ssize_t rv = ::read(fd, chunk, sizeof(chunk));
    if (rv <= 0) break;
    buf.insert(buf.end(), chunk, chunk + rv);
  }
  {
    std::lock_guard<std::mutex> g(conn_mu_);
    open_fds_.erase(std::remove(open_fds_.begin(), open_fds_.end(), fd), open_fds_.end());
  }
  ::close(fd);
}

Frame StorageServer::handle(const Frame& req) {
  try {
    switch (req.type) {
      case MsgType::ENROLL:
        return do_enroll(req);
      case MsgType::QUERY_POSITIONS:
        return do_query_positions(req);
      case MsgType::QUERY_FULL:
        return do_query_full(req);
      default:
        return error_frame("unexpected message type");
    }
  } catch (const std::exception& e) {
    return error_frame(e.what());
  }
}

Frame StorageServer::do_enroll(const Frame& req) {
  if (cfg_.readonly) return error_frame("readonly");
  std::unique_lock<std::mutex> gate(enroll_mu_, std::try_to_lock);
  if (!gate.owns_lock()) return error_frame("busy");

  CodeMatrix add = decode_enroll_payload(req.payload);
  {
    std::unique_lock<std::shared_mutex> w(rw_);
    if (cfg_.enroll_hold_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(cfg_.enroll_hold_ms));
    if (db_.M == 0 && db_.L == 0)
      db_ = enroll(add, static_cast<uint64_t>(std::time(nullptr)));
    else
      enroll_append(db_, add);
    codes_ = reconstruct_codes(db_);
    if (!cfg_.db_path.empty()) save_database(db_, cfg_.db_path);
  }
  std::vector<uint8_t> payload;
  put_u32(payload, db_.M);
  return Frame{MsgType::ENROLL, std::move(payload)};
}

Frame StorageServer::do_query_positions(const Frame& req) {
  std::vector<int> positions = decode_positions_payload(req.payload);
  std::shared_lock<std::shared_mutex> r(rw_);
  PositionLists lists = server_lookup(positions, db_);
  return Frame{MsgType::LISTS, encode_lists_payload(lists)};
}

Frame StorageServer::do_query_full(const Frame& req) {
  std::vector<int8_t> code;
  double gammaL = 0.0;
  decode_query_full_payload(req.payload, code, gammaL);
  std::shared_lock<std::shared_mutex> r(rw_);
  if (static_cast<int>(code.size()) != db_.L) throw std::runtime_error("dimension mismatch");

  TernaryCode b;
  b.values.resize(static_cast<int>(code.size()));
  for (size_t l = 0; l < code.size(); ++l) {
    b.values[static_cast<int>(l)] = code[l];
    if (code[l] != 0) b.support.push_back(static_cast<int>(l));
  }
  b.sparsity = static_cast<int>(b.support.size());

  const double gamma = db_.L > 0 ? gammaL / db_.L : 0.0;
  CandidateList out = private_decode(b, codes_, gamma);
  return Frame{MsgType::SHORTLIST, encode_shortlist_payload(out.entries)};
}

uint32_t StorageServer::item_count() const {
  std::shared_lock<std::shared_mutex> r(rw_);
  return db_.M;
}

StorageClient::StorageClient(const std::string& host, uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw std::runtime_error("bad host address: " + host);
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(fd_);
    throw std::runtime_error("connect() failed");
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

StorageClient::~StorageClient() {
  if (fd_ >= 0) ::close(fd_);
}

Frame StorageClient::call(const Frame& req) {
  auto bytes = encode_frame(req);
  if (!write_all(fd_, bytes.data(), bytes.size())) throw std::runtime_error("send failed");
  uint8_t chunk[65536];
  for (;;) {
    Frame resp;
    if (decode_frame(rbuf_, roff_, resp)) {
      if (roff_ == rbuf_.size()) {
        rbuf_.clear();
        roff_ = 0;
      }
      return resp;
    }
    ssize_t rv = ::read(fd_, chunk, sizeof(chunk));
    if (rv <= 0) throw std::runtime_error("connection closed");
    rbuf_.insert(rbuf_.end(), chunk, chunk + rv);
  }
}

namespace {

[[noreturn]] void raise_remote(const Frame& f) {
  throw std::runtime_error(decode_error_payload(f.payload));
}

}  // namespace

uint32_t remote_enroll(StorageClient& c, const CodeMatrix& public_codes) {
  Frame resp = c.call(Frame{MsgType::ENROLL, encode_enroll_payload(public_codes)});
  if (resp.type == MsgType::ERR) raise_remote(resp);
  if (resp.type != MsgType::ENROLL) throw std::runtime_error("unexpected response type");
  ByteReader r(resp.payload);
  return r.u32();
}

PositionLists remote_query_positions(StorageClient& c, const std::vector<int>& positions) {
  Frame resp = c.call(Frame{MsgType::QUERY_POSITIONS, encode_positions_payload(positions)});
  if (resp.type == MsgType::ERR) raise_remote(resp);
  if (resp.type != MsgType::LISTS) throw std::runtime_error("unexpected response type");
  return decode_lists_payload(resp.payload);
}

std::vector<std::pair<uint32_t, double>> remote_query_full(StorageClient& c,
                                                           const std::vector<int8_t>& code,
                                                           double gammaL) {
  Frame resp = c.call(Frame{MsgType::QUERY_FULL, encode_query_full_payload(code, gammaL)});
  if (resp.type == MsgType::ERR) raise_remote(resp);
  if (resp.type != MsgType::SHORTLIST) throw std::runtime_error("unexpected response type");
  return decode_shortlist_payload(resp.payload);
}

}  // namespace stc
