#pragma once
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "stc/database.hpp"
#include "stc/identification.hpp"
#include "stc/wire.hpp"

namespace stc {

struct ServerConfig {
  uint16_t port = 0;    // 0 picks an ephemeral port; see port()
  std::string db_path;  // empty: in-memory only. STC_DB env overrides.
  bool readonly = false;
  int enroll_hold_ms = 0;  // test hook: dwell inside the enroll critical section
};

// The public storage endpoint. One request frame, one response frame, any
// number of concurrent connections. Queries take a shared lock; ENROLL takes
// the exclusive one and a second enroll arriving meanwhile is answered
// ERROR "busy" instead of queueing. If db_path names an existing file the
// index is loaded at startup, and every successful enroll persists back.
class StorageServer {
 public:
  explicit StorageServer(ServerConfig cfg);
  ~StorageServer();
  StorageServer(const StorageServer&) = delete;
  StorageServer& operator=(const StorageServer&) = delete;

  uint16_t port() const { return port_; }
  const std::string& db_path() const { return cfg_.db_path; }
  void stop();  // idempotent; joins every connection thread

  // The full request dispatch, shared by the socket loop and in-process
  // callers. Never throws: malformed input comes back as an ERR frame.
  Frame handle(const Frame& req);

  uint32_t item_count() const;

 private:
  void accept_loop();
  void serve_connection(int fd);
  Frame do_enroll(const Frame& req);
  Frame do_query_positions(const Frame& req);
  Frame do_query_full(const Frame& req);

  ServerConfig cfg_;
  uint16_t port_ = 0;
  int listen_fd_ = -1;
  std::thread acceptor_;
  std::mutex conn_mu_;
  std::vector<std::thread> conns_;
  std::vector<int> open_fds_;
  bool stopping_ = false;

  mutable std::shared_mutex rw_;  // many readers, one writer
  std::mutex enroll_mu_;          // enroll-vs-enroll: try_lock, loser gets "busy"
  PublicDatabase db_;
  CodeMatrix codes_;  // reconstruction cache for QUERY_FULL
};

// Blocking client for the frame protocol.
class StorageClient {
 public:
  StorageClient(const std::string& host, uint16_t port);
  ~StorageClient();
  StorageClient(const StorageClient&) = delete;
  StorageClient& operator=(const StorageClient&) = delete;

  Frame call(const Frame& req);

 private:
  int fd_ = -1;
  std::vector<uint8_t> rbuf_;
  size_t roff_ = 0;
};

// Convenience wrappers; each throws std::runtime_error carrying the server's
// text when the response is an ERR frame.
uint32_t remote_enroll(StorageClient& c, const CodeMatrix& public_codes);
PositionLists remote_query_positions(StorageClient& c, const std::vector<int>& positions);
std::vector<std::pair<uint32_t, double>> remote_query_full(StorageClient& c,
                                                           const std::vector<int8_t>& code,
                                                           double gammaL);

}  // namespace stc
