#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scenmine/exporters.hpp"
#include "scenmine/pipeline.hpp"

namespace httplib {
class Server;
}

namespace scenmine {

struct ServiceConfig {
  double idle_timeout_seconds = 1800.0;
  ProviderConfig provider;  // used when a request asks for the remote provider
  ExportConfig export_config;
  std::size_t default_stride = 1;
};

/// HTTP facade over the library. Sessions are keyed by the X-Session-Id
/// header; a request without one opens a new session and the id comes back
/// in the same header. Scenario ids have the form "<search id>-<pool index>",
/// the search id being returned in X-Search-Id.
class Service {
 public:
  using Clock = std::chrono::steady_clock;
  using TransportFactory = std::function<std::unique_ptr<ChatTransport>()>;
  using Now = std::function<Clock::time_point()>;

  explicit Service(ServiceConfig config, TransportFactory transport_factory = {},
                   Now now = &Clock::now);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Registers every /api route on `server`.
  void mount(httplib::Server& server);

  [[nodiscard]] std::string create_session();
  [[nodiscard]] std::size_t session_count() const;
  /// Drops sessions idle for longer than the configured period.
  std::size_t expire_idle();

  struct Session;

 private:
  std::shared_ptr<Session> session_for(const std::string& id);

  ServiceConfig config_;
  TransportFactory transport_factory_;
  Now now_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// Blocks serving on host:port until the server is stopped.
void serve(Service& service, const std::string& host, int port);

}  // namespace scenmine
