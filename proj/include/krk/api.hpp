// JSON-over-HTTP service: probe, engine reply, health.
//
//   GET  /v1/probe?m=8&n=8&wk=8,1&wr=1,1&bk=8,8&stm=w
//   POST /v1/reply   {"position": {...}, "human_move": "c,r:c,r", "engine_policy": "scripted"}
//   GET  /v1/health
//
// The server keeps no game state; clients send the whole position each time.

#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "krk/cache.hpp"

namespace httplib {
class Server;
}

namespace krk {

inline constexpr int kDefaultPort = 8423;
inline constexpr const char* kServiceVersion = "1.0.0";

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

class ApiService {
 public:
  explicit ApiService(CacheConfig config = {});

  HttpResult probe(const std::map<std::string, std::string>& query);
  HttpResult reply(const std::string& body);
  HttpResult health() const;

  TablebaseCache& cache() { return cache_; }

 private:
  TablebaseCache cache_;
};

// Registers the /v1 routes and JSON error handling on `server`.
void mount(httplib::Server& server, ApiService& service);

// Blocks serving on host:port. Returns false if the socket could not be bound.
bool serve(ApiService& service, const std::string& host, int port);

}  // namespace krk
