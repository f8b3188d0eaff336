#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "krk/api.hpp"

using namespace krk;
using nlohmann::json;

namespace {

std::map<std::string, std::string> query(std::string wk, std::string wr, std::string bk, std::string stm,
                                         int m = 8, int n = 8) {
  return {{"m", std::to_string(m)}, {"n", std::to_string(n)}, {"wk", wk}, {"wr", wr}, {"bk", bk}, {"stm", stm}};
}

json position(int m, int n, std::string wk, std::string wr, std::string bk, std::string stm) {
  return {{"m", m}, {"n", n}, {"wk", wk}, {"wr", wr}, {"bk", bk}, {"stm", stm}};
}

}  // namespace

TEST_CASE("probe") {
  ApiService api;
  auto win = api.probe(query("8,1", "1,1", "8,8", "w"));
  CHECK(win.status == 200);
  CHECK(win.body["status"] == "win");
  CHECK(win.body["plies"] == 17);
  CHECK(win.body["white_moves"] == 9);

  auto draw = api.probe(query("1,1", "4,4", "5,5", "b"));
  CHECK(draw.status == 200);
  CHECK(draw.body["status"] == "draw");

  CHECK(api.probe(query("5,5", "1,1", "5,5", "w")).status == 422);
  CHECK(api.probe(query("5,5", "1,1", "5,6", "w")).status == 422);
  CHECK(api.probe(query("9,9", "1,1", "8,8", "w")).status == 422);
  CHECK(api.probe(query("x", "1,1", "8,8", "w")).status == 400);
  CHECK(api.probe(query("8,1", "1,1", "8,8", "q")).status == 400);
  CHECK(api.probe({{"m", "8"}}).status == 400);
  CHECK(api.probe(query("2,1", "1,1", "2,2", "w", 2, 8)).status == 422);

  auto big = api.probe(query("8,1", "1,1", "8,8", "w", 40, 40));
  CHECK(big.status == 413);
  CHECK(big.body.contains("error"));
  CHECK(big.body.contains("reason"));
}

TEST_CASE("probe agrees with the library on sampled positions") {
  ApiService api;
  const Dims d{5, 6};
  auto tb = generate(d);
  int sampled = 0;
  for (std::uint64_t i = 0; i < position_count(d); i += 97) {
    auto p = position_of(d, i);
    if (!p) continue;
    ++sampled;
    auto r = api.probe(query(to_wire(p->wk), to_wire(p->wr), to_wire(p->bk),
                             p->stm == Side::White ? "w" : "b", d.m, d.n));
    REQUIRE(r.status == 200);
    const Value v = tb.probe(*p);
    if (v.is_win()) {
      CHECK(r.body["status"] == "win");
      CHECK(r.body["plies"] == v.plies);
    } else {
      CHECK(r.body["status"] == "draw");
    }
  }
  CHECK(sampled > 100);
}

TEST_CASE("reply with the scripted engine") {
  ApiService api;
  json req = {{"position", position(9, 9, "9,1", "1,1", "9,9", "w")}, {"engine_policy", "scripted"}};
  auto first = api.reply(req.dump());
  REQUIRE(first.status == 200);
  CHECK(first.body["accepted"] == true);
  CHECK(first.body["engine_move"]["move"] == "1,1:8,1");
  CHECK(first.body["terminal"].is_null());
  CHECK(first.body["new_position"] == position(9, 9, "9,1", "8,1", "9,9", "b"));
  REQUIRE(first.body["annotations"].size() == 1);
  CHECK(first.body["annotations"][0]["move"] == "9,9:9,8");
  CHECK(first.body["annotations"][0]["white_moves"] == 8);

  json next = {{"position", first.body["new_position"]},
               {"human_move", "9,9:9,8"},
               {"engine_policy", "scripted"},
               {"script_state", first.body["script_state"]}};
  auto second = api.reply(next.dump());
  REQUIRE(second.status == 200);
  CHECK(second.body["accepted"] == true);
  CHECK(second.body["engine_move"]["move"] == "9,1:9,2");

  // Same request without the state: it is inferred from the position.
  next.erase("script_state");
  CHECK(api.reply(next.dump()).body == second.body);
}

TEST_CASE("reply rejects illegal human moves without changing the position") {
  ApiService api;
  json pos = position(8, 8, "1,1", "5,1", "6,6", "b");
  auto r = api.reply(json{{"position", pos}, {"human_move", "6,6:5,6"}, {"engine_policy", "optimal"}}.dump());
  CHECK(r.status == 422);
  CHECK(r.body["accepted"] == false);
  CHECK(r.body["reason"] == "destination attacked");
  CHECK(r.body["position"] == pos);
}

TEST_CASE("reply with the optimal engine") {
  ApiService api;
  auto r = api.reply(json{{"position", position(8, 8, "8,1", "1,1", "8,8", "w")}, {"engine_policy", "optimal"}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["engine_move"]["move"] == "1,1:7,1");
  CHECK_FALSE(r.body.contains("script_state"));
  for (const auto& a : r.body["annotations"]) CHECK(a["status"] == "win");

  SUBCASE("engine plays Black") {
    auto b = api.reply(
        json{{"position", position(8, 8, "1,1", "4,5", "6,6", "w")}, {"human_move", "4,5:5,5"}, {"engine_policy", "optimal"}}
            .dump());
    REQUIRE(b.status == 200);
    CHECK(b.body["engine_move"]["captures_rook"] == true);
    CHECK(b.body["terminal"] == "rook_captured");
  }
  SUBCASE("human move mates") {
    auto m = api.reply(
        json{{"position", position(8, 9, "7,7", "6,1", "8,9", "w")}, {"human_move", "6,1:6,9"}, {"engine_policy", "optimal"}}
            .dump());
    REQUIRE(m.status == 200);
    CHECK(m.body["terminal"] == "checkmate");
    CHECK_FALSE(m.body.contains("engine_move"));
    CHECK(m.body["annotations"].empty());
  }
}

TEST_CASE("reply errors") {
  ApiService api;
  CHECK(api.reply("not json").status == 400);
  CHECK(api.reply("{}").status == 400);
  CHECK(api.reply(json{{"position", position(8, 8, "8,1", "1,1", "8,8", "w")}, {"engine_policy", "random"}}.dump())
            .status == 400);
  CHECK(api.reply(json{{"position", position(8, 8, "8,1", "1,1", "8,8", "w")}, {"human_move", "nope"}}.dump())
            .status == 400);
  auto off = api.reply(json{{"position", position(9, 9, "5,5", "2,2", "9,9", "w")}, {"engine_policy", "scripted"}}.dump());
  CHECK(off.status == 409);
  CHECK(off.body["error"] == "off script");
  auto small = api.reply(json{{"position", position(3, 5, "3,1", "1,1", "3,5", "w")}, {"engine_policy", "scripted"}}.dump());
  CHECK(small.status == 422);
}

TEST_CASE("replies are deterministic") {
  ApiService a, b;
  const std::string req =
      json{{"position", position(6, 7, "6,1", "1,1", "6,7", "w")}, {"engine_policy", "optimal"}}.dump();
  CHECK(a.reply(req).body == b.reply(req).body);
  CHECK(a.reply(req).body == a.reply(req).body);
}

TEST_CASE("health") {
  ApiService api;
  auto fresh = api.health();
  CHECK(fresh.body["status"] == "ok");
  CHECK(fresh.body["cached_tables"] == json::array());
  CHECK(fresh.body["version"] == kServiceVersion);
  api.probe(query("8,1", "1,1", "8,8", "w"));
  CHECK(api.health().body["cached_tables"] == json::array({json::array({8, 8})}));
}

TEST_CASE("served over HTTP") {
  ApiService api;
  httplib::Server server;
  mount(server, api);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["cached_tables"] == json::array());
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto probe = client.Get("/v1/probe?m=8&n=8&wk=8,1&wr=1,1&bk=8,8&stm=w");
  REQUIRE(probe);
  CHECK(probe->status == 200);
  CHECK(json::parse(probe->body)["white_moves"] == 9);

  auto reply = client.Post("/v1/reply",
                           json{{"position", position(9, 9, "9,1", "1,1", "9,9", "w")}}.dump(), "application/json");
  REQUIRE(reply);
  CHECK(reply->status == 200);
  CHECK(json::parse(reply->body)["engine_move"]["move"] == "1,1:8,1");

  auto missing = client.Get("/v1/nowhere");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["error"] == "not found");

  auto preflight = client.Options("/v1/reply");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);

  server.stop();
  loop.join();
}
