#include "krk/api.hpp"

#include <httplib.h>

#include "krk/policies.hpp"
#include "krk/report.hpp"

namespace krk {

using nlohmann::json;

namespace {

struct Failure {
  int status;
  std::string error;
  std::string reason;
};

HttpResult failure(const Failure& f) { return {f.status, {{"error", f.error}, {"reason", f.reason}}}; }

int parse_int(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Failure{400, "malformed request", field + " must be an integer"};
}

Square square_field(const std::string& field, const json& v) {
  std::optional<Square> sq;
  if (v.is_string()) sq = parse_square(v.get<std::string>());
  else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer())
    sq = Square{v[0].get<int>(), v[1].get<int>()};
  if (!sq) throw Failure{400, "malformed request", field + " must be \"col,row\""};
  return *sq;
}

struct Request {
  Dims dims;
  Position pos;
};

// Accepts {m, n, wk, wr, bk, stm} with integers or numeric strings.
Request decode_position(const json& obj, std::uint64_t cap) {
  if (!obj.is_object()) throw Failure{400, "malformed request", "position must be an object"};
  for (const char* key : {"m", "n", "wk", "wr", "bk", "stm"})
    if (!obj.contains(key)) throw Failure{400, "malformed request", std::string("missing ") + key};

  auto int_field = [&](const char* key) {
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) return parse_int(key, v.get<std::string>());
    throw Failure{400, "malformed request", std::string(key) + " must be an integer"};
  };
  Request r;
  r.dims = {int_field("m"), int_field("n")};
  r.pos.wk = square_field("wk", obj.at("wk"));
  r.pos.wr = square_field("wr", obj.at("wr"));
  r.pos.bk = square_field("bk", obj.at("bk"));
  const json& stm = obj.at("stm");
  auto side = stm.is_string() ? parse_side(stm.get<std::string>()) : std::nullopt;
  if (!side) throw Failure{400, "malformed request", "stm must be w or b"};
  r.pos.stm = *side;

  if (r.dims.m < 3 || r.dims.n < 3)
    throw Failure{422, "invalid dims", "board must be at least 3x3"};
  if (static_cast<std::uint64_t>(r.dims.squares()) > cap)
    throw Failure{413, "dims over cap", "m*n must not exceed " + std::to_string(cap)};
  if (auto defect = position_defect(r.dims, r.pos))
    throw Failure{422, "invalid position", *defect};
  return r;
}

json position_json(Dims dims, const Position& pos) {
  json j = to_json(pos);
  j["m"] = dims.m;
  j["n"] = dims.n;
  return j;
}

json value_json(const Value& v, Side stm) {
  json j;
  if (v.is_win()) {
    j["status"] = "win";
    j["plies"] = v.plies;
    j["white_moves"] = white_moves(v, stm);
  } else {
    j["status"] = v.is_draw() ? "draw" : "illegal";
  }
  return j;
}

json script_json(const ScriptState& s) {
  return {{"phase", to_string(s.phase)},
          {"finish_step", s.finish_step},
          {"waiting_moves_used", s.waiting_moves_used}};
}

std::optional<ScriptState> decode_script(const json& body) {
  if (!body.contains("script_state") || body["script_state"].is_null()) return std::nullopt;
  const json& j = body["script_state"];
  if (!j.is_object() || !j.contains("phase") || !j["phase"].is_string())
    throw Failure{400, "malformed request", "script_state needs a phase"};
  ScriptState s;
  const std::string phase = j["phase"].get<std::string>();
  if (phase == "confine") s.phase = ScriptPhase::Confine;
  else if (phase == "march") s.phase = ScriptPhase::March;
  else if (phase == "finish") s.phase = ScriptPhase::Finish;
  else throw Failure{400, "malformed request", "unknown script phase " + phase};
  s.finish_step = j.value("finish_step", 0);
  s.waiting_moves_used = j.value("waiting_moves_used", 0);
  return s;
}

json annotations(const Tablebase& tb, const Position& pos) {
  json list = json::array();
  if (classify(tb.dims(), pos) != TerminalKind::Ongoing) return list;
  for (const auto& am : best_moves(tb, pos)) {
    json j = value_json(am.after, opponent(pos.stm));
    j["move"] = to_wire(am.move);
    j["san"] = to_string(am.move);
    j["captures_rook"] = am.move.captures_rook;
    list.push_back(std::move(j));
  }
  return list;
}

}  // namespace

ApiService::ApiService(CacheConfig config) : cache_(std::move(config)) {}

HttpResult ApiService::probe(const std::map<std::string, std::string>& query) {
  try {
    json obj = json::object();
    for (const auto& [k, v] : query) obj[k] = v;
    Request req = decode_position(obj, cache_.config().generate.cap);
    auto tb = cache_.get(req.dims);
    json body = value_json(tb->probe(req.pos), req.pos.stm);
    body["position"] = position_json(req.dims, req.pos);
    return {200, body};
  } catch (const Failure& f) {
    return failure(f);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Resource) return failure({413, "dims over cap", e.what()});
    return failure({500, "internal error", e.what()});
  }
}

HttpResult ApiService::reply(const std::string& raw) {
  try {
    json body = json::parse(raw, nullptr, false);
    if (body.is_discarded() || !body.is_object())
      throw Failure{400, "malformed request", "body must be a JSON object"};
    if (!body.contains("position")) throw Failure{400, "malformed request", "missing position"};
    Request req = decode_position(body["position"], cache_.config().generate.cap);
    const std::string policy_name = body.value("engine_policy", std::string("scripted"));
    if (policy_name != "scripted" && policy_name != "optimal")
      throw Failure{400, "malformed request", "engine_policy must be scripted or optimal"};
    std::optional<ScriptState> script = decode_script(body);

    const Dims dims = req.dims;
    Position pos = req.pos;
    json out = {{"accepted", true}};

    auto finish = [&](const std::shared_ptr<const Tablebase>& tb, const Position& p,
                      std::optional<TerminalKind> term) {
      out["new_position"] = position_json(dims, p);
      out["terminal"] = term ? json(to_string(*term)) : json(nullptr);
      out["annotations"] = term ? json::array() : annotations(*tb, p);
      return HttpResult{200, out};
    };

    if (body.contains("human_move") && !body["human_move"].is_null()) {
      if (!body["human_move"].is_string())
        throw Failure{400, "malformed request", "human_move must be \"c,r:c,r\""};
      auto squares = parse_move_text(body["human_move"].get<std::string>());
      if (!squares) throw Failure{400, "malformed request", "human_move must be \"c,r:c,r\""};
      if (auto why = illegal_reason(dims, pos, squares->first, squares->second)) {
        return {422, {{"accepted", false},
                      {"error", "illegal move"},
                      {"reason", *why},
                      {"position", position_json(dims, pos)}}};
      }
      Move human = find_move(dims, pos, squares->first, squares->second);
      out["human_move"] = to_json(human);
      auto next = apply_move(dims, pos, human);
      if (std::holds_alternative<RookCaptured>(next)) {
        out["terminal"] = to_string(TerminalKind::RookCaptured);
        out["annotations"] = json::array();
        return {200, out};
      }
      pos = std::get<Position>(next);
    }

    auto tb = cache_.get(dims);
    TerminalKind term = classify(dims, pos);
    if (term != TerminalKind::Ongoing) return finish(tb, pos, term);

    Move engine;
    if (pos.stm == Side::White && policy_name == "scripted") {
      ScriptState state = script ? *script : infer_script_state(dims, pos);
      auto sm = scripted_white(dims, pos, state);
      engine = sm.move;
      out["script_state"] = script_json(sm.next);
    } else if (pos.stm == Side::Black && policy_name == "scripted") {
      engine = black_heuristic(dims, pos);
    } else {
      engine = optimal_move(*tb, pos);
    }
    out["engine_move"] = to_json(engine);
    auto next = apply_move(dims, pos, engine);
    if (std::holds_alternative<RookCaptured>(next)) {
      out["terminal"] = to_string(TerminalKind::RookCaptured);
      out["annotations"] = json::array();
      return {200, out};
    }
    pos = std::get<Position>(next);
    term = classify(dims, pos);
    return finish(tb, pos, term == TerminalKind::Ongoing ? std::nullopt : std::optional(term));
  } catch (const Failure& f) {
    return failure(f);
  } catch (const OffScriptError& e) {
    return failure({409, "off script", e.what()});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Resource) return failure({413, "dims over cap", e.what()});
    if (e.code() == ErrorCode::InvalidDims) return failure({422, "invalid dims", e.what()});
    return failure({500, "internal error", e.what()});
  }
}

HttpResult ApiService::health() const {
  json tables = json::array();
  for (Dims d : cache_.resident()) tables.push_back({d.m, d.n});
  return {200, {{"status", "ok"}, {"cached_tables", tables}, {"version", kServiceVersion}}};
}

void mount(httplib::Server& server, ApiService& service) {
  auto send = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get("/v1/probe", [&service, send](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    send(res, service.probe(query));
  });
  server.Post("/v1/reply", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.reply(req.body));
  });
  server.Get("/v1/health", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  // Browser clients are usually served from another origin.
  server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* error = res.status == 404 ? "not found" : "request failed";
    res.set_content(json{{"error", error}, {"reason", "HTTP " + std::to_string(res.status)}}.dump(),
                    "application/json");
  });
}

bool serve(ApiService& service, const std::string& host, int port) {
  httplib::Server server;
  mount(server, service);
  return server.listen(host, port);
}

}  // namespace krk
