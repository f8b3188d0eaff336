#include "krk/report.hpp"

namespace krk {

using nlohmann::json;

json to_json(const Position& pos) {
  return {{"wk", to_wire(pos.wk)},
          {"wr", to_wire(pos.wr)},
          {"bk", to_wire(pos.bk)},
          {"stm", pos.stm == Side::White ? "w" : "b"}};
}

json to_json(const Move& mv) {
  return {{"move", to_wire(mv)}, {"san", to_string(mv)}, {"captures_rook", mv.captures_rook}};
}

json to_json(const GameTrace& trace) {
  json moves = json::array();
  for (const auto& mv : trace.moves) moves.push_back(to_wire(mv));
  json positions = json::array();
  for (const auto& p : trace.positions) positions.push_back(to_json(p));
  return {{"m", trace.dims.m},
          {"n", trace.dims.n},
          {"moves", moves},
          {"positions", positions},
          {"terminal", to_string(trace.terminal)},
          {"white_move_count", trace.white_move_count}};
}

json to_json(const ClaimReport& r) {
  json j = {{"claim_id", r.claim_id},
            {"m", r.dims.m},
            {"n", r.dims.n},
            {"pass", r.pass},
            {"hard", r.hard},
            {"details", r.details}};
  if (r.expected.relation == Expectation::Relation::Equal) j["expected"] = r.expected.value;
  else j["expected"] = r.expected.to_string();
  j["observed"] = r.observed ? json(*r.observed) : json(nullptr);
  if (r.trace) j["trace"] = to_json(*r.trace);
  return j;
}

json to_json(const std::vector<ClaimReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

json summary_json(const SuiteSummary& s) {
  return {{"passed", s.passed},
          {"failed", s.failed},
          {"soft_failed", s.soft_failed},
          {"resource_errors", s.resource_errors},
          {"ok", s.ok()}};
}

}  // namespace krk
