#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "krk/policies.hpp"

using namespace krk;

namespace {

Position white(Square wk, Square wr, Square bk) { return {wk, wr, bk, Side::White}; }
Position black(Square wk, Square wr, Square bk) { return {wk, wr, bk, Side::Black}; }

std::shared_ptr<const Tablebase> solved(Dims d) {
  static std::map<Dims, std::shared_ptr<const Tablebase>> memo;
  auto& tb = memo[d];
  if (!tb) tb = std::make_shared<const Tablebase>(generate(d));
  return tb;
}

Position step(Dims d, const Position& p, const Move& mv) { return std::get<Position>(apply_move(d, p, mv)); }

ScriptState march(int waiting = 0) { return {ScriptPhase::March, 0, waiting}; }

}  // namespace

TEST_CASE("scripted White opens by confining the black king") {
  const Dims d{9, 9};
  auto sm = scripted_white(d, start_position(d), {});
  CHECK(sm.move == Move{Piece::WR, {1, 1}, {8, 1}, false});
  CHECK(sm.next.phase == ScriptPhase::March);
}

TEST_CASE("king march and waiting move") {
  SUBCASE("king climbs when the step is legal") {
    auto sm = scripted_white({9, 9}, white({9, 1}, {8, 1}, {9, 8}), march());
    CHECK(sm.move == Move{Piece::WK, {9, 1}, {9, 2}, false});
  }
  SUBCASE("opposition forces the rook to wait") {
    auto sm = scripted_white({5, 6}, white({5, 2}, {4, 1}, {5, 4}), march());
    CHECK(sm.move == Move{Piece::WR, {4, 1}, {4, 2}, false});
    CHECK(sm.next.waiting_moves_used == 1);
  }
  SUBCASE("a second wait toggles the rook back") {
    auto sm = scripted_white({5, 6}, white({5, 2}, {4, 2}, {5, 4}), march(1));
    CHECK(sm.move == Move{Piece::WR, {4, 2}, {4, 1}, false});
    CHECK(sm.next.waiting_moves_used == 2);
  }
}

TEST_CASE("finishing sequence") {
  const Dims d{8, 9};
  auto s1 = scripted_white(d, white({8, 6}, {7, 1}, {8, 9}), march());
  CHECK(s1.move == Move{Piece::WK, {8, 6}, {7, 7}, false});
  CHECK(s1.next.phase == ScriptPhase::Finish);

  // Black's only reply is BK(7,9); the rook swings to column m-2 and BK must return.
  Position p = step(d, white({8, 6}, {7, 1}, {8, 9}), s1.move);
  CHECK(legal_moves(d, p).size() == 1);
  p = step(d, p, Move{Piece::BK, {8, 9}, {7, 9}, false});
  auto s2 = scripted_white(d, p, s1.next);
  CHECK(s2.move == Move{Piece::WR, {7, 1}, {6, 1}, false});
  p = step(d, p, s2.move);
  CHECK(legal_moves(d, p).size() == 1);
  p = step(d, p, Move{Piece::BK, {7, 9}, {8, 9}, false});
  auto s3 = scripted_white(d, p, s2.next);
  CHECK(s3.move == Move{Piece::WR, {6, 1}, {6, 9}, false});
  CHECK(classify(d, step(d, p, s3.move)) == TerminalKind::Checkmate);
}

TEST_CASE("the script refuses positions it cannot reach") {
  CHECK_THROWS_AS(scripted_white({9, 9}, white({5, 5}, {2, 2}, {9, 9}), march()), OffScriptError);
  CHECK_THROWS_AS(scripted_white({9, 9}, white({5, 5}, {2, 2}, {9, 9}), {}), OffScriptError);
  try {
    scripted_white({3, 5}, start_position({3, 5}), {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidDims);
  }
}

TEST_CASE("script state can be recovered from a bare position") {
  CHECK(infer_script_state({9, 9}, start_position({9, 9})).phase == ScriptPhase::Confine);
  CHECK(infer_script_state({9, 9}, white({9, 2}, {8, 1}, {9, 8})) == march());
  CHECK(infer_script_state({5, 6}, white({5, 2}, {4, 2}, {5, 4})) == march(1));
  CHECK_THROWS_AS(infer_script_state({9, 9}, white({5, 5}, {2, 2}, {9, 9})), OffScriptError);
}

TEST_CASE("black heuristic") {
  const Dims d{9, 9};
  CHECK(black_heuristic(d, black({9, 1}, {1, 8}, {9, 9})).to == Square{8, 9});
  CHECK(black_heuristic(d, black({8, 2}, {1, 8}, {8, 9})).to == Square{7, 9});
  const Move cap = black_heuristic({8, 8}, black({1, 1}, {4, 4}, {5, 5}));
  CHECK(cap.captures_rook);
  CHECK(cap.to == Square{4, 4});
  CHECK_THROWS_AS(black_heuristic({8, 9}, black({7, 7}, {6, 9}, {8, 9})), Error);
}

TEST_CASE("optimal moves") {
  auto tb88 = solved({8, 8});
  const Move first = optimal_move(*tb88, start_position({8, 8}));
  const Position after = step({8, 8}, start_position({8, 8}), first);
  CHECK(1 + white_moves(tb88->probe(after), Side::Black) == 9);
  CHECK(optimal_move(*solved({9, 9}), black({9, 1}, {8, 1}, {9, 9})).to == Square{9, 8});
  CHECK(optimal_move(*tb88, black({1, 1}, {4, 4}, {5, 5})).captures_rook);
}

TEST_CASE("play-outs") {
  SUBCASE("scripted White against optimal Black") {
    for (auto [d, g] : {std::pair{Dims{9, 9}, 9}, std::pair{Dims{5, 6}, 7}}) {
      auto trace = play_out(d, Policy::scripted_white(), Policy::optimal_black(solved(d)), 50);
      CHECK(trace.terminal == TerminalKind::Checkmate);
      CHECK(trace.white_move_count == g);
      CHECK(trace.positions.size() == trace.moves.size() + 1);
      CHECK(trace.waiting_moves_used <= 1);
    }
  }
  SUBCASE("optimal against optimal") {
    auto tb = solved({8, 8});
    auto trace = play_out({8, 8}, Policy::optimal_white(tb), Policy::optimal_black(tb), 50);
    CHECK(trace.terminal == TerminalKind::Checkmate);
    CHECK(trace.white_move_count == 9);
  }
  SUBCASE("move budget") {
    auto tb = solved({8, 8});
    auto trace = play_out({8, 8}, Policy::optimal_white(tb), Policy::optimal_black(tb), 3);
    CHECK(trace.terminal == TerminalKind::Ongoing);
    CHECK(trace.white_move_count == 3);
  }
  SUBCASE("rook capture ends the game") {
    auto tb = solved({8, 8});
    auto trace = play_out_from({8, 8}, black({1, 1}, {4, 4}, {5, 5}), Policy::optimal_white(tb),
                               Policy::heuristic_black(), 10);
    CHECK(trace.terminal == TerminalKind::RookCaptured);
    CHECK(trace.white_move_count == 0);
  }
  SUBCASE("policies must sit on their own side") {
    CHECK_THROWS(play_out({8, 8}, Policy::heuristic_black(), Policy::scripted_white(), 10));
  }
}

TEST_CASE("optimal play is monotone and deterministic") {
  const Dims d{6, 7};
  auto tb = solved(d);
  auto a = play_out(d, Policy::optimal_white(tb), Policy::optimal_black(tb), 50);
  auto b = play_out(d, Policy::optimal_white(tb), Policy::optimal_black(tb), 50);
  CHECK(a.moves == b.moves);
  int prev = tb->probe(a.positions.front()).plies;
  for (std::size_t i = 1; i < a.positions.size(); ++i) {
    const Value v = tb->probe(a.positions[i]);
    REQUIRE(v.is_win());
    CHECK(v.plies == prev - 1);
    prev = v.plies;
  }
  CHECK(prev == 0);
}

TEST_CASE("off-script error carries the trace so far") {
  const Dims d{9, 9};
  auto tb = solved(d);
  // The heuristic never leaves the script, so push Black off it by hand.
  Position p = step(d, start_position(d), Move{Piece::WR, {1, 1}, {1, 8}, false});
  p = step(d, p, Move{Piece::BK, {9, 9}, {8, 9}, false});
  try {
    play_out_from(d, p, Policy::scripted_white(), Policy::optimal_black(tb), 20, march());
    FAIL("expected off-script");
  } catch (const OffScriptError& e) {
    CHECK(e.code() == ErrorCode::OffScript);
    CHECK(e.trace().positions.size() == 1);
  }
}
