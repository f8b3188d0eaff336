#include "krk/policies.hpp"

#include <tuple>

namespace krk {

const char* to_string(ScriptPhase phase) {
  switch (phase) {
    case ScriptPhase::Confine: return "confine";
    case ScriptPhase::March: return "march";
    case ScriptPhase::Finish: return "finish";
  }
  return "?";
}

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ScriptedWhite: return "scripted_white";
    case PolicyKind::HeuristicBlack: return "heuristic_black";
    case PolicyKind::OptimalWhite: return "optimal_white";
    case PolicyKind::OptimalBlack: return "optimal_black";
  }
  return "?";
}

namespace {

[[noreturn]] void off_script(const Position& pos, const std::string& why) {
  throw OffScriptError("off script at wk=" + to_string(pos.wk) + " wr=" + to_string(pos.wr) +
                       " bk=" + to_string(pos.bk) + ": " + why);
}

Move scripted_move(Dims dims, const Position& pos, Square from, Square to) {
  try {
    return find_move(dims, pos, from, to);
  } catch (const Error& e) {
    off_script(pos, "scripted move " + to_string(from) + "-" + to_string(to) + " is illegal (" +
                        e.what() + ")");
  }
}

bool march_layout(Dims d, const Position& p) {
  const int m = d.m;
  return p.wk.col == m && p.bk.col == m && p.bk.row > p.wk.row && p.wr.col == m - 1 &&
         (p.wr.row == 1 || p.wr.row == 2);
}

void require_script_dims(Dims dims) {
  validate_dims(dims);
  if (dims.m < 4 || dims.n < 5)
    throw Error(ErrorCode::InvalidDims, "scripted play needs m >= 4 and n >= 5");
}

}  // namespace

ScriptedMove scripted_white(Dims dims, const Position& pos, const ScriptState& state) {
  require_script_dims(dims);
  if (auto defect = position_defect(dims, pos)) off_script(pos, *defect);
  if (pos.stm != Side::White) off_script(pos, "black to move");

  const int m = dims.m, n = dims.n;
  ScriptState next = state;

  switch (state.phase) {
    case ScriptPhase::Confine: {
      if (pos != start_position(dims)) off_script(pos, "confinement expects the start position");
      next.phase = ScriptPhase::March;
      return {scripted_move(dims, pos, {1, 1}, {m - 1, 1}), next};
    }

    case ScriptPhase::March: {
      if (!march_layout(dims, pos)) off_script(pos, "march expects kings on column m, rook on column m-1");
      if (pos.wk == Square{m, n - 3} && pos.bk == Square{m, n}) {
        next.phase = ScriptPhase::Finish;
        next.finish_step = 2;
        return {scripted_move(dims, pos, pos.wk, {m - 1, n - 2}), next};
      }
      const Square up{m, pos.wk.row + 1};
      if (!illegal_reason(dims, pos, pos.wk, up)) return {find_move(dims, pos, pos.wk, up), next};
      ++next.waiting_moves_used;
      const Square wait{m - 1, pos.wr.row == 1 ? 2 : 1};
      return {scripted_move(dims, pos, pos.wr, wait), next};
    }

    case ScriptPhase::Finish: {
      if (state.finish_step == 2) {
        if (pos.wk != Square{m - 1, n - 2} || pos.bk != Square{m - 1, n} || pos.wr.col != m - 1)
          off_script(pos, "finish step 2 expects wk=(m-1,n-2), bk=(m-1,n)");
        next.finish_step = 3;
        return {scripted_move(dims, pos, pos.wr, {m - 2, pos.wr.row}), next};
      }
      if (state.finish_step == 3) {
        if (pos.wk != Square{m - 1, n - 2} || pos.bk != Square{m, n} || pos.wr.col != m - 2)
          off_script(pos, "finish step 3 expects wk=(m-1,n-2), bk=(m,n), rook on column m-2");
        next.finish_step = 4;
        return {scripted_move(dims, pos, pos.wr, {m - 2, n}), next};
      }
      off_script(pos, "finish sequence already complete");
    }
  }
  off_script(pos, "unknown phase");
}

ScriptState infer_script_state(Dims dims, const Position& pos) {
  require_script_dims(dims);
  const int m = dims.m, n = dims.n;
  if (pos == start_position(dims)) return {};
  ScriptState s;
  s.waiting_moves_used = pos.wr.row == 2 ? 1 : 0;
  if (pos.stm == Side::White && pos.wk == Square{m - 1, n - 2}) {
    if (pos.wr.col == m - 1 && pos.bk == Square{m - 1, n}) {
      s.phase = ScriptPhase::Finish;
      s.finish_step = 2;
      return s;
    }
    if (pos.wr.col == m - 2 && pos.bk == Square{m, n}) {
      s.phase = ScriptPhase::Finish;
      s.finish_step = 3;
      return s;
    }
  }
  if (pos.stm == Side::White && march_layout(dims, pos)) {
    s.phase = ScriptPhase::March;
    return s;
  }
  off_script(pos, "position is not on the scripted path");
}

Move black_heuristic(Dims dims, const Position& pos) {
  const auto moves = legal_moves(dims, pos);
  if (pos.stm != Side::Black) throw Error(ErrorCode::InvalidPosition, "black heuristic needs black to move");
  if (moves.empty())
    throw Error(ErrorCode::Terminal, std::string("position is terminal (") +
                                         to_string(classify(dims, pos)) + ")");
  for (const auto& mv : moves)
    if (mv.captures_rook) return mv;

  const Move* best = &moves.front();
  auto score = [&](const Move& mv) {
    return std::make_tuple(edge_distance(dims, mv.to), chebyshev(mv.to, pos.wk));
  };
  for (const auto& mv : moves)
    if (score(mv) > score(*best)) best = &mv;
  return *best;
}

Move optimal_move(const Tablebase& tb, const Position& pos) { return best_moves(tb, pos).front().move; }

Policy::Policy(PolicyKind kind, std::shared_ptr<const Tablebase> tb) : kind_(kind), tb_(std::move(tb)) {
  if ((kind_ == PolicyKind::OptimalWhite || kind_ == PolicyKind::OptimalBlack) && !tb_)
    throw Error(ErrorCode::InvalidDims, "optimal policy needs a tablebase");
}

Policy Policy::scripted_white() { return Policy(PolicyKind::ScriptedWhite, nullptr); }
Policy Policy::heuristic_black() { return Policy(PolicyKind::HeuristicBlack, nullptr); }
Policy Policy::optimal_white(std::shared_ptr<const Tablebase> tb) {
  return Policy(PolicyKind::OptimalWhite, std::move(tb));
}
Policy Policy::optimal_black(std::shared_ptr<const Tablebase> tb) {
  return Policy(PolicyKind::OptimalBlack, std::move(tb));
}

Side Policy::side() const {
  return kind_ == PolicyKind::ScriptedWhite || kind_ == PolicyKind::OptimalWhite ? Side::White
                                                                                 : Side::Black;
}

Move Policy::choose(Dims dims, const Position& pos, ScriptState& script) const {
  if (pos.stm != side())
    throw Error(ErrorCode::InvalidPosition, std::string(to_string(kind_)) + " asked to move for " +
                                                to_string(pos.stm));
  switch (kind_) {
    case PolicyKind::ScriptedWhite: {
      auto r = krk::scripted_white(dims, pos, script);
      script = r.next;
      return r.move;
    }
    case PolicyKind::HeuristicBlack:
      return black_heuristic(dims, pos);
    case PolicyKind::OptimalWhite:
    case PolicyKind::OptimalBlack:
      if (tb_->dims() != dims)
        throw Error(ErrorCode::DimsMismatch, "policy tablebase does not match the board");
      return optimal_move(*tb_, pos);
  }
  throw Error(ErrorCode::InvalidPosition, "unknown policy");
}

GameTrace play_out_from(Dims dims, const Position& start, const Policy& white, const Policy& black,
                        int max_white_moves, ScriptState script) {
  GameTrace trace;
  trace.dims = dims;
  trace.positions.push_back(start);
  Position pos = start;
  for (;;) {
    const TerminalKind term = classify(dims, pos);
    if (term != TerminalKind::Ongoing) {
      trace.terminal = term;
      break;
    }
    if (pos.stm == Side::White && trace.white_move_count >= max_white_moves) break;

    const Policy& mover = pos.stm == Side::White ? white : black;
    Move mv;
    try {
      mv = mover.choose(dims, pos, script);
    } catch (const OffScriptError& e) {
      trace.waiting_moves_used = script.waiting_moves_used;
      throw OffScriptError(e.what(), trace);
    }
    trace.moves.push_back(mv);
    if (pos.stm == Side::White) ++trace.white_move_count;
    auto next = apply_move(dims, pos, mv);
    if (std::holds_alternative<RookCaptured>(next)) {
      trace.terminal = TerminalKind::RookCaptured;
      break;
    }
    pos = std::get<Position>(next);
    trace.positions.push_back(pos);
  }
  trace.waiting_moves_used = script.waiting_moves_used;
  return trace;
}

GameTrace play_out(Dims dims, const Policy& white, const Policy& black, int max_white_moves) {
  return play_out_from(dims, start_position(dims), white, black, max_white_moves);
}

}  // namespace krk
