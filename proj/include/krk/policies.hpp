// Move-selection strategies and a game driver.

#pragma once

#include <memory>
#include <vector>

#include "krk/rules.hpp"
#include "krk/tablebase.hpp"

namespace krk {

// Scripted White plan:
//   Confine  rook (1,1) -> (m-1,1), fencing the black king into column m.
//   March    white king climbs column m one row at a time; when the climb is
//            blocked by the opposition the rook toggles (m-1,1) <-> (m-1,2)
//            to hand the move back.
//   Finish   from wk=(m,n-3), bk=(m,n): WK -> (m-1,n-2), rook to column m-2
//            along its row, then rook to (m-2,n) mate.
enum class ScriptPhase { Confine, March, Finish };

struct ScriptState {
  ScriptPhase phase = ScriptPhase::Confine;
  int finish_step = 0;          // next Finish step, 1..3
  int waiting_moves_used = 0;

  friend bool operator==(const ScriptState&, const ScriptState&) = default;
};

const char* to_string(ScriptPhase phase);

struct ScriptedMove {
  Move move;
  ScriptState next;
};

// Throws OffScript when `pos` is not a position the script can reach in
// `state`; never guesses.
ScriptedMove scripted_white(Dims dims, const Position& pos, const ScriptState& state);

// Recovers a script state from a bare position (for stateless clients).
// Throws OffScript when no phase fits. waiting_moves_used is 1 iff the rook
// stands on (m-1,2).
ScriptState infer_script_state(Dims dims, const Position& pos);

// Prefers a safe rook capture, then the square farthest from the board edge,
// then the square farthest from the white king; ties go to the earliest move
// in generator order.
Move black_heuristic(Dims dims, const Position& pos);

// First entry of best_moves(tb, pos).
Move optimal_move(const Tablebase& tb, const Position& pos);

enum class PolicyKind { ScriptedWhite, HeuristicBlack, OptimalWhite, OptimalBlack };

const char* to_string(PolicyKind kind);

class Policy {
 public:
  static Policy scripted_white();
  static Policy heuristic_black();
  static Policy optimal_white(std::shared_ptr<const Tablebase> tb);
  static Policy optimal_black(std::shared_ptr<const Tablebase> tb);

  PolicyKind kind() const { return kind_; }
  Side side() const;
  const std::shared_ptr<const Tablebase>& tablebase() const { return tb_; }

  // `script` is read and advanced only by ScriptedWhite.
  Move choose(Dims dims, const Position& pos, ScriptState& script) const;

 private:
  Policy(PolicyKind kind, std::shared_ptr<const Tablebase> tb);

  PolicyKind kind_;
  std::shared_ptr<const Tablebase> tb_;
};

struct GameTrace {
  Dims dims;
  std::vector<Position> positions;  // positions[0] is the start; one more than moves
  std::vector<Move> moves;
  TerminalKind terminal = TerminalKind::Ongoing;  // Ongoing = move budget ran out
  int white_move_count = 0;
  int waiting_moves_used = 0;
};

class OffScriptError : public Error {
 public:
  OffScriptError(const std::string& what, GameTrace trace = {})
      : Error(ErrorCode::OffScript, what), trace_(std::move(trace)) {}
  const GameTrace& trace() const { return trace_; }

 private:
  GameTrace trace_;
};

// Alternating play from start_position(dims) until a terminal position or
// until White has made max_white_moves moves.
GameTrace play_out(Dims dims, const Policy& white, const Policy& black, int max_white_moves);

// Same, from an arbitrary position.
GameTrace play_out_from(Dims dims, const Position& start, const Policy& white,
                        const Policy& black, int max_white_moves, ScriptState script = {});

}  // namespace krk
