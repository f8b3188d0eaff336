// KRK rules kernel on a generalized m x n board.
//
// Coordinates are (column, row), both 1-based. Column 1..m runs left to
// right, row 1..n bottom to top. A square's linear index is
// (col - 1) + (row - 1) * m.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace krk {

enum class ErrorCode {
  InvalidDims,
  InvalidPosition,
  IllegalMove,
  Range,
  Resource,
  DimsMismatch,
  NotAWin,
  Corrupt,
  UnsupportedFormat,
  Terminal,
  OffScript,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Dims {
  int m = 0;  // columns
  int n = 0;  // rows

  int squares() const { return m * n; }
  friend bool operator==(const Dims&, const Dims&) = default;
  friend auto operator<=>(const Dims&, const Dims&) = default;
};

// Throws InvalidDims unless m >= 3 and n >= 3.
void validate_dims(Dims dims);

struct Square {
  int col = 0;
  int row = 0;

  friend bool operator==(const Square&, const Square&) = default;
  friend auto operator<=>(const Square&, const Square&) = default;
};

inline bool on_board(Dims d, Square s) {
  return s.col >= 1 && s.col <= d.m && s.row >= 1 && s.row <= d.n;
}
inline int square_index(Dims d, Square s) { return (s.col - 1) + (s.row - 1) * d.m; }
inline Square square_at(Dims d, int idx) { return {idx % d.m + 1, idx / d.m + 1}; }

inline int chebyshev(Square a, Square b) {
  int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
  int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
  return dc > dr ? dc : dr;
}

// Distance to the nearest board edge; 0 on the rim.
inline int edge_distance(Dims d, Square s) {
  int a = s.col - 1 < d.m - s.col ? s.col - 1 : d.m - s.col;
  int b = s.row - 1 < d.n - s.row ? s.row - 1 : d.n - s.row;
  return a < b ? a : b;
}

enum class Side : std::uint8_t { White = 0, Black = 1 };

inline Side opponent(Side s) { return s == Side::White ? Side::Black : Side::White; }

struct Position {
  Square wk;
  Square wr;
  Square bk;
  Side stm = Side::White;

  friend bool operator==(const Position&, const Position&) = default;
};

enum class Piece : std::uint8_t { WK, WR, BK };

struct Move {
  Piece piece = Piece::WK;
  Square from;
  Square to;
  bool captures_rook = false;

  friend bool operator==(const Move&, const Move&) = default;
};

enum class TerminalKind { Checkmate, Stalemate, RookCaptured, Ongoing };

// Marker returned by apply_move when the black king takes the rook.
struct RookCaptured {
  friend bool operator==(const RookCaptured&, const RookCaptured&) = default;
};

using Successor = std::variant<Position, RookCaptured>;

enum class Axis { Columns, Rows };

// wk=(m,1), wr=(1,1), bk=(m,n), White to move.
Position start_position(Dims dims);

// True if a rook on `rook` attacks `target` along a clear line. `blocker`
// is the only other piece considered (the white king).
bool rook_attacks(Square rook, Square target, Square blocker);

inline bool black_in_check(const Position& p) { return rook_attacks(p.wr, p.bk, p.wk); }

// Empty when the position satisfies every invariant; otherwise the reason.
std::optional<std::string> position_defect(Dims dims, const Position& pos);
inline bool is_valid(Dims dims, const Position& pos) { return !position_defect(dims, pos); }

// Calls f(const Move&) for each legal move of the side to move, in the
// canonical order: by piece (WK, WR for White; BK for Black), then by the
// linear index of the destination. Does not validate `pos`.
template <class F>
void for_each_legal_move(Dims d, const Position& p, F&& f);

std::vector<Move> legal_moves(Dims dims, const Position& pos);

Successor apply_move(Dims dims, const Position& pos, const Move& mv);

// Like apply_move but skips the legality check; `mv` must come from the
// generator for `pos`.
Successor apply_move_unchecked(const Position& pos, const Move& mv);

TerminalKind classify(Dims dims, const Position& pos);

Position mirror(Dims dims, const Position& pos, Axis axis);
Move mirror(Dims dims, const Move& mv, Axis axis);

// 2 * (m*n)^3
std::uint64_t position_count(Dims dims);
std::uint64_t index_of(Dims dims, const Position& pos);
// Range error past position_count; nullopt when the decoded layout is not a
// valid position.
std::optional<Position> position_of(Dims dims, std::uint64_t idx);

// Finds the legal move of the side to move that goes from `from` to `to`.
// Throws IllegalMove with a human-readable reason otherwise.
Move find_move(Dims dims, const Position& pos, Square from, Square to);

// Why moving the piece on `from` to `to` is not legal; empty when it is.
std::optional<std::string> illegal_reason(Dims dims, const Position& pos, Square from, Square to);

const char* to_string(Side s);
const char* to_string(TerminalKind k);
std::string to_string(Square s);    // "(c,r)"
std::string to_string(const Move& mv);  // "WR(1,1)-(8,1)", "BK(5,5)x(4,4)"
std::string to_wire(Square s);      // "c,r"
std::string to_wire(const Move& mv);  // "c,r:c,r"
std::optional<Square> parse_square(const std::string& text);
std::optional<std::pair<Square, Square>> parse_move_text(const std::string& text);
std::optional<Side> parse_side(const std::string& text);

// ASCII diagram, row n at the top. Files are lettered when m <= 26.
std::string render_board(Dims dims, const Position& pos);

// ---------------------------------------------------------------------------

namespace detail {

inline bool black_may_enter(const Position& p, Square to) {
  if (chebyshev(to, p.wk) < 2) return false;
  if (to == p.wr) return chebyshev(p.wr, p.wk) >= 2;
  return !rook_attacks(p.wr, to, p.wk);
}

inline constexpr int kKingSteps[8][2] = {
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};

}  // namespace detail

template <class F>
void for_each_legal_move(Dims d, const Position& p, F&& f) {
  if (p.stm == Side::Black) {
    for (const auto& step : detail::kKingSteps) {
      Square to{p.bk.col + step[0], p.bk.row + step[1]};
      if (!on_board(d, to) || !detail::black_may_enter(p, to)) continue;
      f(Move{Piece::BK, p.bk, to, to == p.wr});
    }
    return;
  }

  for (const auto& step : detail::kKingSteps) {
    Square to{p.wk.col + step[0], p.wk.row + step[1]};
    if (!on_board(d, to) || to == p.wr || chebyshev(to, p.bk) < 2) continue;
    f(Move{Piece::WK, p.wk, to, false});
  }

  // Ray lengths in each direction before leaving the board or hitting a piece.
  auto clear = [&](Square s) { return on_board(d, s) && s != p.wk && s != p.bk; };
  const Square r = p.wr;
  int down = 0, left = 0, right = 0, up = 0;
  while (clear({r.col, r.row - down - 1})) ++down;
  while (clear({r.col - left - 1, r.row})) ++left;
  while (clear({r.col + right + 1, r.row})) ++right;
  while (clear({r.col, r.row + up + 1})) ++up;

  for (int k = down; k >= 1; --k) f(Move{Piece::WR, r, {r.col, r.row - k}, false});
  for (int k = left; k >= 1; --k) f(Move{Piece::WR, r, {r.col - k, r.row}, false});
  for (int k = 1; k <= right; ++k) f(Move{Piece::WR, r, {r.col + k, r.row}, false});
  for (int k = 1; k <= up; ++k) f(Move{Piece::WR, r, {r.col, r.row + k}, false});
}

}  // namespace krk
