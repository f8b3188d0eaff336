#include "krk/rules.hpp"

#include <sstream>

namespace krk {

void validate_dims(Dims dims) {
  if (dims.m < 3 || dims.n < 3) {
    throw Error(ErrorCode::InvalidDims, "board must be at least 3x3, got " +
                                            std::to_string(dims.m) + "x" + std::to_string(dims.n));
  }
}

Position start_position(Dims dims) {
  validate_dims(dims);
  Position p{{dims.m, 1}, {1, 1}, {dims.m, dims.n}, Side::White};
  if (auto defect = position_defect(dims, p)) {
    throw Error(ErrorCode::InvalidDims, "start position is not legal on this board: " + *defect);
  }
  return p;
}

bool rook_attacks(Square rook, Square target, Square blocker) {
  if (rook == target) return false;
  if (rook.col != target.col && rook.row != target.row) return false;
  int dc = (target.col > rook.col) - (target.col < rook.col);
  int dr = (target.row > rook.row) - (target.row < rook.row);
  for (Square s{rook.col + dc, rook.row + dr}; s != target; s = {s.col + dc, s.row + dr}) {
    if (s == blocker) return false;
  }
  return true;
}

std::optional<std::string> position_defect(Dims dims, const Position& pos) {
  if (!on_board(dims, pos.wk) || !on_board(dims, pos.wr) || !on_board(dims, pos.bk))
    return "piece off the board";
  if (pos.wk == pos.wr || pos.wk == pos.bk || pos.wr == pos.bk) return "two pieces share a square";
  if (chebyshev(pos.wk, pos.bk) < 2) return "kings adjacent";
  if (pos.stm == Side::White && black_in_check(pos)) return "side not to move is in check";
  return std::nullopt;
}

namespace {

void require_valid(Dims dims, const Position& pos) {
  if (auto defect = position_defect(dims, pos)) throw Error(ErrorCode::InvalidPosition, *defect);
}

}  // namespace

std::vector<Move> legal_moves(Dims dims, const Position& pos) {
  validate_dims(dims);
  require_valid(dims, pos);
  std::vector<Move> out;
  for_each_legal_move(dims, pos, [&](const Move& mv) { out.push_back(mv); });
  return out;
}

Successor apply_move_unchecked(const Position& pos, const Move& mv) {
  if (mv.captures_rook) return RookCaptured{};
  Position next = pos;
  switch (mv.piece) {
    case Piece::WK: next.wk = mv.to; break;
    case Piece::WR: next.wr = mv.to; break;
    case Piece::BK: next.bk = mv.to; break;
  }
  next.stm = opponent(pos.stm);
  return next;
}

Successor apply_move(Dims dims, const Position& pos, const Move& mv) {
  validate_dims(dims);
  require_valid(dims, pos);
  bool found = false;
  for_each_legal_move(dims, pos, [&](const Move& m) { found = found || m == mv; });
  if (!found) {
    auto reason = illegal_reason(dims, pos, mv.from, mv.to);
    throw Error(ErrorCode::IllegalMove,
                "illegal move " + to_string(mv) + ": " + reason.value_or("move flags do not match"));
  }
  return apply_move_unchecked(pos, mv);
}

TerminalKind classify(Dims dims, const Position& pos) {
  validate_dims(dims);
  require_valid(dims, pos);
  bool any = false;
  for_each_legal_move(dims, pos, [&](const Move&) { any = true; });
  if (any) return TerminalKind::Ongoing;
  bool attacked = pos.stm == Side::Black && black_in_check(pos);
  return attacked ? TerminalKind::Checkmate : TerminalKind::Stalemate;
}

namespace {

Square mirror_square(Dims d, Square s, Axis axis) {
  return axis == Axis::Columns ? Square{d.m + 1 - s.col, s.row} : Square{s.col, d.n + 1 - s.row};
}

}  // namespace

Position mirror(Dims dims, const Position& pos, Axis axis) {
  return {mirror_square(dims, pos.wk, axis), mirror_square(dims, pos.wr, axis),
          mirror_square(dims, pos.bk, axis), pos.stm};
}

Move mirror(Dims dims, const Move& mv, Axis axis) {
  return {mv.piece, mirror_square(dims, mv.from, axis), mirror_square(dims, mv.to, axis),
          mv.captures_rook};
}

std::uint64_t position_count(Dims dims) {
  std::uint64_t s = static_cast<std::uint64_t>(dims.squares());
  return 2 * s * s * s;
}

std::uint64_t index_of(Dims dims, const Position& pos) {
  if (!on_board(dims, pos.wk) || !on_board(dims, pos.wr) || !on_board(dims, pos.bk))
    throw Error(ErrorCode::Range, "square outside the board");
  const std::uint64_t s = static_cast<std::uint64_t>(dims.squares());
  std::uint64_t stm = pos.stm == Side::White ? 0 : 1;
  return ((stm * s + square_index(dims, pos.wk)) * s + square_index(dims, pos.wr)) * s +
         square_index(dims, pos.bk);
}

std::optional<Position> position_of(Dims dims, std::uint64_t idx) {
  if (idx >= position_count(dims))
    throw Error(ErrorCode::Range, "index " + std::to_string(idx) + " out of range");
  const std::uint64_t s = static_cast<std::uint64_t>(dims.squares());
  Position p;
  p.bk = square_at(dims, static_cast<int>(idx % s));
  idx /= s;
  p.wr = square_at(dims, static_cast<int>(idx % s));
  idx /= s;
  p.wk = square_at(dims, static_cast<int>(idx % s));
  p.stm = idx / s == 0 ? Side::White : Side::Black;
  if (!is_valid(dims, p)) return std::nullopt;
  return p;
}

std::optional<std::string> illegal_reason(Dims dims, const Position& pos, Square from, Square to) {
  if (auto defect = position_defect(dims, pos)) return "invalid position: " + *defect;
  if (!on_board(dims, from) || !on_board(dims, to)) return "square off the board";
  if (from == to) return "null move";

  if (pos.stm == Side::Black) {
    if (from != pos.bk) return "no black piece on " + to_string(from);
    if (chebyshev(from, to) != 1) return "king moves one square";
    if (chebyshev(to, pos.wk) < 2) return "kings would be adjacent";
    if (to == pos.wr) {
      if (chebyshev(pos.wr, pos.wk) < 2) return "rook is defended";
      return std::nullopt;
    }
    if (rook_attacks(pos.wr, to, pos.wk)) return "destination attacked";
    return std::nullopt;
  }

  if (from == pos.wk) {
    if (chebyshev(from, to) != 1) return "king moves one square";
    if (to == pos.wr || to == pos.bk) return "destination occupied";
    if (chebyshev(to, pos.bk) < 2) return "kings would be adjacent";
    return std::nullopt;
  }
  if (from == pos.wr) {
    if (from.col != to.col && from.row != to.row) return "rook moves along a row or column";
    if (to == pos.wk || to == pos.bk) return "destination occupied";
    if (!rook_attacks(from, to, pos.wk) || !rook_attacks(from, to, pos.bk)) return "path blocked";
    return std::nullopt;
  }
  return "no white piece on " + to_string(from);
}

Move find_move(Dims dims, const Position& pos, Square from, Square to) {
  validate_dims(dims);
  require_valid(dims, pos);
  std::optional<Move> hit;
  for_each_legal_move(dims, pos, [&](const Move& m) {
    if (m.from == from && m.to == to) hit = m;
  });
  if (hit) return *hit;
  throw Error(ErrorCode::IllegalMove,
              illegal_reason(dims, pos, from, to).value_or("move not available"));
}

const char* to_string(Side s) { return s == Side::White ? "white" : "black"; }

const char* to_string(TerminalKind k) {
  switch (k) {
    case TerminalKind::Checkmate: return "checkmate";
    case TerminalKind::Stalemate: return "stalemate";
    case TerminalKind::RookCaptured: return "rook_captured";
    case TerminalKind::Ongoing: return "ongoing";
  }
  return "?";
}

std::string to_string(Square s) {
  return "(" + std::to_string(s.col) + "," + std::to_string(s.row) + ")";
}

std::string to_string(const Move& mv) {
  const char* name = mv.piece == Piece::WK ? "WK" : mv.piece == Piece::WR ? "WR" : "BK";
  return name + to_string(mv.from) + (mv.captures_rook ? "x" : "-") + to_string(mv.to);
}

std::string to_wire(Square s) { return std::to_string(s.col) + "," + std::to_string(s.row); }

std::string to_wire(const Move& mv) { return to_wire(mv.from) + ":" + to_wire(mv.to); }

std::optional<Square> parse_square(const std::string& text) {
  std::string t;
  for (char c : text)
    if (c != ' ' && c != '(' && c != ')') t += c;
  auto comma = t.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == t.size()) return std::nullopt;
  Square s;
  try {
    std::size_t used = 0;
    s.col = std::stoi(t.substr(0, comma), &used);
    if (used != comma) return std::nullopt;
    std::string rest = t.substr(comma + 1);
    s.row = std::stoi(rest, &used);
    if (used != rest.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return s;
}

std::optional<std::pair<Square, Square>> parse_move_text(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  auto from = parse_square(text.substr(0, colon));
  auto to = parse_square(text.substr(colon + 1));
  if (!from || !to) return std::nullopt;
  return std::make_pair(*from, *to);
}

std::optional<Side> parse_side(const std::string& text) {
  if (text == "w" || text == "white" || text == "W") return Side::White;
  if (text == "b" || text == "black" || text == "B") return Side::Black;
  return std::nullopt;
}

std::string render_board(Dims dims, const Position& pos) {
  std::ostringstream out;
  const int width = dims.n >= 10 ? 2 : 1;
  for (int row = dims.n; row >= 1; --row) {
    std::string label = std::to_string(row);
    out << std::string(width - label.size(), ' ') << label << ' ';
    for (int col = 1; col <= dims.m; ++col) {
      Square s{col, row};
      char c = '.';
      if (s == pos.wk) c = 'K';
      else if (s == pos.wr) c = 'R';
      else if (s == pos.bk) c = 'k';
      out << ' ' << c;
    }
    out << '\n';
  }
  out << std::string(width + 1, ' ');
  if (dims.m <= 26) {
    for (int col = 1; col <= dims.m; ++col) out << ' ' << static_cast<char>('a' + col - 1);
  } else {
    out << " columns 1.." << dims.m;
  }
  out << '\n' << (pos.stm == Side::White ? "White" : "Black") << " to move\n";
  return out.str();
}

}  // namespace krk
