#include "krk/verify.hpp"

#include <algorithm>
#include <sstream>

namespace krk {

bool Expectation::satisfied_by(std::optional<int> observed) const {
  if (!observed) return false;
  return relation == Relation::Equal ? *observed == value : *observed >= value;
}

std::string Expectation::to_string() const {
  return relation == Relation::Equal ? std::to_string(value) : ">= " + std::to_string(value);
}

ClaimReport make_report(std::string claim_id, Dims dims, Expectation expected,
                        std::optional<int> observed, std::string details, bool hard) {
  ClaimReport r;
  r.claim_id = std::move(claim_id);
  r.dims = dims;
  r.expected = expected;
  r.observed = observed;
  r.pass = expected.satisfied_by(observed);
  r.hard = hard;
  r.details = std::move(details);
  return r;
}

namespace {

void require_theorem_scope(Dims d) {
  validate_dims(d);
  if (d.m < 4 || d.n < 5)
    throw Error(ErrorCode::InvalidDims, "claims need m >= 4 and n >= 5, got " +
                                            std::to_string(d.m) + "x" + std::to_string(d.n));
}

std::string describe(std::optional<int> total) {
  return total ? std::to_string(*total) : std::string("draw");
}

// Minimum total over the first moves selected by `pick`.
struct Best {
  std::optional<int> total;
  std::vector<Move> argmin;
};

template <class Pick>
Best best_first_move(const Tablebase& tb, Pick pick, std::string& listing) {
  Best best;
  std::ostringstream list;
  const Position start = start_position(tb.dims());
  for (const auto& mv : legal_moves(tb.dims(), start)) {
    if (!pick(mv)) continue;
    auto total = first_move_total(tb, mv);
    list << to_string(mv.to) << "=" << describe(total) << " ";
    if (!total) continue;
    if (!best.total || *total < *best.total) {
      best.total = total;
      best.argmin = {mv};
    } else if (*total == *best.total) {
      best.argmin.push_back(mv);
    }
  }
  listing = list.str();
  if (!listing.empty()) listing.pop_back();
  return best;
}

}  // namespace

std::optional<int> first_move_total(const Tablebase& tb, const Move& first) {
  const Value after = value_after(tb, start_position(tb.dims()), first);
  if (!after.is_win()) return std::nullopt;
  return 1 + white_moves(after, Side::Black);
}

ClaimReport verify_theorem(const Tablebase& tb) {
  const Dims d = tb.dims();
  require_theorem_scope(d);
  const Value v = tb.probe(start_position(d));
  std::optional<int> observed;
  std::string details;
  if (v.is_win()) {
    observed = white_moves(v, Side::White);
    details = "start value " + to_string(v);
  } else {
    details = "start position is " + to_string(v) + "; a forced win was expected";
  }
  return make_report("fm_equals_g", d, Expectation::equal(theorem_target(d.n)), observed, details);
}

FirstMoveSweep sweep_first_moves(const Tablebase& tb) {
  const Dims d = tb.dims();
  require_theorem_scope(d);
  const Position start = start_position(d);
  FirstMoveSweep sweep;
  std::optional<int> minimum;
  std::optional<int> confine_total;
  const Square confine{d.m - 1, 1};
  for (const auto& mv : legal_moves(d, start)) {
    auto total = first_move_total(tb, mv);
    sweep.totals.push_back({mv, total});
    if (total && (!minimum || *total < *minimum)) minimum = total;
    if (mv.piece == Piece::WR && mv.to == confine) confine_total = total;
  }

  int attaining = 0;
  for (const auto& t : sweep.totals)
    if (t.total && t.total == minimum) ++attaining;

  std::ostringstream details;
  details << "minimum total " << describe(minimum) << ", rook to " << to_string(confine) << " totals "
          << describe(confine_total) << ", " << attaining << " first move(s) attain the minimum"
          << (attaining == 1 ? " (unique)" : "");
  sweep.report = make_report("first_move_fastest", d, Expectation::equal(theorem_target(d.n)),
                             confine_total, details.str());
  sweep.report.pass = sweep.report.pass && confine_total == minimum;
  return sweep;
}

namespace {

struct TreeWalk {
  Dims dims;
  int limit = 0;  // White-move depth treated as non-terminating
  int leaves = 0;
  int max_depth = 0;
  int max_waiting = 0;
  int waiting_lines = 0;
  std::optional<std::string> failure;
  GameTrace path;
  std::optional<GameTrace> failure_trace;

  void fail(const std::string& why) {
    if (failure) return;
    failure = why;
    failure_trace = path;
  }

  // `pos` is White to move.
  void visit(const Position& pos, const ScriptState& state, int depth) {
    if (failure) return;
    if (depth >= limit) return fail("no mate within " + std::to_string(limit) + " White moves");

    ScriptedMove sm;
    try {
      sm = scripted_white(dims, pos, state);
    } catch (const OffScriptError& e) {
      return fail(e.what());
    }
    max_waiting = std::max(max_waiting, sm.next.waiting_moves_used);

    auto next = apply_move(dims, pos, sm.move);
    path.moves.push_back(sm.move);
    const Position after = std::get<Position>(next);
    path.positions.push_back(after);

    const TerminalKind term = classify(dims, after);
    if (term == TerminalKind::Checkmate) {
      ++leaves;
      max_depth = std::max(max_depth, depth + 1);
      if (sm.next.waiting_moves_used > 0) ++waiting_lines;
    } else if (term == TerminalKind::Stalemate) {
      fail("scripted line ends in stalemate");
    } else {
      for (const auto& reply : legal_moves(dims, after)) {
        if (failure) break;
        path.moves.push_back(reply);
        if (reply.captures_rook) {
          fail("black captures the rook");
          path.moves.pop_back();
          break;
        }
        const Position back = std::get<Position>(apply_move_unchecked(after, reply));
        path.positions.push_back(back);
        visit(back, sm.next, depth + 1);
        path.positions.pop_back();
        path.moves.pop_back();
      }
    }
    path.positions.pop_back();
    path.moves.pop_back();
  }
};

}  // namespace

ClaimReport verify_scripted_exhaustive(Dims dims) {
  require_theorem_scope(dims);
  const int g = theorem_target(dims.n);
  TreeWalk walk;
  walk.dims = dims;
  walk.limit = 4 * g + 8;
  walk.path.dims = dims;
  const Position start = start_position(dims);
  walk.path.positions.push_back(start);
  walk.visit(start, ScriptState{}, 0);

  std::ostringstream details;
  details << walk.leaves << " defence lines, all checkmate: " << (walk.failure ? "no" : "yes")
          << ", longest " << walk.max_depth << " White moves, at most " << walk.max_waiting
          << " waiting move(s) per line, " << walk.waiting_lines << " line(s) use a waiting move";
  if (walk.failure) details << "; failure: " << *walk.failure;

  std::optional<int> observed;
  if (!walk.failure) observed = walk.max_depth;
  auto report = make_report("scripted_mate_exhaustive", dims, Expectation::equal(g), observed,
                            details.str());
  report.pass = report.pass && walk.max_waiting <= 1;
  if (walk.failure_trace) {
    walk.failure_trace->white_move_count = static_cast<int>(
        std::count_if(walk.failure_trace->moves.begin(), walk.failure_trace->moves.end(),
                      [](const Move& mv) { return mv.piece != Piece::BK; }));
    report.trace = walk.failure_trace;
  }
  return report;
}

ClaimReport verify_case1_bound(const Tablebase& tb) {
  const Dims d = tb.dims();
  require_theorem_scope(d);
  std::string listing;
  Best best = best_first_move(
      tb, [](const Move& mv) { return mv.piece == Piece::WR && mv.to.col == 1; }, listing);
  const int formula = vertical_formula(d);
  std::ostringstream details;
  details << "rook along column 1: " << listing << "; best " << describe(best.total)
          << ", formula 2+(n-3)+(ceil(m/2)-1) = " << formula
          << (best.total == formula ? " (equal)" : " (differs)");
  // 9x9 is the one board where an exact figure (12) is on record.
  const bool exact = d == Dims{9, 9};
  return make_report("vertical_first_rook_bound", d,
                     exact ? Expectation::equal(12) : Expectation::at_least(d.n), best.total,
                     details.str());
}

ClaimReport verify_case2_bound(const Tablebase& tb) {
  const Dims d = tb.dims();
  require_theorem_scope(d);
  std::string listing;
  Best best = best_first_move(
      tb,
      [&](const Move& mv) {
        return mv.piece == Piece::WR && mv.to.row == 1 && mv.to.col != d.m - 1;
      },
      listing);
  std::string details = "rook along row 1 excluding (m-1,1): " + listing + "; best " + describe(best.total);
  return make_report("horizontal_first_rook_bound", d, Expectation::at_least(d.n), best.total, details);
}

ClaimReport survival_of(std::shared_ptr<const Tablebase> tb, const Policy& black) {
  const Dims d = tb->dims();
  require_theorem_scope(d);
  const int g = theorem_target(d.n);
  const auto white = Policy::optimal_white(tb);
  GameTrace trace = play_out(d, white, black, 8 * (d.m + d.n));
  std::optional<int> observed;
  if (trace.terminal == TerminalKind::Checkmate) observed = trace.white_move_count;

  std::ostringstream details;
  details << to_string(black.kind()) << " game ends in " << to_string(trace.terminal) << " after "
          << trace.white_move_count << " White moves";
  if (observed) details << "; black survives " << *observed - 1 << " White moves before the mate";

  const bool optimal = black.kind() == PolicyKind::OptimalBlack;
  auto report = make_report(optimal ? "survival_optimal_black" : "survival_heuristic_black", d,
                            optimal ? Expectation::equal(g) : Expectation::at_least(g - 1),
                            observed, details.str(), optimal);
  report.trace = std::move(trace);
  return report;
}

std::optional<Range> parse_range(const std::string& text) {
  auto to_int = [](const std::string& s) -> std::optional<int> {
    if (s.empty()) return std::nullopt;
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) return std::nullopt;
      return v;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    auto v = to_int(text);
    if (!v) return std::nullopt;
    return Range{*v, *v};
  }
  auto lo = to_int(text.substr(0, dots));
  auto hi = to_int(text.substr(dots + 2));
  if (!lo || !hi) return std::nullopt;
  return Range{*lo, *hi};
}

namespace {

void run_cell(Dims d, TablebaseCache& cache, const SuiteOptions& opts,
              std::vector<ClaimReport>& out) {
  std::shared_ptr<const Tablebase> tb;
  try {
    tb = cache.get(d);
  } catch (const Error& e) {
    auto r = make_report("generate", d, Expectation::equal(0), std::nullopt, e.what());
    out.push_back(std::move(r));
    return;
  }

  out.push_back(verify_theorem(*tb));
  auto sweep = sweep_first_moves(*tb);
  out.push_back(sweep.report);
  out.push_back(verify_scripted_exhaustive(d));
  out.push_back(verify_case1_bound(*tb));
  out.push_back(verify_case2_bound(*tb));
  out.push_back(make_report("vertical_formula_at_least_n", d, Expectation::at_least(d.n),
                            vertical_formula(d), "2+(n-3)+(ceil(m/2)-1) evaluated arithmetically"));
  out.push_back(survival_of(tb, Policy::optimal_black(tb)));
  if (opts.include_heuristic) out.push_back(survival_of(tb, Policy::heuristic_black()));

  auto total_of = [&](Square to) -> std::optional<int> {
    for (const auto& t : sweep.totals)
      if (t.move.piece == Piece::WR && t.move.to == to) return t.total;
    return std::nullopt;
  };
  if (d == Dims{8, 8}) {
    out.push_back(make_report("first_move_7_1_total", d, Expectation::equal(9), total_of({7, 1}),
                              "rook (1,1)-(7,1) then optimal play"));
    out.push_back(make_report(
        "first_move_1_7_total", d, Expectation::equal(10), total_of({1, 7}),
        "rook (1,1)-(1,7) then optimal play; vertical formula gives " +
            std::to_string(vertical_formula(d))));
  }
  if (d == Dims{9, 9}) {
    out.push_back(make_report("first_move_1_8_total", d, Expectation::equal(12), total_of({1, 8}),
                              "rook (1,1)-(1,8) then optimal play"));
  }
}

}  // namespace

SuiteReport run_suite(Range m_range, Range n_range, TablebaseCache& cache, const SuiteOptions& opts) {
  SuiteReport suite;
  for (int m = m_range.lo; m <= m_range.hi; ++m) {
    for (int n = n_range.lo; n <= n_range.hi; ++n) {
      if (m < 4 || n < 5) continue;
      run_cell({m, n}, cache, opts, suite.reports);
    }
  }
  std::stable_sort(suite.reports.begin(), suite.reports.end(),
                   [](const ClaimReport& a, const ClaimReport& b) {
                     return std::tie(a.dims.m, a.dims.n, a.claim_id) <
                            std::tie(b.dims.m, b.dims.n, b.claim_id);
                   });
  for (auto& r : suite.reports) {
    if (r.pass && !opts.keep_traces) r.trace.reset();
    if (r.claim_id == "generate") ++suite.summary.resource_errors;
    else if (r.pass) ++suite.summary.passed;
    else if (r.hard) ++suite.summary.failed;
    else ++suite.summary.soft_failed;
  }
  return suite;
}

}  // namespace krk
