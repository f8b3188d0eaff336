// Checks of the KRK move-count claims against solved tablebases.
//
// "Moves" are White moves throughout: a mate delivered on White's k-th
// move counts as k.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krk/cache.hpp"
#include "krk/policies.hpp"
#include "krk/tablebase.hpp"

namespace krk {

// n for odd n, n + 1 for even n.
inline int theorem_target(int n) { return n % 2 == 1 ? n : n + 1; }

// 2 + (n - 3) + (ceil(m/2) - 1): moves White needs after a first rook move
// along column 1, by the centralizing-defence count.
inline int vertical_formula(Dims d) { return 2 + (d.n - 3) + ((d.m + 1) / 2 - 1); }

struct Expectation {
  enum class Relation { Equal, AtLeast };

  Relation relation = Relation::Equal;
  int value = 0;

  static Expectation equal(int v) { return {Relation::Equal, v}; }
  static Expectation at_least(int v) { return {Relation::AtLeast, v}; }

  bool satisfied_by(std::optional<int> observed) const;
  std::string to_string() const;  // "9" or ">= 9"
};

struct ClaimReport {
  std::string claim_id;
  Dims dims;
  Expectation expected;
  std::optional<int> observed;  // nullopt = draw / not measurable
  bool pass = false;
  bool hard = true;             // soft claims are reported but do not fail a run
  std::string details;
  std::optional<GameTrace> trace;
};

ClaimReport make_report(std::string claim_id, Dims dims, Expectation expected,
                        std::optional<int> observed, std::string details = {}, bool hard = true);

// Total White moves when White opens with `first` and both sides then play
// optimally; nullopt if that leads to a draw.
std::optional<int> first_move_total(const Tablebase& tb, const Move& first);

struct FirstMoveTotal {
  Move move;
  std::optional<int> total;
};

struct FirstMoveSweep {
  std::vector<FirstMoveTotal> totals;  // generator order
  ClaimReport report;                  // rook -> (m-1,1) attains the minimum, equal to G
};

// White moves to mate from the start under optimal play, versus G(m,n).
ClaimReport verify_theorem(const Tablebase& tb);

FirstMoveSweep sweep_first_moves(const Tablebase& tb);

// Every Black defence against the scripted White plan, explored exhaustively.
ClaimReport verify_scripted_exhaustive(Dims dims);

// First rook moves along column 1: best total >= n. Equality with
// vertical_formula is recorded in details.
ClaimReport verify_case1_bound(const Tablebase& tb);

// First rook moves along row 1, excluding (m-1,1): best total >= n.
ClaimReport verify_case2_bound(const Tablebase& tb);

// Optimal White against `black` from the start. OptimalBlack must last
// exactly G(m,n); HeuristicBlack passes (softly) at >= G(m,n) - 1.
ClaimReport survival_of(std::shared_ptr<const Tablebase> tb, const Policy& black);

struct Range {
  int lo = 0;
  int hi = -1;  // inclusive; empty when hi < lo
  bool empty() const { return hi < lo; }
};

// "a..b" or a single integer.
std::optional<Range> parse_range(const std::string& text);

struct SuiteSummary {
  int passed = 0;
  int failed = 0;       // hard claims that failed
  int soft_failed = 0;  // reported-only claims that missed
  int resource_errors = 0;
  bool ok() const { return failed == 0 && resource_errors == 0; }
};

struct SuiteReport {
  std::vector<ClaimReport> reports;  // ordered by (m, n, claim_id)
  SuiteSummary summary;
};

struct SuiteOptions {
  bool include_heuristic = true;
  bool keep_traces = false;  // attach traces to passing claims too
};

// All checks for every (m, n) in the grid. Cells with m < 4 or n < 5 are
// skipped. Generation failures appear as a failed "generate" claim for
// that cell and do not stop the run.
SuiteReport run_suite(Range m_range, Range n_range, TablebaseCache& cache,
                      const SuiteOptions& opts = {});

}  // namespace krk
