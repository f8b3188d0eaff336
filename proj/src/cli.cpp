#include "krk/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

#include "krk/api.hpp"
#include "krk/report.hpp"

namespace krk {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string m = "";
  std::string n = "";
  std::string tb_file;
  std::uint64_t cap = 400;
  unsigned workers = 0;
  bool json_flag = false;
  std::string json_target;  // empty = stdout
};

int single(const std::string& flag, const std::string& text) {
  auto r = parse_range(text);
  if (!r || r->lo != r->hi) throw UsageError(flag + " needs a single integer, got '" + text + "'");
  return r->lo;
}

Square square_flag(const std::string& flag, const std::string& text) {
  auto s = parse_square(text);
  if (!s) throw UsageError(flag + " must be \"c,r\", got '" + text + "'");
  return *s;
}

CacheConfig cache_config(const Common& c) {
  CacheConfig cfg;
  cfg.generate.cap = c.cap;
  cfg.generate.workers = c.workers;
  cfg.directory = tablebase_dir_from_env();
  return cfg;
}

// Tablebase from --tb or from the (env-configured) cache. --m/--n may be
// omitted when --tb is given.
std::pair<Dims, std::shared_ptr<const Tablebase>> open_table(const Common& c) {
  if (!c.tb_file.empty()) {
    auto tb = std::make_shared<const Tablebase>(load(c.tb_file));
    if (!c.m.empty() && !c.n.empty()) {
      Dims want{single("--m", c.m), single("--n", c.n)};
      if (want != tb->dims())
        throw UsageError("--tb holds a " + std::to_string(tb->dims().m) + "x" +
                         std::to_string(tb->dims().n) + " table");
    }
    return {tb->dims(), tb};
  }
  if (c.m.empty() || c.n.empty()) throw UsageError("--m and --n are required");
  Dims d{single("--m", c.m), single("--n", c.n)};
  validate_dims(d);
  TablebaseCache cache(cache_config(c));
  return {d, cache.get(d)};
}

void emit_json(const Common& c, const json& j, std::ostream& out) {
  if (c.json_target.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(c.json_target);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + c.json_target);
  f << j.dump(2) << '\n';
}

void add_board_flags(CLI::App* sub, Common& c) {
  sub->add_option("--m", c.m, "board columns");
  sub->add_option("--n", c.n, "board rows");
  sub->add_option("--cap", c.cap, "largest m*n to generate")->capture_default_str();
  sub->add_option("--workers", c.workers, "generation threads (0 = all cores)");
}

CLI::Option* add_json_flag(CLI::App* sub, Common& c) {
  return sub->add_option("--json", c.json_target, "machine-readable output, to FILE or stdout")
      ->expected(0, 1);
}

std::string value_text(const Value& v, Side stm) {
  if (!v.is_win()) return to_string(v);
  return "win in " + std::to_string(white_moves(v, stm)) + " White moves (" + std::to_string(v.plies) +
         " plies)";
}

int cmd_gen(const Common& c, const std::string& out_file, std::ostream& out) {
  if (c.m.empty() || c.n.empty()) throw UsageError("--m and --n are required");
  Dims d{single("--m", c.m), single("--n", c.n)};
  validate_dims(d);
  Tablebase tb = generate(d, {c.workers, c.cap});
  std::filesystem::path dest = out_file;
  if (dest.empty()) {
    std::string name = "krk_" + std::to_string(d.m) + "x" + std::to_string(d.n) + ".tb";
    auto dir = tablebase_dir_from_env();
    dest = dir ? *dir / name : std::filesystem::path(name);
    if (dir) std::filesystem::create_directories(*dir);
  }
  save(tb, dest);
  const Position start = start_position(d);
  const Value v = tb.probe(start);
  if (c.json_flag) {
    emit_json(c,
              {{"m", d.m},
               {"n", d.n},
               {"file", dest.string()},
               {"positions", tb.size()},
               {"max_plies", tb.max_plies()},
               {"sha256", hex(tb.meta().digest)},
               {"start_plies", v.is_win() ? json(v.plies) : json(nullptr)}},
              out);
    return kExitOk;
  }
  out << "wrote " << dest.string() << " (" << tb.size() << " positions, longest mate "
      << tb.max_plies() << " plies)\n"
      << "sha256 " << hex(tb.meta().digest) << '\n'
      << "start position: " << value_text(v, Side::White) << '\n';
  return kExitOk;
}

int cmd_verify(const Common& c, bool traces, bool no_heuristic, std::ostream& out) {
  auto m = parse_range(c.m.empty() ? "4..8" : c.m);
  auto n = parse_range(c.n.empty() ? "5..8" : c.n);
  if (!m) throw UsageError("--m must be a..b or an integer");
  if (!n) throw UsageError("--n must be a..b or an integer");
  TablebaseCache cache(cache_config(c));
  SuiteOptions opts;
  opts.keep_traces = traces;
  opts.include_heuristic = !no_heuristic;
  SuiteReport suite = run_suite(*m, *n, cache, opts);

  if (c.json_flag && c.json_target.empty()) {
    out << to_json(suite.reports).dump(2) << '\n';
  } else {
    for (const auto& r : suite.reports) {
      out << (r.pass ? "PASS " : r.hard ? "FAIL " : "SOFT ") << std::setw(2) << r.dims.m << "x"
          << std::left << std::setw(3) << r.dims.n << std::setw(30) << r.claim_id << std::right
          << " expected " << std::setw(5) << r.expected.to_string() << " observed "
          << std::setw(4) << (r.observed ? std::to_string(*r.observed) : "draw") << "  " << r.details
          << '\n';
    }
    out << "summary: " << suite.summary.passed << " passed, " << suite.summary.failed << " failed, "
        << suite.summary.soft_failed << " soft misses, " << suite.summary.resource_errors
        << " resource errors\n";
    if (c.json_flag) {
      emit_json(c, to_json(suite.reports), out);
      out << "report written to " << c.json_target << '\n';
    }
  }
  if (suite.summary.failed > 0) return kExitFailed;
  if (suite.summary.resource_errors > 0) return kExitResource;
  return kExitOk;
}

int cmd_probe(const Common& c, const std::string& wk, const std::string& wr, const std::string& bk,
              const std::string& stm, std::ostream& out) {
  auto side = parse_side(stm);
  if (!side) throw UsageError("--stm must be w or b");
  Position pos{square_flag("--wk", wk), square_flag("--wr", wr), square_flag("--bk", bk), *side};
  auto [d, tb] = open_table(c);
  if (auto defect = position_defect(d, pos)) throw UsageError("invalid position: " + *defect);
  const Value v = tb->probe(d, pos);
  if (c.json_flag) {
    json j = {{"status", v.is_win() ? "win" : v.is_draw() ? "draw" : "illegal"}, {"position", to_json(pos)}};
    if (v.is_win()) {
      j["plies"] = v.plies;
      j["white_moves"] = white_moves(v, pos.stm);
    }
    emit_json(c, j, out);
    return kExitOk;
  }
  out << value_text(v, pos.stm) << '\n';
  return kExitOk;
}

int cmd_first_moves(const Common& c, std::ostream& out) {
  auto [d, tb] = open_table(c);
  FirstMoveSweep sweep = sweep_first_moves(*tb);
  if (c.json_flag) {
    json rows = json::array();
    for (const auto& t : sweep.totals)
      rows.push_back({{"move", to_wire(t.move)}, {"san", to_string(t.move)},
                      {"total", t.total ? json(*t.total) : json(nullptr)}});
    emit_json(c, {{"m", d.m}, {"n", d.n}, {"first_moves", rows}, {"report", to_json(sweep.report)}}, out);
    return sweep.report.pass ? kExitOk : kExitFailed;
  }
  out << "first moves on " << d.m << "x" << d.n
      << " (total White moves to mate with best play afterwards)\n";
  for (const auto& t : sweep.totals) {
    out << "  " << std::left << std::setw(16) << to_string(t.move) << std::right << to_string(t.move.to)
        << ": " << (t.total ? std::to_string(*t.total) : "draw") << '\n';
  }
  out << sweep.report.details << '\n';
  return kExitOk;
}

void print_trace(const GameTrace& trace, std::ostream& out) {
  int number = 0;
  for (std::size_t i = 0; i < trace.moves.size(); ++i) {
    const Move& mv = trace.moves[i];
    if (mv.piece != Piece::BK) {
      out << std::setw(3) << ++number << ". " << std::left << std::setw(16) << to_string(mv) << std::right;
    } else {
      if (i == 0) out << std::setw(3) << number << ". " << std::setw(16) << "...";
      out << to_string(mv) << '\n';
    }
  }
  if (!trace.moves.empty() && trace.moves.back().piece != Piece::BK) out << '\n';
}

std::string ending_text(const GameTrace& trace) {
  switch (trace.terminal) {
    case TerminalKind::Checkmate:
      return "checkmate in " + std::to_string(trace.white_move_count) + " White moves";
    case TerminalKind::Stalemate: return "stalemate (draw)";
    case TerminalKind::RookCaptured: return "rook captured (draw)";
    case TerminalKind::Ongoing: return "no result within the move budget";
  }
  return "";
}

int cmd_best_line(const Common& c, const std::string& first, std::ostream& out) {
  auto [d, tb] = open_table(c);
  const Position start = start_position(d);
  const auto white = Policy::optimal_white(tb);
  const auto black = Policy::optimal_black(tb);
  const int budget = 8 * (d.m + d.n);

  GameTrace trace;
  if (first.empty()) {
    trace = play_out(d, white, black, budget);
  } else {
    auto squares = parse_move_text(first);
    if (!squares) throw UsageError("--first-move must be \"c,r:c,r\"");
    Move mv;
    try {
      mv = find_move(d, start, squares->first, squares->second);
    } catch (const Error& e) {
      throw UsageError(std::string("--first-move is illegal: ") + e.what());
    }
    auto next = apply_move(d, start, mv);
    GameTrace rest = play_out_from(d, std::get<Position>(next), white, black, budget - 1);
    trace = rest;
    trace.positions.insert(trace.positions.begin(), start);
    trace.moves.insert(trace.moves.begin(), mv);
    trace.white_move_count = rest.white_move_count + 1;
  }
  if (c.json_flag) {
    emit_json(c, to_json(trace), out);
    return kExitOk;
  }
  print_trace(trace, out);
  out << ending_text(trace) << '\n';
  return kExitOk;
}

int cmd_play(const Common& c, const std::string& human_text, const std::string& policy,
             std::istream& in, std::ostream& out) {
  auto human = parse_side(human_text);
  if (!human) throw UsageError("--human must be w or b");
  if (policy != "scripted" && policy != "optimal") throw UsageError("--policy must be scripted or optimal");
  auto [d, tb] = open_table(c);
  const Side engine_side = opponent(*human);
  Policy engine = policy == "optimal"
                      ? (engine_side == Side::White ? Policy::optimal_white(tb) : Policy::optimal_black(tb))
                      : (engine_side == Side::White ? Policy::scripted_white() : Policy::heuristic_black());

  Position pos = start_position(d);
  ScriptState script;
  int white_count = 0;
  out << render_board(d, pos);
  for (;;) {
    const TerminalKind term = classify(d, pos);
    if (term == TerminalKind::Checkmate) {
      out << "checkmate in " << white_count << " White moves\n";
      return kExitOk;
    }
    if (term == TerminalKind::Stalemate) {
      out << "stalemate (draw) after " << white_count << " White moves\n";
      return kExitOk;
    }

    Move mv;
    if (pos.stm == engine_side) {
      try {
        mv = engine.choose(d, pos, script);
      } catch (const OffScriptError& e) {
        out << "engine is off its script: " << e.what() << '\n';
        return kExitFailed;
      }
      out << "engine plays " << to_string(mv) << '\n';
    } else {
      const Value v = tb->probe(pos);
      out << "position: " << value_text(v, pos.stm) << "\nyour move (c,r:c,r): " << std::flush;
      std::string line;
      if (!std::getline(in, line)) {
        out << "\ngame abandoned\n";
        return kExitOk;
      }
      auto squares = parse_move_text(line);
      if (!squares) {
        out << "could not parse move '" << line << "'\n";
        continue;
      }
      if (auto why = illegal_reason(d, pos, squares->first, squares->second)) {
        out << "illegal move: " << *why << '\n';
        continue;
      }
      mv = find_move(d, pos, squares->first, squares->second);
    }

    if (mv.piece != Piece::BK) ++white_count;
    auto next = apply_move(d, pos, mv);
    if (std::holds_alternative<RookCaptured>(next)) {
      out << "rook captured (draw)\n";
      return kExitOk;
    }
    pos = std::get<Position>(next);
    out << render_board(d, pos);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"KRK endgame laboratory on m x n boards", "krk"};
  app.require_subcommand(1);

  Common c;
  std::string out_file, wk, wr, bk, stm = "w", first, human = "b", policy = "scripted", host = "127.0.0.1";
  int port = kDefaultPort;
  std::uint64_t budget_mb = 1024;
  bool traces = false, no_heuristic = false;
  std::vector<CLI::Option*> json_opts;

  auto* gen = app.add_subcommand("gen", "generate and save a tablebase");
  add_board_flags(gen, c);
  gen->add_option("--out", out_file, "destination file (default krk_MxN.tb in KRK_TB_DIR or .)");
  json_opts.push_back(add_json_flag(gen, c));

  auto* verify = app.add_subcommand("verify", "check every move-count claim over a grid of boards");
  verify->add_option("--m,--m-range", c.m, "columns, a..b or a single value (default 4..8)");
  verify->add_option("--n,--n-range", c.n, "rows, a..b or a single value (default 5..8)");
  verify->add_option("--cap", c.cap, "largest m*n to generate")->capture_default_str();
  verify->add_option("--workers", c.workers, "generation threads (0 = all cores)");
  verify->add_flag("--traces", traces, "attach game traces to passing claims too");
  verify->add_flag("--no-heuristic", no_heuristic, "skip the heuristic-defence survival claim");
  json_opts.push_back(add_json_flag(verify, c));

  auto* probe = app.add_subcommand("probe", "look up one position");
  add_board_flags(probe, c);
  probe->add_option("--tb", c.tb_file, "tablebase file");
  probe->add_option("--wk", wk, "white king \"c,r\"")->required();
  probe->add_option("--wr", wr, "white rook \"c,r\"")->required();
  probe->add_option("--bk", bk, "black king \"c,r\"")->required();
  probe->add_option("--stm", stm, "side to move, w or b")->capture_default_str();
  json_opts.push_back(add_json_flag(probe, c));

  auto* first_moves = app.add_subcommand("first-moves", "total mate length after each White first move");
  add_board_flags(first_moves, c);
  first_moves->add_option("--tb", c.tb_file, "tablebase file");
  json_opts.push_back(add_json_flag(first_moves, c));

  auto* best_line = app.add_subcommand("best-line", "print an optimal line from the start position");
  add_board_flags(best_line, c);
  best_line->add_option("--tb", c.tb_file, "tablebase file");
  best_line->add_option("--first-move", first, "fix White's first move, \"c,r:c,r\"");
  json_opts.push_back(add_json_flag(best_line, c));

  auto* play = app.add_subcommand("play", "play against the engine in the terminal");
  add_board_flags(play, c);
  play->add_option("--tb", c.tb_file, "tablebase file");
  play->add_option("--human", human, "your side, w or b")->capture_default_str();
  play->add_option("--policy", policy, "engine policy, scripted or optimal")->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "serve the JSON API");
  serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
  serve_cmd->add_option("--cap", c.cap, "largest m*n to generate")->capture_default_str();
  serve_cmd->add_option("--workers", c.workers, "generation threads (0 = all cores)");
  serve_cmd->add_option("--budget-mb", budget_mb, "resident tablebase budget")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  for (auto* opt : json_opts) c.json_flag = c.json_flag || opt->count() > 0;

  try {
    if (*gen) return cmd_gen(c, out_file, out);
    if (*verify) return cmd_verify(c, traces, no_heuristic, out);
    if (*probe) return cmd_probe(c, wk, wr, bk, stm, out);
    if (*first_moves) return cmd_first_moves(c, out);
    if (*best_line) return cmd_best_line(c, first, out);
    if (*play) return cmd_play(c, human, policy, in, out);
    if (*serve_cmd) {
      CacheConfig cfg = cache_config(c);
      cfg.memory_budget = budget_mb << 20;
      ApiService service(cfg);
      out << "listening on " << host << ":" << port << std::endl;
      if (!serve(service, host, port)) {
        err << "krk: cannot listen on " << host << ":" << port << '\n';
        return kExitResource;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "krk: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "krk: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::Resource:
      case ErrorCode::Io:
      case ErrorCode::Corrupt:
      case ErrorCode::UnsupportedFormat:
        return kExitResource;
      default:
        return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace krk
