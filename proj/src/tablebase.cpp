#include "krk/tablebase.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <thread>

namespace krk {

std::string to_string(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Illegal: return "illegal";
    case Value::Tag::Draw: return "draw";
    case Value::Tag::WinIn: return "win in " + std::to_string(v.plies) + " plies";
  }
  return "?";
}

Value decode_value(std::uint16_t code) {
  if (code == kIllegalCode) return Value::illegal();
  if (code == kDrawCode) return Value::draw();
  return Value::win_in(code);
}

std::uint16_t encode_value(const Value& v) {
  switch (v.tag) {
    case Value::Tag::Illegal: return kIllegalCode;
    case Value::Tag::Draw: return kDrawCode;
    case Value::Tag::WinIn: return static_cast<std::uint16_t>(v.plies);
  }
  return kIllegalCode;
}

int white_moves(const Value& v, Side stm) {
  if (!v.is_win()) throw Error(ErrorCode::NotAWin, "value is " + to_string(v) + ", not a win");
  return stm == Side::White ? (v.plies + 1) / 2 : v.plies / 2;
}

namespace {

// Scratch code for positions not yet resolved during generation.
constexpr std::uint16_t kUnknown = 0xFFFD;
constexpr std::size_t kHeaderBytes = 22;
constexpr std::size_t kTrailerBytes = 33;
constexpr char kMagic[8] = {'K', 'R', 'K', 'T', 'B', '1', '\0', '\0'};

unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Splits [begin, end) into contiguous chunks, one per worker, and sums the
// counts returned by fn(chunk_begin, chunk_end).
template <class Fn>
std::uint64_t parallel_count(std::uint64_t begin, std::uint64_t end, unsigned workers, Fn fn) {
  const std::uint64_t total = end - begin;
  if (workers <= 1 || total < 4096) return fn(begin, end);
  std::vector<std::thread> pool;
  std::vector<std::uint64_t> counts(workers, 0);
  const std::uint64_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t lo = begin + w * chunk;
    std::uint64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi] { counts[w] = fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

// Index arithmetic shared by the solver's hot loops.
struct Indexer {
  Dims dims;
  std::uint64_t s;

  explicit Indexer(Dims d) : dims(d), s(static_cast<std::uint64_t>(d.squares())) {}

  std::uint64_t index(const Position& p) const {
    std::uint64_t stm = p.stm == Side::White ? 0 : 1;
    return ((stm * s + square_index(dims, p.wk)) * s + square_index(dims, p.wr)) * s +
           square_index(dims, p.bk);
  }

  Position decode(std::uint64_t idx) const {
    Position p;
    p.bk = square_at(dims, static_cast<int>(idx % s));
    idx /= s;
    p.wr = square_at(dims, static_cast<int>(idx % s));
    idx /= s;
    p.wk = square_at(dims, static_cast<int>(idx % s));
    p.stm = idx / s == 0 ? Side::White : Side::Black;
    return p;
  }
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

// Serialized bytes up to and including the digest-algorithm byte.
std::vector<std::uint8_t> serialize_body(Dims dims, std::span<const std::uint16_t> codes) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kHeaderBytes + codes.size() * 2 + kTrailerBytes);
  put_u16(out, kFormatVersion);
  put_u16(out, static_cast<std::uint16_t>(dims.m));
  put_u16(out, static_cast<std::uint16_t>(dims.n));
  out.push_back(kFlagPliesMetric);
  out.insert(out.end(), 7, 0);
  for (auto c : codes) put_u16(out, c);
  out.push_back(kDigestSha256);
  return out;
}

}  // namespace

Tablebase::Tablebase(Dims dims, std::vector<std::uint16_t> codes)
    : dims_(dims), codes_(std::move(codes)) {
  validate_dims(dims_);
  if (codes_.size() != position_count(dims_))
    throw Error(ErrorCode::Corrupt, "value array size does not match board");
  meta_.digest = sha256(serialize_body(dims_, codes_));
}

Value Tablebase::probe(const Position& pos) const {
  if (!on_board(dims_, pos.wk) || !on_board(dims_, pos.wr) || !on_board(dims_, pos.bk))
    throw Error(ErrorCode::DimsMismatch, "position does not fit a " + std::to_string(dims_.m) +
                                             "x" + std::to_string(dims_.n) + " board");
  return decode_value(codes_[index_of(dims_, pos)]);
}

Value Tablebase::probe(Dims dims, const Position& pos) const {
  if (dims != dims_)
    throw Error(ErrorCode::DimsMismatch, "tablebase is " + std::to_string(dims_.m) + "x" +
                                             std::to_string(dims_.n) + ", asked for " +
                                             std::to_string(dims.m) + "x" + std::to_string(dims.n));
  return probe(pos);
}

int Tablebase::max_plies() const {
  int best = -1;
  for (auto c : codes_)
    if (c < kDrawCode) best = std::max<int>(best, c);
  return best;
}

std::uint64_t required_bytes(Dims dims) { return 2 * position_count(dims); }

Tablebase generate(Dims dims, const GenerateOptions& opts) {
  validate_dims(dims);
  if (static_cast<std::uint64_t>(dims.squares()) > opts.cap) {
    throw Error(ErrorCode::Resource,
                "board " + std::to_string(dims.m) + "x" + std::to_string(dims.n) +
                    " exceeds cap m*n <= " + std::to_string(opts.cap) + "; needs " +
                    std::to_string(required_bytes(dims)) + " bytes");
  }
  const unsigned workers = resolve_workers(opts.workers);
  const Indexer ix(dims);
  const std::uint64_t half = ix.s * ix.s * ix.s;
  std::vector<std::uint16_t> codes(2 * half, kUnknown);

  // Illegal layouts, mates, stalemates and safe rook captures.
  parallel_count(0, 2 * half, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      const Position p = ix.decode(i);
      if (!is_valid(dims, p)) {
        codes[i] = kIllegalCode;
        continue;
      }
      if (p.stm == Side::White) continue;
      bool any = false, capture = false;
      for_each_legal_move(dims, p, [&](const Move& mv) {
        any = true;
        capture = capture || mv.captures_rook;
      });
      if (!any) codes[i] = black_in_check(p) ? 0 : kDrawCode;
      else if (capture) codes[i] = kDrawCode;
    }
    return std::uint64_t{0};
  });

  // Round p resolves positions at distance p. Odd rounds touch only White to
  // move and read only Black to move, even rounds the reverse, so a round
  // never reads a slot it writes and the result is schedule independent.
  for (int p = 1;; ++p) {
    if (p >= kUnknown) throw Error(ErrorCode::Resource, "distance exceeds value encoding");
    const bool white = p % 2 == 1;
    const std::uint64_t base = white ? 0 : half;
    const auto target = static_cast<std::uint16_t>(p - 1);

    std::uint64_t added = parallel_count(base, base + half, workers, [&](std::uint64_t lo,
                                                                         std::uint64_t hi) {
      std::uint64_t n = 0;
      for (std::uint64_t i = lo; i < hi; ++i) {
        if (codes[i] != kUnknown) continue;
        const Position pos = ix.decode(i);
        bool resolved;
        if (white) {
          resolved = false;
          for_each_legal_move(dims, pos, [&](const Move& mv) {
            if (resolved) return;
            Position child = std::get<Position>(apply_move_unchecked(pos, mv));
            resolved = codes[ix.index(child)] == target;
          });
        } else {
          // Captures were settled as Draw above, so every child is a position.
          resolved = true;
          for_each_legal_move(dims, pos, [&](const Move& mv) {
            if (!resolved) return;
            Position child = std::get<Position>(apply_move_unchecked(pos, mv));
            resolved = codes[ix.index(child)] < kUnknown;
          });
        }
        if (resolved) {
          codes[i] = static_cast<std::uint16_t>(p);
          ++n;
        }
      }
      return n;
    });
    if (added == 0) break;
  }

  for (auto& c : codes)
    if (c == kUnknown) c = kDrawCode;
  return Tablebase(dims, std::move(codes));
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size())
    throw Error(ErrorCode::Io, "SHA-256 computation failed");
  return out;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s += digits[b >> 4];
    s += digits[b & 0xF];
  }
  return s;
}

std::vector<std::uint8_t> serialize(const Tablebase& tb) {
  auto out = serialize_body(tb.dims(), tb.codes());
  out.insert(out.end(), tb.meta().digest.begin(), tb.meta().digest.end());
  return out;
}

Tablebase deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::Corrupt, "file truncated in header");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
    throw Error(ErrorCode::UnsupportedFormat, "not a KRK tablebase (bad magic)");
  const std::uint16_t version = get_u16(bytes, 8);
  if (version != kFormatVersion)
    throw Error(ErrorCode::UnsupportedFormat, "unsupported format version " + std::to_string(version));
  const Dims dims{get_u16(bytes, 10), get_u16(bytes, 12)};
  if (dims.m < 3 || dims.n < 3) throw Error(ErrorCode::Corrupt, "invalid board size in header");
  if (bytes[14] != kFlagPliesMetric)
    throw Error(ErrorCode::UnsupportedFormat, "unsupported convention flags");
  for (std::size_t i = 15; i < kHeaderBytes; ++i)
    if (bytes[i] != 0) throw Error(ErrorCode::Corrupt, "reserved header bytes are not zero");

  const std::uint64_t count = position_count(dims);
  const std::uint64_t expected = kHeaderBytes + 2 * count + kTrailerBytes;
  if (bytes.size() != expected)
    throw Error(ErrorCode::Corrupt, "file size " + std::to_string(bytes.size()) + ", expected " +
                                        std::to_string(expected));
  const std::size_t algo_at = kHeaderBytes + 2 * count;
  if (bytes[algo_at] != kDigestSha256)
    throw Error(ErrorCode::UnsupportedFormat, "unknown digest algorithm");
  auto digest = sha256(bytes.first(algo_at + 1));
  if (!std::equal(digest.begin(), digest.end(), bytes.begin() + algo_at + 1))
    throw Error(ErrorCode::Corrupt, "digest mismatch");

  std::vector<std::uint16_t> codes(count);
  for (std::uint64_t i = 0; i < count; ++i) codes[i] = get_u16(bytes, kHeaderBytes + 2 * i);
  return Tablebase(dims, std::move(codes));
}

void save(const Tablebase& tb, const std::filesystem::path& dest) {
  auto bytes = serialize(tb);
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + dest.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + dest.string());
}

Tablebase load(const std::filesystem::path& src) {
  std::ifstream in(src, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + src.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

Value value_after(const Tablebase& tb, const Position& pos, const Move& mv) {
  auto next = apply_move(tb.dims(), pos, mv);
  if (std::holds_alternative<RookCaptured>(next)) return Value::draw();
  return tb.probe(std::get<Position>(next));
}

std::vector<AnnotatedMove> best_moves(const Tablebase& tb, const Position& pos) {
  const auto moves = legal_moves(tb.dims(), pos);
  if (moves.empty())
    throw Error(ErrorCode::Terminal, std::string("position is terminal (") +
                                         to_string(classify(tb.dims(), pos)) + ")");
  std::vector<AnnotatedMove> out;
  out.reserve(moves.size());
  for (const auto& mv : moves) {
    auto next = apply_move_unchecked(pos, mv);
    Value after = std::holds_alternative<RookCaptured>(next)
                      ? Value::draw()
                      : tb.probe(std::get<Position>(next));
    out.push_back({mv, after});
  }

  // Rank: lower is better for the side to move.
  auto rank = [&](const Value& v) -> long {
    if (pos.stm == Side::White) return v.is_win() ? v.plies : 1L << 20;
    return v.is_win() ? -static_cast<long>(v.plies) : -(1L << 20);
  };
  std::stable_sort(out.begin(), out.end(), [&](const AnnotatedMove& a, const AnnotatedMove& b) {
    return rank(a.after) < rank(b.after);
  });
  return out;
}

}  // namespace krk
