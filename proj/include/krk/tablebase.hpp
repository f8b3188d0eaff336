// Distance-to-mate tablebase for KRK on an m x n board.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "krk/rules.hpp"

namespace krk {

// Game value of a position from White's point of view, counted in plies.
struct Value {
  enum class Tag : std::uint8_t { Illegal, Draw, WinIn };

  Tag tag = Tag::Illegal;
  int plies = 0;  // meaningful only for WinIn

  static Value illegal() { return {Tag::Illegal, 0}; }
  static Value draw() { return {Tag::Draw, 0}; }
  static Value win_in(int plies) { return {Tag::WinIn, plies}; }

  bool is_win() const { return tag == Tag::WinIn; }
  bool is_draw() const { return tag == Tag::Draw; }
  bool is_illegal() const { return tag == Tag::Illegal; }

  friend bool operator==(const Value&, const Value&) = default;
};

std::string to_string(const Value& v);

// On-disk / in-memory value encoding.
inline constexpr std::uint16_t kIllegalCode = 0xFFFF;
inline constexpr std::uint16_t kDrawCode = 0xFFFE;

Value decode_value(std::uint16_t code);
std::uint16_t encode_value(const Value& v);

// Number of White moves until mate, counting the mating move. Throws
// NotAWin for Draw or Illegal.
int white_moves(const Value& v, Side stm);

inline constexpr int kGeneratorVersion = 1;
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint8_t kFlagPliesMetric = 0x01;
inline constexpr std::uint8_t kDigestSha256 = 0x01;

struct TablebaseMeta {
  int generator_version = kGeneratorVersion;
  std::uint8_t flags = kFlagPliesMetric;
  std::array<std::uint8_t, 32> digest{};  // SHA-256 of the serialized body
};

class Tablebase {
 public:
  // Takes ownership of fully resolved codes (one per index_of slot).
  Tablebase(Dims dims, std::vector<std::uint16_t> codes);

  Dims dims() const { return dims_; }
  const TablebaseMeta& meta() const { return meta_; }
  std::span<const std::uint16_t> codes() const { return codes_; }
  std::size_t size() const { return codes_.size(); }

  Value at(std::uint64_t idx) const { return decode_value(codes_.at(idx)); }

  // Stored value; Illegal for invariant-violating layouts. Throws
  // DimsMismatch when a piece lies outside this table's board.
  Value probe(const Position& pos) const;
  // Also checks that `dims` is this table's board.
  Value probe(Dims dims, const Position& pos) const;

  // Largest stored WinIn ply count.
  int max_plies() const;

 private:
  Dims dims_;
  std::vector<std::uint16_t> codes_;
  TablebaseMeta meta_;
};

struct GenerateOptions {
  unsigned workers = 0;        // 0 = hardware concurrency
  std::uint64_t cap = 400;     // max m*n
};

// Bytes held by the value array: 2 bytes * 2*(m*n)^3.
std::uint64_t required_bytes(Dims dims);

// Retrograde solve. Throws Resource when m*n exceeds the cap.
Tablebase generate(Dims dims, const GenerateOptions& opts = {});

std::vector<std::uint8_t> serialize(const Tablebase& tb);
Tablebase deserialize(std::span<const std::uint8_t> bytes);
void save(const Tablebase& tb, const std::filesystem::path& dest);
Tablebase load(const std::filesystem::path& src);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);
std::string hex(std::span<const std::uint8_t> bytes);

struct AnnotatedMove {
  Move move;
  Value after;  // value of the resulting position; rook capture is Draw
};

// Value of the position reached by `mv` (Draw for a rook capture).
Value value_after(const Tablebase& tb, const Position& pos, const Move& mv);

// Every legal move with its resulting value, best first for the side to
// move. Throws Terminal when the position has no legal moves.
std::vector<AnnotatedMove> best_moves(const Tablebase& tb, const Position& pos);

}  // namespace krk
