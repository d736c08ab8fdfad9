#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqfont {

// Machine-readable failure codes. The CLI prints these verbatim so scripts can
// branch on them; library code throws Error with the matching code.
enum class ErrorCode {
  MissingGlyph,
  UnreadableSource,
  BadRatio,
  EmptyReferencePool,
  UnknownCharacter,
  GridTooSmall,
  ShapeMismatch,
  DimensionMismatch,
  LayoutMismatch,
  EmptyReferences,
  IndexOutOfRange,
  MissingCheckpoint,
  MissingGroundTruth,
  DivergenceDetected,
  ExtractorUnavailable,
  ConfigError,
  RunDirLocked,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

// Unicode scalar value.
using Codepoint = std::uint32_t;

std::string codepoint_to_hex(Codepoint cp);
Codepoint codepoint_from_hex(const std::string& hex);

// splitmix64; used to derive independent per-entity seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_string(const std::string& s);

// Shuffle with explicit rejection-sampled draws so results do not depend on
// the standard library's uniform_int_distribution.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(v[i - 1], v[draw % bound]);
  }
}

}  // namespace vqfont
