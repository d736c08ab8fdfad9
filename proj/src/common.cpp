#include "vqfont/common.hpp"

#include <cctype>
#include <cstdio>

namespace vqfont {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingGlyph: return "MISSING_GLYPH";
    case ErrorCode::UnreadableSource: return "UNREADABLE_SOURCE";
    case ErrorCode::BadRatio: return "BAD_RATIO";
    case ErrorCode::EmptyReferencePool: return "EMPTY_REFERENCE_POOL";
    case ErrorCode::UnknownCharacter: return "UNKNOWN_CHARACTER";
    case ErrorCode::GridTooSmall: return "GRID_TOO_SMALL";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::LayoutMismatch: return "LAYOUT_MISMATCH";
    case ErrorCode::EmptyReferences: return "EMPTY_REFERENCES";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::MissingCheckpoint: return "MISSING_CHECKPOINT";
    case ErrorCode::MissingGroundTruth: return "MISSING_GROUND_TRUTH";
    case ErrorCode::DivergenceDetected: return "DIVERGENCE_DETECTED";
    case ErrorCode::ExtractorUnavailable: return "EXTRACTOR_UNAVAILABLE";
    case ErrorCode::ConfigError: return "CONFIG_ERROR";
    case ErrorCode::RunDirLocked: return "RUN_DIR_LOCKED";
    case ErrorCode::IoError: return "IO_ERROR";
  }
  return "UNKNOWN_ERROR";
}

std::string codepoint_to_hex(Codepoint cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04X", cp);
  return std::string(buf);
}

Codepoint codepoint_from_hex(const std::string& hex) {
  require(!hex.empty(), ErrorCode::ConfigError, "empty codepoint string");
  Codepoint value = 0;
  std::size_t i = 0;
  if (hex.size() > 2 && hex[0] == 'U' && hex[1] == '+') i = 2;
  if (hex.size() > 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) i = 2;
  require(i < hex.size(), ErrorCode::ConfigError, "bad codepoint: " + hex);
  for (; i < hex.size(); ++i) {
    const char c = hex[i];
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = 10 + c - 'a';
    else if (c >= 'A' && c <= 'F') digit = 10 + c - 'A';
    else fail(ErrorCode::ConfigError, "bad codepoint: " + hex);
    value = value * 16 + static_cast<Codepoint>(digit);
    require(value <= 0x10FFFF, ErrorCode::ConfigError, "codepoint out of range: " + hex);
  }
  return value;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace vqfont
