#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "vqfont/common.hpp"

namespace vqfont::data {

// Minimal TrueType (glyf-outline) loader and rasterizer. Covers what a glyph
// dataset pipeline needs: cmap formats 4/12, simple and composite glyphs,
// nonzero-winding scanline fill with 4x4 subsample antialiasing. No hinting.
class TrueTypeFont {
 public:
  explicit TrueTypeFont(const std::string& path);  // throws UnreadableSource

  bool has_glyph(Codepoint cp) const;

  // White background (1.0), black ink (0.0), glyph bbox centered with a
  // fixed margin; scale is tied to units-per-em so weights stay consistent
  // across characters. Deterministic: same inputs give bit-identical output.
  // Throws MissingGlyph when the font has no mapping for cp.
  torch::Tensor render(Codepoint cp, int size) const;

  int units_per_em() const { return units_per_em_; }

 private:
  struct Point {
    float x, y;
    bool on_curve;
  };
  using Contour = std::vector<Point>;

  std::uint16_t glyph_index(Codepoint cp) const;
  void load_outline(std::uint16_t glyph, std::vector<Contour>& out, float ox, float oy,
                    float xx, float xy, float yx, float yy, int depth) const;

  std::vector<std::uint8_t> bytes_;
  std::uint32_t cmap_off_ = 0, loca_off_ = 0, glyf_off_ = 0;
  std::uint32_t glyf_len_ = 0;
  int units_per_em_ = 1000;
  bool long_loca_ = false;
  std::uint16_t num_glyphs_ = 0;
};

}  // namespace vqfont::data
