#include "vqfont/synth.hpp"

#include <algorithm>
#include <cmath>

namespace vqfont::data {

namespace {

using structure::RectF;
using structure::StructureCategory;

float uniform(std::mt19937_64& rng, float lo, float hi) {
  // 24-bit mantissa draw; identical across platforms
  const auto bits = static_cast<std::uint32_t>(rng() >> 40);
  return lo + (hi - lo) * (static_cast<float>(bits) / 16777216.0f);
}

struct Seg {
  float x0, y0, x1, y1;
};

// Angular stroke pattern for one component id, in [0,1]^2. Points live on a
// jittered 4x4 lattice which reads as CJK-ish strokework once thickened.
std::vector<Seg> component_pattern(const std::string& comp_id) {
  std::mt19937_64 rng(hash_string(comp_id));
  const auto lattice = [&](int i, int j) {
    const float jx = uniform(rng, -0.06f, 0.06f);
    const float jy = uniform(rng, -0.06f, 0.06f);
    return std::pair<float, float>{0.12f + 0.76f * i / 3.0f + jx, 0.12f + 0.76f * j / 3.0f + jy};
  };

  std::vector<Seg> segs;
  const int n_strokes = 3 + static_cast<int>(rng() % 3);
  // one long anchor stroke keeps every pattern visually grounded
  {
    const auto [x0, y0] = lattice(0, static_cast<int>(rng() % 4));
    const auto [x1, y1] = lattice(3, static_cast<int>(rng() % 4));
    segs.push_back({x0, y0, x1, y1});
  }
  for (int s = 1; s < n_strokes; ++s) {
    const int i0 = static_cast<int>(rng() % 4), j0 = static_cast<int>(rng() % 4);
    int i1 = static_cast<int>(rng() % 4), j1 = static_cast<int>(rng() % 4);
    if (i0 == i1 && j0 == j1) i1 = (i1 + 2) % 4;
    const auto [x0, y0] = lattice(i0, j0);
    const auto [x1, y1] = lattice(i1, j1);
    segs.push_back({x0, y0, x1, y1});
  }
  return segs;
}

struct FontStyle {
  float thickness;   // stroke radius, unit coords
  float slant;       // x += slant * (0.5 - y)
  float wobble_amp;
  float wobble_freq;
  float wobble_phase;
  float scale;
  std::uint64_t detail_seed;
};

FontStyle font_style(const std::string& font_id, std::uint64_t corpus_seed,
                     const std::string& content_font_id) {
  if (font_id == content_font_id) {
    return FontStyle{0.030f, 0.0f, 0.0f, 1.0f, 0.0f, 0.96f, 0};
  }
  std::mt19937_64 rng(mix_seed(corpus_seed, hash_string(font_id)));
  FontStyle st;
  st.thickness = uniform(rng, 0.024f, 0.060f);
  st.slant = uniform(rng, -0.22f, 0.22f);
  st.wobble_amp = uniform(rng, 0.0f, 0.035f);
  st.wobble_freq = uniform(rng, 4.0f, 9.0f);
  st.wobble_phase = uniform(rng, 0.0f, 6.283f);
  st.scale = uniform(rng, 0.88f, 1.0f);
  st.detail_seed = rng();
  return st;
}

// Per-(font, component) micro style: consistent inside a font, and only
// observable from a reference glyph that shares the component.
struct MicroStyle {
  float rotate;
  float thickness_mult;
  float dx, dy;
};

MicroStyle micro_style(const FontStyle& font, const std::string& comp_id) {
  if (font.detail_seed == 0) return MicroStyle{0.0f, 1.0f, 0.0f, 0.0f};
  std::mt19937_64 rng(mix_seed(font.detail_seed, hash_string(comp_id)));
  MicroStyle ms;
  ms.rotate = uniform(rng, -0.16f, 0.16f);
  ms.thickness_mult = uniform(rng, 0.75f, 1.35f);
  ms.dx = uniform(rng, -0.04f, 0.04f);
  ms.dy = uniform(rng, -0.04f, 0.04f);
  return ms;
}

class Canvas {
 public:
  explicit Canvas(int size) : size_(size), image_(torch::ones({size, size}, torch::kFloat32)) {}

  // capsule stroke; coords in pixels, radius in pixels
  void stroke(float x0, float y0, float x1, float y1, float radius) {
    const float aa = 0.7f;
    const int lo_y = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - radius - aa)));
    const int hi_y = std::min(size_ - 1, static_cast<int>(std::ceil(std::max(y0, y1) + radius + aa)));
    const int lo_x = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - radius - aa)));
    const int hi_x = std::min(size_ - 1, static_cast<int>(std::ceil(std::max(x0, x1) + radius + aa)));
    const float dx = x1 - x0, dy = y1 - y0;
    const float len2 = dx * dx + dy * dy;
    auto acc = image_.accessor<float, 2>();
    for (int py = lo_y; py <= hi_y; ++py) {
      for (int px = lo_x; px <= hi_x; ++px) {
        const float cx = px + 0.5f, cy = py + 0.5f;
        float t = len2 > 0 ? ((cx - x0) * dx + (cy - y0) * dy) / len2 : 0.0f;
        t = std::clamp(t, 0.0f, 1.0f);
        const float qx = x0 + t * dx - cx, qy = y0 + t * dy - cy;
        const float dist = std::sqrt(qx * qx + qy * qy);
        const float cover = std::clamp((radius + aa / 2 - dist) / aa, 0.0f, 1.0f);
        if (cover > 0) acc[py][px] = std::min(acc[py][px], 1.0f - cover);
      }
    }
  }

  torch::Tensor take() { return image_; }

 private:
  int size_;
  torch::Tensor image_;
};

RectF inset(const RectF& r, float frac) {
  const float mx = (r.x1 - r.x0) * frac, my = (r.y1 - r.y0) * frac;
  return {r.x0 + mx, r.y0 + my, r.x1 - mx, r.y1 - my};
}

}  // namespace

SynthCorpus make_synth_corpus(const SynthCorpusSpec& spec) {
  require(spec.num_fonts >= 1 && spec.num_chars >= 1 && spec.num_components >= 4,
          ErrorCode::ConfigError, "synthetic corpus needs >=1 font, >=1 char, >=4 components");
  SynthCorpus corpus;
  corpus.spec = spec;
  for (int f = 0; f < spec.num_fonts; ++f) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "font%02d", f);
    corpus.font_ids.emplace_back(buf);
  }

  std::vector<std::string> comp_ids;
  for (int c = 0; c < spec.num_components; ++c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "k%02d", c);
    comp_ids.emplace_back(buf);
  }

  std::mt19937_64 rng(mix_seed(spec.seed, 0xC0DEBAADull));
  const auto& cats = structure::all_categories();
  for (int i = 0; i < spec.num_chars; ++i) {
    const Codepoint cp = 0x4E00 + static_cast<Codepoint>(i);
    structure::StructureEntry entry;
    entry.category = cats[rng() % cats.size()];
    const int m = structure::category_component_count(entry.category);
    for (int k = 0; k < m; ++k)
      entry.component_ids.push_back(comp_ids[rng() % comp_ids.size()]);
    corpus.table.add(cp, std::move(entry));
    corpus.charset.push_back(cp);
  }
  return corpus;
}

torch::Tensor render_synth_glyph(const SynthCorpus& corpus, const std::string& font_id,
                                 Codepoint cp, int size) {
  require(size >= 8, ErrorCode::ShapeMismatch, "synthetic glyphs need size >= 8");
  const auto& entry = corpus.table.entry(cp);
  const FontStyle style = font_style(font_id, corpus.spec.seed, corpus.spec.content_font_id);
  const auto regions = structure::category_region_boxes(entry.category);

  Canvas canvas(size);
  const float s = static_cast<float>(size);

  const auto apply_font = [&](float x, float y) {
    // about the glyph center, in unit coords
    float ux = 0.5f + (x - 0.5f) * style.scale;
    float uy = 0.5f + (y - 0.5f) * style.scale;
    ux += style.slant * (0.5f - uy);
    ux += style.wobble_amp * std::sin(style.wobble_freq * uy + style.wobble_phase);
    uy += style.wobble_amp * std::sin(style.wobble_freq * ux + 1.7f + style.wobble_phase);
    return std::pair<float, float>{ux * s, uy * s};
  };

  for (std::size_t ci = 0; ci < regions.size(); ++ci) {
    const std::string& comp_id = entry.component_ids[ci];
    const MicroStyle micro = micro_style(style, comp_id);
    const float radius = std::max(0.6f, style.thickness * micro.thickness_mult * s);
    const auto& boxes = regions[ci];

    const bool is_band_union = boxes.size() > 1;
    if (is_band_union) {
      // enclosing component: spine strokes along each band, plus short
      // component-seeded ticks so the enclosure still carries identity
      std::mt19937_64 tick_rng(mix_seed(hash_string(comp_id), 0xEC10u));
      for (const auto& band : boxes) {
        const RectF b = inset(band, 0.22f);
        const bool horizontal = (b.x1 - b.x0) >= (b.y1 - b.y0);
        float x0, y0, x1, y1;
        if (horizontal) {
          y0 = y1 = (b.y0 + b.y1) / 2;
          x0 = b.x0;
          x1 = b.x1;
        } else {
          x0 = x1 = (b.x0 + b.x1) / 2;
          y0 = b.y0;
          y1 = b.y1;
        }
        const auto [px0, py0] = apply_font(x0, y0);
        const auto [px1, py1] = apply_font(x1, y1);
        canvas.stroke(px0, py0, px1, py1, radius * 0.85f);
        // one inward tick per band
        const float tt = uniform(tick_rng, 0.25f, 0.75f);
        const float tx = x0 + tt * (x1 - x0), ty = y0 + tt * (y1 - y0);
        const float nx = horizontal ? 0.0f : (b.x0 < 0.5f ? 1.0f : -1.0f);
        const float ny = horizontal ? (b.y0 < 0.5f ? 1.0f : -1.0f) : 0.0f;
        const auto [qx0, qy0] = apply_font(tx, ty);
        const auto [qx1, qy1] = apply_font(tx + 0.06f * nx, ty + 0.06f * ny);
        canvas.stroke(qx0, qy0, qx1, qy1, radius * 0.7f);
      }
      continue;
    }

    const RectF box = inset(boxes[0], 0.10f);
    const float bw = box.x1 - box.x0, bh = box.y1 - box.y0;
    const float ccx = (box.x0 + box.x1) / 2, ccy = (box.y0 + box.y1) / 2;
    const float cosr = std::cos(micro.rotate), sinr = std::sin(micro.rotate);
    const auto place = [&](float px, float py) {
      // pattern space -> rotated about pattern center -> region box
      const float rx = (px - 0.5f) * cosr - (py - 0.5f) * sinr + 0.5f + micro.dx;
      const float ry = (px - 0.5f) * sinr + (py - 0.5f) * cosr + 0.5f + micro.dy;
      return std::pair<float, float>{ccx + (rx - 0.5f) * bw, ccy + (ry - 0.5f) * bh};
    };
    for (const auto& seg : component_pattern(comp_id)) {
      const auto [ax, ay] = place(seg.x0, seg.y0);
      const auto [bx, by] = place(seg.x1, seg.y1);
      // flatten through the font warp so wobble bends long strokes
      constexpr int steps = 6;
      float prev_x = 0, prev_y = 0;
      for (int i = 0; i <= steps; ++i) {
        const float t = static_cast<float>(i) / steps;
        const auto [px, py] = apply_font(ax + t * (bx - ax), ay + t * (by - ay));
        if (i > 0) canvas.stroke(prev_x, prev_y, px, py, radius);
        prev_x = px;
        prev_y = py;
      }
    }
  }
  return canvas.take();
}

}  // namespace vqfont::data
