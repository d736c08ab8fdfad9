#include "vqfont/truetype.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace vqfont::data {

namespace {

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::uint8_t u8() {
    check(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    check(2);
    const std::uint16_t v = (std::uint16_t(bytes_[pos_]) << 8) | bytes_[pos_ + 1];
    pos_ += 2;
    return v;
  }
  std::int16_t s16() { return static_cast<std::int16_t>(u16()); }
  std::uint32_t u32() {
    check(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  void skip(std::size_t n) {
    check(n);
    pos_ += n;
  }
  void seek(std::size_t pos) {
    require(pos <= bytes_.size(), ErrorCode::UnreadableSource, "truncated font file");
    pos_ = pos;
  }
  std::size_t pos() const { return pos_; }

 private:
  void check(std::size_t n) const {
    require(pos_ + n <= bytes_.size(), ErrorCode::UnreadableSource, "truncated font file");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_;
};

constexpr std::uint32_t tag(const char (&s)[5]) {
  return (std::uint32_t(s[0]) << 24) | (std::uint32_t(s[1]) << 16) | (std::uint32_t(s[2]) << 8) |
         std::uint32_t(s[3]);
}

// Number of flattening steps per quadratic segment; fixed for determinism.
constexpr int kCurveSteps = 12;

struct Edge {
  float x0, y0, x1, y1;  // y0 < y1 after normalization
  int winding;           // +1 if originally upward, -1 if downward
};

}  // namespace

TrueTypeFont::TrueTypeFont(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open font " + path);
  bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  require(bytes_.size() >= 12, ErrorCode::UnreadableSource, "not a font file: " + path);

  Reader r(bytes_, 0);
  const std::uint32_t version = r.u32();
  require(version == 0x00010000 || version == tag("true"),
          ErrorCode::UnreadableSource, "unsupported font format (need TrueType outlines): " + path);
  const std::uint16_t num_tables = r.u16();
  r.skip(6);

  std::uint32_t head_off = 0, maxp_off = 0;
  for (int i = 0; i < num_tables; ++i) {
    const std::uint32_t t = r.u32();
    r.u32();  // checksum
    const std::uint32_t offset = r.u32();
    const std::uint32_t length = r.u32();
    if (t == tag("cmap")) cmap_off_ = offset;
    if (t == tag("loca")) loca_off_ = offset;
    if (t == tag("glyf")) {
      glyf_off_ = offset;
      glyf_len_ = length;
    }
    if (t == tag("head")) head_off = offset;
    if (t == tag("maxp")) maxp_off = offset;
  }
  require(cmap_off_ && loca_off_ && glyf_off_ && head_off && maxp_off,
          ErrorCode::UnreadableSource, "font missing required tables: " + path);

  Reader head(bytes_, head_off);
  head.skip(18);
  units_per_em_ = head.u16();
  require(units_per_em_ > 0, ErrorCode::UnreadableSource, "bad unitsPerEm");
  head.skip(30);
  long_loca_ = head.s16() != 0;

  Reader maxp(bytes_, maxp_off);
  maxp.skip(4);
  num_glyphs_ = maxp.u16();
}

std::uint16_t TrueTypeFont::glyph_index(Codepoint cp) const {
  Reader r(bytes_, cmap_off_);
  r.u16();  // version
  const std::uint16_t n = r.u16();
  std::uint32_t best = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint16_t platform = r.u16();
    const std::uint16_t encoding = r.u16();
    const std::uint32_t offset = r.u32();
    const bool unicode = (platform == 0) || (platform == 3 && (encoding == 1 || encoding == 10));
    if (unicode) best = offset;  // later unicode subtables tend to be wider (fmt 12)
  }
  if (best == 0) return 0;

  Reader s(bytes_, cmap_off_ + best);
  const std::uint16_t format = s.u16();
  if (format == 4) {
    if (cp > 0xFFFF) return 0;
    s.skip(4);
    const std::uint16_t seg2 = s.u16();
    const int segs = seg2 / 2;
    s.skip(6);
    const std::size_t end_base = s.pos();
    const std::size_t start_base = end_base + seg2 + 2;
    const std::size_t delta_base = start_base + seg2;
    const std::size_t range_base = delta_base + seg2;
    for (int i = 0; i < segs; ++i) {
      Reader e(bytes_, end_base + 2 * i);
      if (e.u16() < cp) continue;
      Reader st(bytes_, start_base + 2 * i);
      const std::uint16_t start = st.u16();
      if (start > cp) return 0;
      Reader dl(bytes_, delta_base + 2 * i);
      const std::uint16_t delta = dl.u16();
      Reader ro(bytes_, range_base + 2 * i);
      const std::uint16_t range_off = ro.u16();
      if (range_off == 0) return static_cast<std::uint16_t>(cp + delta);
      Reader g(bytes_, range_base + 2 * i + range_off + 2 * (cp - start));
      const std::uint16_t glyph = g.u16();
      return glyph ? static_cast<std::uint16_t>(glyph + delta) : 0;
    }
    return 0;
  }
  if (format == 12) {
    s.skip(10);
    const std::uint32_t groups = s.u32();
    for (std::uint32_t i = 0; i < groups; ++i) {
      const std::uint32_t first = s.u32();
      const std::uint32_t last = s.u32();
      const std::uint32_t start_glyph = s.u32();
      if (cp >= first && cp <= last) return static_cast<std::uint16_t>(start_glyph + (cp - first));
      if (cp < first) return 0;
    }
    return 0;
  }
  return 0;
}

bool TrueTypeFont::has_glyph(Codepoint cp) const { return glyph_index(cp) != 0; }

void TrueTypeFont::load_outline(std::uint16_t glyph, std::vector<Contour>& out, float ox, float oy,
                                float xx, float xy, float yx, float yy, int depth) const {
  require(depth < 8, ErrorCode::UnreadableSource, "composite glyph nesting too deep");
  require(glyph < num_glyphs_, ErrorCode::UnreadableSource, "glyph index out of range");

  std::uint32_t g_off, g_end;
  if (long_loca_) {
    Reader l(bytes_, loca_off_ + 4 * glyph);
    g_off = l.u32();
    g_end = l.u32();
  } else {
    Reader l(bytes_, loca_off_ + 2 * glyph);
    g_off = 2u * l.u16();
    g_end = 2u * l.u16();
  }
  if (g_off == g_end) return;  // empty glyph (e.g. space)
  require(g_end <= glyf_len_, ErrorCode::UnreadableSource, "glyf entry out of bounds");

  Reader r(bytes_, glyf_off_ + g_off);
  const std::int16_t n_contours = r.s16();
  r.skip(8);  // bbox

  if (n_contours >= 0) {
    std::vector<std::uint16_t> ends(n_contours);
    for (auto& e : ends) e = r.u16();
    const int n_points = ends.empty() ? 0 : ends.back() + 1;
    r.skip(r.u16());  // instructions

    std::vector<std::uint8_t> flags;
    flags.reserve(n_points);
    while (static_cast<int>(flags.size()) < n_points) {
      const std::uint8_t f = r.u8();
      flags.push_back(f);
      if (f & 0x08) {
        const int repeat = r.u8();
        for (int i = 0; i < repeat; ++i) flags.push_back(f);
      }
    }

    std::vector<float> xs(n_points), ys(n_points);
    int v = 0;
    for (int i = 0; i < n_points; ++i) {
      if (flags[i] & 0x02) {
        const int d = r.u8();
        v += (flags[i] & 0x10) ? d : -d;
      } else if (!(flags[i] & 0x10)) {
        v += r.s16();
      }
      xs[i] = static_cast<float>(v);
    }
    v = 0;
    for (int i = 0; i < n_points; ++i) {
      if (flags[i] & 0x04) {
        const int d = r.u8();
        v += (flags[i] & 0x20) ? d : -d;
      } else if (!(flags[i] & 0x20)) {
        v += r.s16();
      }
      ys[i] = static_cast<float>(v);
    }

    int start = 0;
    for (const int end : ends) {
      Contour c;
      for (int i = start; i <= end; ++i) {
        const float x = xs[i] * xx + ys[i] * yx + ox;
        const float y = xs[i] * xy + ys[i] * yy + oy;
        c.push_back({x, y, (flags[i] & 0x01) != 0});
      }
      if (c.size() >= 2) out.push_back(std::move(c));
      start = end + 1;
    }
    return;
  }

  // Composite glyph: accumulate transformed children.
  bool more = true;
  while (more) {
    const std::uint16_t flags = r.u16();
    const std::uint16_t child = r.u16();
    more = (flags & 0x0020) != 0;
    float dx = 0, dy = 0;
    if (flags & 0x0001) {  // words
      const std::int16_t a = r.s16(), b = r.s16();
      if (flags & 0x0002) {  // xy offsets
        dx = a;
        dy = b;
      }
    } else {
      const auto a = static_cast<std::int8_t>(r.u8());
      const auto b = static_cast<std::int8_t>(r.u8());
      if (flags & 0x0002) {
        dx = a;
        dy = b;
      }
    }
    float a = 1, b = 0, c = 0, d = 1;
    const auto f2dot14 = [&]() { return static_cast<float>(r.s16()) / 16384.0f; };
    if (flags & 0x0008) {
      a = d = f2dot14();
    } else if (flags & 0x0040) {
      a = f2dot14();
      d = f2dot14();
    } else if (flags & 0x0080) {
      a = f2dot14();
      b = f2dot14();
      c = f2dot14();
      d = f2dot14();
    }
    // compose child transform with ours
    const float n_xx = a * xx + b * yx;
    const float n_xy = a * xy + b * yy;
    const float n_yx = c * xx + d * yx;
    const float n_yy = c * xy + d * yy;
    const float n_ox = dx * xx + dy * yx + ox;
    const float n_oy = dx * xy + dy * yy + oy;
    const std::size_t resume = r.pos();
    load_outline(child, out, n_ox, n_oy, n_xx, n_xy, n_yx, n_yy, depth + 1);
    r.seek(resume);
  }
}

torch::Tensor TrueTypeFont::render(Codepoint cp, int size) const {
  require(size > 0, ErrorCode::ShapeMismatch, "size must be positive");
  const std::uint16_t glyph = glyph_index(cp);
  require(glyph != 0, ErrorCode::MissingGlyph,
          "font has no glyph for U+" + codepoint_to_hex(cp));

  std::vector<Contour> contours;
  load_outline(glyph, contours, 0, 0, 1, 0, 0, 1, 0);

  auto image = torch::ones({size, size}, torch::kFloat32);
  if (contours.empty()) return image;  // blank glyph

  // Flatten quadratic outlines into line segments (font units, y up).
  std::vector<Edge> edges;
  const auto emit = [&edges](float x0, float y0, float x1, float y1) {
    if (y0 == y1) return;
    if (y0 < y1) edges.push_back({x0, y0, x1, y1, 1});
    else edges.push_back({x1, y1, x0, y0, -1});
  };
  const auto emit_quad = [&emit](float x0, float y0, float cx, float cy, float x1, float y1) {
    float px = x0, py = y0;
    for (int i = 1; i <= kCurveSteps; ++i) {
      const float t = static_cast<float>(i) / kCurveSteps;
      const float u = 1.0f - t;
      const float x = u * u * x0 + 2 * u * t * cx + t * t * x1;
      const float y = u * u * y0 + 2 * u * t * cy + t * t * y1;
      emit(px, py, x, y);
      px = x;
      py = y;
    }
  };

  for (const auto& contour : contours) {
    // Rotate so the contour starts on-curve (insert implied midpoint if none).
    std::vector<Point> pts = contour;
    if (!pts.front().on_curve) {
      auto it = std::find_if(pts.begin(), pts.end(), [](const Point& p) { return p.on_curve; });
      if (it != pts.end()) {
        std::rotate(pts.begin(), it, pts.end());
      } else {
        const Point mid{(pts.front().x + pts.back().x) / 2,
                        (pts.front().y + pts.back().y) / 2, true};
        pts.insert(pts.begin(), mid);
      }
    }
    pts.push_back(pts.front());  // close

    std::size_t i = 0;
    while (i + 1 < pts.size()) {
      const Point& p0 = pts[i];
      const Point& p1 = pts[i + 1];
      if (p1.on_curve) {
        emit(p0.x, p0.y, p1.x, p1.y);
        i += 1;
      } else if (i + 2 < pts.size() && pts[i + 2].on_curve) {
        emit_quad(p0.x, p0.y, p1.x, p1.y, pts[i + 2].x, pts[i + 2].y);
        i += 2;
      } else {
        // two consecutive off-curve points: implied on-curve midpoint
        const float mx = (p1.x + pts[i + 2].x) / 2;
        const float my = (p1.y + pts[i + 2].y) / 2;
        emit_quad(p0.x, p0.y, p1.x, p1.y, mx, my);
        pts[i + 1] = {mx, my, true};
        i += 1;
      }
    }
  }
  if (edges.empty()) return image;

  // Scale by units-per-em (weight-consistent across glyphs), center the bbox.
  float min_x = std::numeric_limits<float>::max(), max_x = std::numeric_limits<float>::lowest();
  float min_y = min_x, max_y = max_x;
  for (const auto& e : edges) {
    min_x = std::min({min_x, e.x0, e.x1});
    max_x = std::max({max_x, e.x0, e.x1});
    min_y = std::min({min_y, e.y0, e.y1});
    max_y = std::max({max_y, e.y0, e.y1});
  }
  const float scale = 0.84f * static_cast<float>(size) / static_cast<float>(units_per_em_);
  const float cx = (min_x + max_x) / 2, cy = (min_y + max_y) / 2;
  const float half = static_cast<float>(size) / 2;
  for (auto& e : edges) {
    // y flips: font space is y-up, image space y-down
    e.x0 = (e.x0 - cx) * scale + half;
    e.x1 = (e.x1 - cx) * scale + half;
    const float y0 = (cy - e.y0) * scale + half;
    const float y1 = (cy - e.y1) * scale + half;
    e.y0 = std::min(y0, y1);
    e.y1 = std::max(y0, y1);
    e.winding = -e.winding;  // flip restores orientation after mirroring
    if (y0 > y1) {
      std::swap(e.x0, e.x1);
      e.winding = -e.winding;
    }
  }

  // Nonzero-winding scanline fill, 4 subrows per pixel row, 4 samples per
  // pixel along x.
  auto acc = image.accessor<float, 2>();
  std::vector<std::pair<float, int>> crossings;
  for (int py = 0; py < size; ++py) {
    for (int sub = 0; sub < 4; ++sub) {
      const float y = py + (2 * sub + 1) / 8.0f;
      crossings.clear();
      for (const auto& e : edges) {
        if (y < e.y0 || y >= e.y1) continue;
        const float t = (y - e.y0) / (e.y1 - e.y0);
        crossings.emplace_back(e.x0 + t * (e.x1 - e.x0), e.winding);
      }
      if (crossings.empty()) continue;
      std::sort(crossings.begin(), crossings.end());
      int winding = 0;
      float span_start = 0;
      for (const auto& [x, w] : crossings) {
        const int prev = winding;
        winding += w;
        if (prev == 0 && winding != 0) {
          span_start = x;
        } else if (prev != 0 && winding == 0) {
          // deposit coverage for [span_start, x) on this subrow
          const float lo = std::max(span_start, 0.0f);
          const float hi = std::min(x, static_cast<float>(size));
          if (lo >= hi) continue;
          int px = static_cast<int>(lo);
          while (px < size && px < hi) {
            const float l = std::max(lo, static_cast<float>(px));
            const float h = std::min(hi, static_cast<float>(px + 1));
            acc[py][px] -= 0.25f * (h - l);
            ++px;
          }
        }
      }
    }
  }
  return image.clamp_(0.0, 1.0);
}

}  // namespace vqfont::data
