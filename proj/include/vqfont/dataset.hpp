#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <torch/torch.h>

#include "vqfont/common.hpp"
#include "vqfont/structure.hpp"
#include "vqfont/synth.hpp"
#include "vqfont/truetype.hpp"

namespace vqfont::data {

struct GlyphImage {
  torch::Tensor pixels;  // (H, W) float in [0,1], ink 0 on white 1
  Codepoint codepoint = 0;
  std::string font_id;
};

struct ManifestRecord {
  std::string font_id;
  Codepoint codepoint = 0;
  std::string relative_path;
};

// One JSON record per line: {"font_id", "codepoint" (hex), "relative_path"}.
std::vector<ManifestRecord> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestRecord>& records, const std::string& path);

// A glyph corpus indexed by (font_id, codepoint). Implementations are pure
// given their construction inputs; loaded images are cached.
class GlyphSource {
 public:
  virtual ~GlyphSource() = default;

  GlyphImage get(const std::string& font_id, Codepoint cp) const;
  bool has(const std::string& font_id, Codepoint cp) const { return has_impl(font_id, cp); }
  int image_size() const { return size_; }

  virtual std::vector<std::string> font_ids() const = 0;
  virtual std::vector<Codepoint> charset() const = 0;

 protected:
  explicit GlyphSource(int size) : size_(size) {}
  virtual torch::Tensor load(const std::string& font_id, Codepoint cp) const = 0;
  virtual bool has_impl(const std::string& font_id, Codepoint cp) const = 0;

  int size_;

 private:
  mutable std::unordered_map<std::string, torch::Tensor> cache_;
};

// Mode (a): rasterize from vector font files; font_id = file stem.
class FontDirSource : public GlyphSource {
 public:
  FontDirSource(const std::string& fonts_dir, const std::vector<Codepoint>& charset, int size);
  std::vector<std::string> font_ids() const override;
  std::vector<Codepoint> charset() const override { return charset_; }

 protected:
  torch::Tensor load(const std::string& font_id, Codepoint cp) const override;
  bool has_impl(const std::string& font_id, Codepoint cp) const override;

 private:
  std::map<std::string, std::shared_ptr<TrueTypeFont>> fonts_;
  std::vector<Codepoint> charset_;
};

// Mode (b): pre-rendered PNG directory with a manifest; canonical for tests.
class ImageDirSource : public GlyphSource {
 public:
  ImageDirSource(const std::string& images_dir, const std::string& manifest_path, int size);
  std::vector<std::string> font_ids() const override;
  std::vector<Codepoint> charset() const override;

 protected:
  torch::Tensor load(const std::string& font_id, Codepoint cp) const override;
  bool has_impl(const std::string& font_id, Codepoint cp) const override;

 private:
  std::string images_dir_;
  std::map<std::string, std::map<Codepoint, std::string>> paths_;  // font -> cp -> relpath
};

// Procedural corpus rendered on demand (see synth.hpp).
class SynthSource : public GlyphSource {
 public:
  SynthSource(SynthCorpus corpus, int size);
  std::vector<std::string> font_ids() const override;
  std::vector<Codepoint> charset() const override { return corpus_.charset; }
  const SynthCorpus& corpus() const { return corpus_; }

 protected:
  torch::Tensor load(const std::string& font_id, Codepoint cp) const override;
  bool has_impl(const std::string& font_id, Codepoint cp) const override;

 private:
  SynthCorpus corpus_;
};

GlyphImage render_glyph(const TrueTypeFont& font, const std::string& font_id, Codepoint cp,
                        int size);

// Character and font split. Characters fall into three pairwise-disjoint
// groups; fonts into two.
struct DatasetSplits {
  std::vector<Codepoint> seen_chars;
  std::vector<Codepoint> reference_chars;
  std::vector<Codepoint> unseen_chars;
  std::vector<std::string> seen_fonts;
  std::vector<std::string> unseen_fonts;
};

// Counts, or fractions summing to ~1. Fractions are resolved so that the
// seen group absorbs the rounding remainder.
struct SplitRatios {
  double seen = 0, reference = 0, unseen = 0;
  bool fractional = false;
};

SplitRatios parse_split_ratios(const std::string& csv);

// Deterministic partition for a given seed; throws BadRatio when counts
// exceed the charset size. unseen_font_count defaults to ceil(10% of fonts)
// (the paper holds out 10 of 381 styled fonts).
DatasetSplits build_splits(const std::vector<Codepoint>& charset,
                           const std::vector<std::string>& font_ids, const SplitRatios& ratios,
                           std::uint64_t seed, int unseen_font_count = -1);

void save_splits(const DatasetSplits& splits, const std::string& path);
DatasetSplits load_splits(const std::string& path);

struct ReferenceAssignment {
  Codepoint target = 0;
  std::vector<Codepoint> references;  // exactly k entries
};

// Greedy maximum coverage of the target's structure components by reference
// characters: each pick shares the most not-yet-covered components, ties by
// lowest codepoint; once coverage saturates, pads with the smallest unused
// codepoints. Throws EmptyReferencePool.
ReferenceAssignment select_references(Codepoint target,
                                      const std::vector<Codepoint>& reference_chars,
                                      const structure::StructureTable& table, int k);

}  // namespace vqfont::data
