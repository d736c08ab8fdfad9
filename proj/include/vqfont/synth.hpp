#pragma once

#include <string>
#include <vector>

#include <torch/torch.h>

#include "vqfont/common.hpp"
#include "vqfont/structure.hpp"

namespace vqfont::data {

// Procedurally generated glyph corpus for desk-scale runs and tests. Each
// "character" is a structure category plus component ids drawn from a shared
// inventory; each "font" is a deterministic style (stroke weight, slant,
// warp) with per-(font, component) detail so that reference glyphs sharing a
// component carry real information about how the target draws it.
struct SynthCorpusSpec {
  int num_fonts = 10;          // styled fonts, excluding the content font
  int num_chars = 200;
  int num_components = 32;
  std::uint64_t seed = 7;
  std::string content_font_id = "content";
};

struct SynthCorpus {
  SynthCorpusSpec spec;
  std::vector<std::string> font_ids;  // styled fonts only
  std::vector<Codepoint> charset;
  structure::StructureTable table;
};

SynthCorpus make_synth_corpus(const SynthCorpusSpec& spec);

// Deterministic render of one glyph: (H, W) float tensor, ink 0 on white 1.
// The content font renders with a fixed neutral style. Component artwork is
// placed inside the category's region boxes so image structure lines up with
// the latent-grid decomposition.
torch::Tensor render_synth_glyph(const SynthCorpus& corpus, const std::string& font_id,
                                 Codepoint cp, int size);

}  // namespace vqfont::data
