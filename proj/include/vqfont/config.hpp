#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace vqfont::cli {

struct DataConfig {
  std::string images_dir;
  std::string manifest;
  std::string fonts_dir;
  std::string charset_file;
  std::string structure_table;
  std::string content_font = "content";
  int image_size = 128;
  std::string split_ratios = "2841,158,500";
  int unseen_fonts = -1;  // -1: ceil(10% of fonts)
  int refs_per_char = 3;
};

struct VqganSection {
  int codebook_size = 1024;
  int code_dim = 256;
  int base_width = 64;
  int downsamples = 3;
  int res_blocks = 2;
  double lambda_comm = 0.5;
  double lambda_adv = 0.8;
  double lr = 4e-5;
  int batch_size = 32;
  long iterations = 200000;
  long disc_start = 0;
  int disc_width = 64;
};

struct AttentionSection {
  int heads = 8;
  int channels = 256;
};

struct TransformerSection {
  int blocks = 15;
  int heads = 8;
  int width = 256;
  int ffn_mult = 4;
};

struct VqfontSection {
  double lambda_self = 1.0;
  double lambda_main = 2.0;
  double lambda_l1 = 2.0;
  double lambda_adv = 0.002;
  double lambda_per = 1.0;
  double lr = 2e-4;
  int batch_size = 32;
  long iterations = 300000;
  int decoder_trainable_layers = 4;
  bool use_codebook = true;
  bool use_ssem = true;
  int disc_width = 64;
};

struct PerceptualSection {
  std::string kind = "random";  // "random" | "torchscript"
  long seed = 1234;
  std::string script_path;
};

struct RunConfig {
  std::string preset;  // echo of the applied preset, if any
  std::uint64_t seed = 7;
  DataConfig data;
  VqganSection vqgan;
  AttentionSection attention;
  TransformerSection transformer;
  VqfontSection vqfont;
  PerceptualSection perceptual;
  long log_every = 50;
  long checkpoint_every = 5000;
  std::string device = "cpu";

  int latent_size() const { return data.image_size >> vqgan.downsamples; }
  bool operator==(const RunConfig& other) const;
};

// Paper-constant defaults (identical to a default-constructed RunConfig).
RunConfig default_config();

// "tiny" (32px, 8x8 latents, K=64, CI-fast), "desk" (64px, 16x16, K=256),
// "paper" (full constants).
void apply_preset(RunConfig& cfg, const std::string& name);

// Defaults + preset + explicit keys; rejects unknown keys and collects every
// violation into one ConfigError.
RunConfig validate_config(const nlohmann::json& raw);

RunConfig load_config(const std::string& path);  // empty file -> defaults
void save_config(const RunConfig& cfg, const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

// Honors the VQFONT_DEVICE environment variable over cfg.device; falls back
// to cpu (with a note on stderr) when the requested accelerator is absent.
std::string resolve_device(const RunConfig& cfg);

}  // namespace vqfont::cli
