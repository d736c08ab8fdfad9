#include "vqfont/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "vqfont/common.hpp"
#include "vqfont/dataset.hpp"

using json = nlohmann::json;

namespace vqfont::cli {

namespace {

class Validator {
 public:
  void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) issues_.push_back(where + ": expected an object");
  }

  template <typename T>
  void read(const json& j, const std::string& where, const char* key, T& out) {
    seen_[where].insert(key);
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      issues_.push_back(where + "." + key + ": wrong type");
    }
  }

  void check_unknown(const json& j, const std::string& where) {
    if (!j.is_object()) return;
    for (const auto& [key, value] : j.items())
      if (!seen_[where].count(key)) issues_.push_back(where + "." + key + ": unknown key");
  }

  void rule(bool ok, const std::string& message) {
    if (!ok) issues_.push_back(message);
  }

  void finish() const {
    if (issues_.empty()) return;
    std::string all;
    for (const auto& issue : issues_) {
      if (!all.empty()) all += "; ";
      all += issue;
    }
    fail(ErrorCode::ConfigError, all);
  }

 private:
  std::vector<std::string> issues_;
  std::map<std::string, std::set<std::string>> seen_;
};

bool is_pow2_divisible(int value, int shifts) {
  return value > 0 && shifts >= 0 && (value % (1 << shifts)) == 0;
}

}  // namespace

bool RunConfig::operator==(const RunConfig& other) const {
  return config_to_json(*this) == config_to_json(other);
}

RunConfig default_config() { return RunConfig{}; }

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "paper" || name.empty()) {
    cfg.preset = name;
    return;
  }
  if (name == "desk") {
    cfg.preset = "desk";
    cfg.data.image_size = 64;
    cfg.vqgan.downsamples = 2;  // 64 -> 16x16 latents
    cfg.vqgan.codebook_size = 256;
    cfg.vqgan.code_dim = 128;
    cfg.vqgan.base_width = 48;
    cfg.vqgan.disc_width = 32;
    cfg.vqgan.lr = 2e-4;
    cfg.vqgan.batch_size = 16;
    cfg.vqgan.iterations = 8000;
    cfg.vqgan.disc_start = 1000;
    cfg.attention.channels = 128;
    cfg.transformer.blocks = 8;
    cfg.transformer.width = 128;
    cfg.vqfont.batch_size = 16;
    cfg.vqfont.iterations = 12000;
    cfg.vqfont.disc_width = 32;
    cfg.checkpoint_every = 2000;
    return;
  }
  if (name == "tiny") {
    cfg.preset = "tiny";
    cfg.data.image_size = 32;
    cfg.vqgan.downsamples = 2;  // 32 -> 8x8 latents
    cfg.vqgan.codebook_size = 64;
    cfg.vqgan.code_dim = 32;
    cfg.vqgan.base_width = 24;
    cfg.vqgan.res_blocks = 1;
    cfg.vqgan.disc_width = 16;
    cfg.vqgan.lr = 2e-3;
    cfg.vqgan.batch_size = 8;
    cfg.vqgan.iterations = 1500;
    cfg.vqgan.disc_start = 500;
    cfg.attention.heads = 4;
    cfg.attention.channels = 64;
    cfg.transformer.blocks = 4;
    cfg.transformer.heads = 4;
    cfg.transformer.width = 64;
    cfg.vqfont.lr = 1e-3;
    cfg.vqfont.batch_size = 8;
    cfg.vqfont.iterations = 2000;
    cfg.vqfont.disc_width = 16;
    cfg.checkpoint_every = 1000;
    return;
  }
  fail(ErrorCode::ConfigError, "unknown preset '" + name + "' (expected tiny, desk, or paper)");
}

RunConfig validate_config(const json& raw) {
  Validator v;
  v.expect_object(raw, "config");

  RunConfig cfg;
  std::string preset;
  if (raw.is_object() && raw.contains("preset")) {
    try {
      preset = raw.at("preset").get<std::string>();
      apply_preset(cfg, preset);
    } catch (const json::exception&) {
      v.rule(false, "config.preset: wrong type");
    } catch (const Error& e) {
      v.rule(false, e.what());
    }
  }

  v.read(raw, "config", "preset", preset);
  v.read(raw, "config", "seed", cfg.seed);
  v.read(raw, "config", "log_every", cfg.log_every);
  v.read(raw, "config", "checkpoint_every", cfg.checkpoint_every);
  v.read(raw, "config", "device", cfg.device);

  json sub = json::object();
  v.read(raw, "config", "data", sub);
  v.read(sub, "data", "images_dir", cfg.data.images_dir);
  v.read(sub, "data", "manifest", cfg.data.manifest);
  v.read(sub, "data", "fonts_dir", cfg.data.fonts_dir);
  v.read(sub, "data", "charset_file", cfg.data.charset_file);
  v.read(sub, "data", "structure_table", cfg.data.structure_table);
  v.read(sub, "data", "content_font", cfg.data.content_font);
  v.read(sub, "data", "image_size", cfg.data.image_size);
  v.read(sub, "data", "split_ratios", cfg.data.split_ratios);
  v.read(sub, "data", "unseen_fonts", cfg.data.unseen_fonts);
  v.read(sub, "data", "refs_per_char", cfg.data.refs_per_char);
  v.check_unknown(sub, "data");

  sub = json::object();
  v.read(raw, "config", "vqgan", sub);
  v.read(sub, "vqgan", "codebook_size", cfg.vqgan.codebook_size);
  v.read(sub, "vqgan", "code_dim", cfg.vqgan.code_dim);
  v.read(sub, "vqgan", "base_width", cfg.vqgan.base_width);
  v.read(sub, "vqgan", "downsamples", cfg.vqgan.downsamples);
  v.read(sub, "vqgan", "res_blocks", cfg.vqgan.res_blocks);
  v.read(sub, "vqgan", "lambda_comm", cfg.vqgan.lambda_comm);
  v.read(sub, "vqgan", "lambda_adv", cfg.vqgan.lambda_adv);
  v.read(sub, "vqgan", "lr", cfg.vqgan.lr);
  v.read(sub, "vqgan", "batch_size", cfg.vqgan.batch_size);
  v.read(sub, "vqgan", "iterations", cfg.vqgan.iterations);
  v.read(sub, "vqgan", "disc_start", cfg.vqgan.disc_start);
  v.read(sub, "vqgan", "disc_width", cfg.vqgan.disc_width);
  v.check_unknown(sub, "vqgan");

  sub = json::object();
  v.read(raw, "config", "attention", sub);
  v.read(sub, "attention", "heads", cfg.attention.heads);
  v.read(sub, "attention", "channels", cfg.attention.channels);
  v.check_unknown(sub, "attention");

  sub = json::object();
  v.read(raw, "config", "transformer", sub);
  v.read(sub, "transformer", "blocks", cfg.transformer.blocks);
  v.read(sub, "transformer", "heads", cfg.transformer.heads);
  v.read(sub, "transformer", "width", cfg.transformer.width);
  v.read(sub, "transformer", "ffn_mult", cfg.transformer.ffn_mult);
  v.check_unknown(sub, "transformer");

  sub = json::object();
  v.read(raw, "config", "vqfont", sub);
  v.read(sub, "vqfont", "lambda_self", cfg.vqfont.lambda_self);
  v.read(sub, "vqfont", "lambda_main", cfg.vqfont.lambda_main);
  v.read(sub, "vqfont", "lambda_l1", cfg.vqfont.lambda_l1);
  v.read(sub, "vqfont", "lambda_adv", cfg.vqfont.lambda_adv);
  v.read(sub, "vqfont", "lambda_per", cfg.vqfont.lambda_per);
  v.read(sub, "vqfont", "lr", cfg.vqfont.lr);
  v.read(sub, "vqfont", "batch_size", cfg.vqfont.batch_size);
  v.read(sub, "vqfont", "iterations", cfg.vqfont.iterations);
  v.read(sub, "vqfont", "decoder_trainable_layers", cfg.vqfont.decoder_trainable_layers);
  v.read(sub, "vqfont", "use_codebook", cfg.vqfont.use_codebook);
  v.read(sub, "vqfont", "use_ssem", cfg.vqfont.use_ssem);
  v.read(sub, "vqfont", "disc_width", cfg.vqfont.disc_width);
  v.check_unknown(sub, "vqfont");

  sub = json::object();
  v.read(raw, "config", "perceptual", sub);
  v.read(sub, "perceptual", "kind", cfg.perceptual.kind);
  v.read(sub, "perceptual", "seed", cfg.perceptual.seed);
  v.read(sub, "perceptual", "script_path", cfg.perceptual.script_path);
  v.check_unknown(sub, "perceptual");

  v.check_unknown(raw, "config");

  v.rule(cfg.vqgan.codebook_size >= 2, "vqgan.codebook_size: must be >= 2");
  v.rule(cfg.vqgan.code_dim >= 1, "vqgan.code_dim: must be >= 1");
  v.rule(cfg.vqgan.base_width >= 1, "vqgan.base_width: must be >= 1");
  v.rule(cfg.vqgan.downsamples >= 1 && cfg.vqgan.downsamples <= 6,
         "vqgan.downsamples: must be in [1, 6]");
  v.rule(cfg.vqgan.res_blocks >= 0, "vqgan.res_blocks: must be >= 0");
  v.rule(is_pow2_divisible(cfg.data.image_size, cfg.vqgan.downsamples) &&
             (cfg.data.image_size >> cfg.vqgan.downsamples) >= 2,
         "data.image_size: must be divisible by 2^downsamples with latents >= 2");
  v.rule(cfg.vqgan.lambda_comm >= 0 && cfg.vqgan.lambda_adv >= 0,
         "vqgan: loss weights must be nonnegative");
  v.rule(cfg.vqgan.lr > 0 && cfg.vqfont.lr > 0, "optimizer learning rates must be positive");
  v.rule(cfg.vqgan.batch_size >= 1 && cfg.vqfont.batch_size >= 1, "batch sizes must be >= 1");
  v.rule(cfg.vqgan.iterations >= 1 && cfg.vqfont.iterations >= 1, "iteration counts must be >= 1");
  v.rule(cfg.attention.heads >= 1 && cfg.attention.channels % cfg.attention.heads == 0,
         "attention.heads: must divide attention.channels");
  v.rule(cfg.transformer.blocks >= 1, "transformer.blocks: must be >= 1");
  v.rule(cfg.transformer.heads >= 1 && cfg.transformer.width % cfg.transformer.heads == 0,
         "transformer.heads: must divide transformer.width");
  v.rule(cfg.transformer.ffn_mult >= 1, "transformer.ffn_mult: must be >= 1");
  v.rule(cfg.vqfont.lambda_self >= 0 && cfg.vqfont.lambda_main >= 0 &&
             cfg.vqfont.lambda_l1 >= 0 && cfg.vqfont.lambda_adv >= 0 && cfg.vqfont.lambda_per >= 0,
         "vqfont: loss weights must be nonnegative");
  v.rule(cfg.vqfont.decoder_trainable_layers >= 0,
         "vqfont.decoder_trainable_layers: must be >= 0");
  v.rule(cfg.data.refs_per_char >= 1, "data.refs_per_char: must be >= 1");
  v.rule(cfg.perceptual.kind == "random" || cfg.perceptual.kind == "torchscript",
         "perceptual.kind: expected 'random' or 'torchscript'");
  v.rule(cfg.device == "cpu" || cfg.device == "cuda", "device: expected 'cpu' or 'cuda'");
  try {
    data::parse_split_ratios(cfg.data.split_ratios);
  } catch (const Error& e) {
    v.rule(false, std::string("data.split_ratios: ") + e.what());
  }
  v.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    return default_config();  // empty file: paper defaults
  json raw;
  try {
    raw = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, path + ": " + e.what());
  }
  return validate_config(raw);
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot create " + path);
  out << config_to_json(cfg).dump(2) << "\n";
}

json config_to_json(const RunConfig& cfg) {
  return json{
      {"preset", cfg.preset},
      {"seed", cfg.seed},
      {"log_every", cfg.log_every},
      {"checkpoint_every", cfg.checkpoint_every},
      {"device", cfg.device},
      {"data",
       {{"images_dir", cfg.data.images_dir},
        {"manifest", cfg.data.manifest},
        {"fonts_dir", cfg.data.fonts_dir},
        {"charset_file", cfg.data.charset_file},
        {"structure_table", cfg.data.structure_table},
        {"content_font", cfg.data.content_font},
        {"image_size", cfg.data.image_size},
        {"split_ratios", cfg.data.split_ratios},
        {"unseen_fonts", cfg.data.unseen_fonts},
        {"refs_per_char", cfg.data.refs_per_char}}},
      {"vqgan",
       {{"codebook_size", cfg.vqgan.codebook_size},
        {"code_dim", cfg.vqgan.code_dim},
        {"base_width", cfg.vqgan.base_width},
        {"downsamples", cfg.vqgan.downsamples},
        {"res_blocks", cfg.vqgan.res_blocks},
        {"lambda_comm", cfg.vqgan.lambda_comm},
        {"lambda_adv", cfg.vqgan.lambda_adv},
        {"lr", cfg.vqgan.lr},
        {"batch_size", cfg.vqgan.batch_size},
        {"iterations", cfg.vqgan.iterations},
        {"disc_start", cfg.vqgan.disc_start},
        {"disc_width", cfg.vqgan.disc_width}}},
      {"attention", {{"heads", cfg.attention.heads}, {"channels", cfg.attention.channels}}},
      {"transformer",
       {{"blocks", cfg.transformer.blocks},
        {"heads", cfg.transformer.heads},
        {"width", cfg.transformer.width},
        {"ffn_mult", cfg.transformer.ffn_mult}}},
      {"vqfont",
       {{"lambda_self", cfg.vqfont.lambda_self},
        {"lambda_main", cfg.vqfont.lambda_main},
        {"lambda_l1", cfg.vqfont.lambda_l1},
        {"lambda_adv", cfg.vqfont.lambda_adv},
        {"lambda_per", cfg.vqfont.lambda_per},
        {"lr", cfg.vqfont.lr},
        {"batch_size", cfg.vqfont.batch_size},
        {"iterations", cfg.vqfont.iterations},
        {"decoder_trainable_layers", cfg.vqfont.decoder_trainable_layers},
        {"use_codebook", cfg.vqfont.use_codebook},
        {"use_ssem", cfg.vqfont.use_ssem},
        {"disc_width", cfg.vqfont.disc_width}}},
      {"perceptual",
       {{"kind", cfg.perceptual.kind},
        {"seed", cfg.perceptual.seed},
        {"script_path", cfg.perceptual.script_path}}},
  };
}

std::string resolve_device(const RunConfig& cfg) {
  std::string device = cfg.device;
  if (const char* env = std::getenv("VQFONT_DEVICE"); env && *env) device = env;
  require(device == "cpu" || device == "cuda", ErrorCode::ConfigError,
          "VQFONT_DEVICE/device must be 'cpu' or 'cuda', got '" + device + "'");
  if (device == "cuda" && !torch::cuda::is_available()) {
    std::cerr << "note: cuda requested but unavailable, falling back to cpu\n";
    return "cpu";
  }
  return device;
}

}  // namespace vqfont::cli
