#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

namespace vqfont {

// Single-file checkpoint: magic + versioned JSON header (config echo, meta,
// tensor manifest) followed by raw little-endian tensor data. Writes go
// through a temp file and rename so a crash never leaves a half checkpoint.
class Checkpoint {
 public:
  static constexpr int kVersion = 1;

  static Checkpoint load(const std::string& path);
  void save(const std::string& path) const;

  void put(const std::string& name, const torch::Tensor& tensor);
  torch::Tensor get(const std::string& name) const;
  bool has(const std::string& name) const { return tensors_.count(name) != 0; }
  const std::map<std::string, torch::Tensor>& tensors() const { return tensors_; }

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  const nlohmann::json& config() const { return config_; }
  void set_meta(const std::string& key, const nlohmann::json& value) { meta_[key] = value; }
  const nlohmann::json& meta() const { return meta_; }

  // Parameters and buffers, prefixed "prefix.".
  void put_module(const std::string& prefix, const torch::nn::Module& module);
  // Strict: every parameter/buffer of the module must be present with a
  // matching shape.
  void load_into_module(const std::string& prefix, torch::nn::Module& module) const;

 private:
  std::map<std::string, torch::Tensor> tensors_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json meta_ = nlohmann::json::object();
};

// NPY v1.0, little-endian float32; used for the standalone codebook export.
void export_npy(const torch::Tensor& tensor, const std::string& path);

}  // namespace vqfont
