#include "vqfont/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "vqfont/common.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace vqfont {

namespace {

constexpr char kMagic[8] = {'V', 'Q', 'F', 'C', 'K', 'P', '0', '1'};

const char* dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "f32";
    case torch::kFloat64: return "f64";
    case torch::kInt64: return "i64";
    case torch::kInt32: return "i32";
    case torch::kUInt8: return "u8";
    default: fail(ErrorCode::IoError, "unsupported checkpoint dtype");
  }
}

torch::ScalarType dtype_from_name(const std::string& name) {
  if (name == "f32") return torch::kFloat32;
  if (name == "f64") return torch::kFloat64;
  if (name == "i64") return torch::kInt64;
  if (name == "i32") return torch::kInt32;
  if (name == "u8") return torch::kUInt8;
  fail(ErrorCode::UnreadableSource, "unknown checkpoint dtype " + name);
}

}  // namespace

Checkpoint Checkpoint::load(const std::string& path) {
  require(fs::exists(path), ErrorCode::MissingCheckpoint, "no checkpoint at " + path);
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::UnreadableSource, "cannot open checkpoint " + path);

  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kMagic, 8) == 0, ErrorCode::UnreadableSource,
          path + " is not a vqfont checkpoint");

  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), 8);
  require(in.good() && header_len < (1ull << 31), ErrorCode::UnreadableSource,
          "corrupt checkpoint header");

  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  require(in.good(), ErrorCode::UnreadableSource, "truncated checkpoint " + path);

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::UnreadableSource, path + ": bad header: " + e.what());
  }
  require(header.value("version", -1) == kVersion, ErrorCode::UnreadableSource,
          path + ": unsupported checkpoint version");

  Checkpoint ckpt;
  ckpt.config_ = header.value("config", json::object());
  ckpt.meta_ = header.value("meta", json::object());
  const std::streampos data_start = in.tellg();
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto dtype = dtype_from_name(entry.at("dtype").get<std::string>());
    const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
    auto tensor = torch::empty(shape, dtype);
    require(static_cast<std::uint64_t>(tensor.nbytes()) == nbytes, ErrorCode::UnreadableSource,
            path + ": size mismatch for tensor " + name);
    in.seekg(data_start + static_cast<std::streamoff>(offset));
    in.read(static_cast<char*>(tensor.data_ptr()), static_cast<std::streamsize>(nbytes));
    require(in.good(), ErrorCode::UnreadableSource, path + ": truncated tensor " + name);
    ckpt.tensors_.emplace(name, std::move(tensor));
  }
  return ckpt;
}

void Checkpoint::save(const std::string& path) const {
  json manifest = json::array();
  std::uint64_t offset = 0;
  std::vector<torch::Tensor> contiguous;
  contiguous.reserve(tensors_.size());
  for (const auto& [name, tensor] : tensors_) {
    auto t = tensor.detach().cpu().contiguous();
    const std::uint64_t nbytes = t.nbytes();
    manifest.push_back({{"name", name},
                        {"dtype", dtype_name(t.scalar_type())},
                        {"shape", t.sizes().vec()},
                        {"offset", offset},
                        {"nbytes", nbytes}});
    offset += nbytes;
    contiguous.push_back(std::move(t));
  }
  const json header{{"version", kVersion}, {"config", config_}, {"meta", meta_},
                    {"tensors", manifest}};
  const std::string header_text = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::IoError, "cannot create " + tmp);
    out.write(kMagic, 8);
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(header_len));
    for (const auto& t : contiguous)
      out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
    require(out.good(), ErrorCode::IoError, "write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  require(!ec, ErrorCode::IoError, "rename failed for " + path + ": " + ec.message());
}

void Checkpoint::put(const std::string& name, const torch::Tensor& tensor) {
  tensors_[name] = tensor.detach().cpu().clone();
}

torch::Tensor Checkpoint::get(const std::string& name) const {
  const auto it = tensors_.find(name);
  require(it != tensors_.end(), ErrorCode::UnreadableSource,
          "checkpoint has no tensor named " + name);
  return it->second;
}

void Checkpoint::put_module(const std::string& prefix, const torch::nn::Module& module) {
  for (const auto& p : module.named_parameters(/*recurse=*/true))
    put(prefix + "." + p.key(), p.value());
  for (const auto& b : module.named_buffers(/*recurse=*/true))
    put(prefix + "." + b.key(), b.value());
}

void Checkpoint::load_into_module(const std::string& prefix, torch::nn::Module& module) const {
  torch::NoGradGuard no_grad;
  const auto copy_into = [&](const std::string& key, torch::Tensor dst) {
    const auto name = prefix + "." + key;
    const auto it = tensors_.find(name);
    require(it != tensors_.end(), ErrorCode::UnreadableSource,
            "checkpoint missing tensor " + name);
    require(it->second.sizes() == dst.sizes(), ErrorCode::ShapeMismatch,
            "checkpoint tensor " + name + " has wrong shape");
    dst.copy_(it->second);
  };
  for (const auto& p : module.named_parameters(/*recurse=*/true)) copy_into(p.key(), p.value());
  for (const auto& b : module.named_buffers(/*recurse=*/true)) copy_into(b.key(), b.value());
}

void export_npy(const torch::Tensor& tensor, const std::string& path) {
  auto t = tensor.detach().cpu().to(torch::kFloat32).contiguous();
  std::string shape = "(";
  for (std::int64_t i = 0; i < t.dim(); ++i) shape += std::to_string(t.size(i)) + ", ";
  shape += ")";
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': " + shape + ", }";
  const std::size_t unpadded = 10 + dict.size() + 1;
  dict += std::string((64 - unpadded % 64) % 64, ' ');
  dict += '\n';

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::IoError, "cannot create " + path);
  const char magic[] = "\x93NUMPY";
  out.write(magic, 6);
  out.put(1).put(0);
  const auto header_len = static_cast<std::uint16_t>(dict.size());
  out.write(reinterpret_cast<const char*>(&header_len), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(t.nbytes()));
  require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

}  // namespace vqfont
