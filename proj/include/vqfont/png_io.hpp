#pragma once

#include <string>

#include <torch/torch.h>

namespace vqfont {

// 8-bit grayscale PNG <-> float tensor in [0,1], shape (H, W).
// Color inputs are converted with the BT.601 luma weights; 16-bit inputs are
// reduced to 8 bits so that load(save(x)) is exact for 8-bit data.
torch::Tensor load_png_gray(const std::string& path);
void save_png_gray(const torch::Tensor& image, const std::string& path);

}  // namespace vqfont
