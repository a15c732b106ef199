#pragma once

#include <string>

#include "gradleak/tensor.hpp"

namespace gradleak {

// Binary netpbm images: P6 (PPM) maps to a [3,H,W] tensor, P5 (PGM) to
// [1,H,W]. 8-bit samples only; values are normalized by 255.
Tensor image_read(const std::string& path);

// Quantizes with round-half-away-from-zero after clamping to [0,1] and
// writes P6 for 3 channels, P5 for 1.
void image_write(const std::string& path, const Tensor& image);

// Path-dispatching loaders: *.json goes through the lossless tensor format,
// anything else through image_read/image_write.
Tensor load_tensor_or_image(const std::string& path);
void save_tensor_or_image(const std::string& path, const Tensor& t);

}  // namespace gradleak
