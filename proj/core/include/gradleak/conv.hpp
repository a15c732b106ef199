#pragma once

#include <optional>

#include "gradleak/geometry.hpp"
#include "gradleak/tensor.hpp"

namespace gradleak {

/// Lowers the padded input into a [in_channels*kernel^2, out^2] patch
/// matrix; padded positions become zeros.
Tensor im2col(const Tensor& input, const ConvGeometry& geom);

/// 2-D convolution of input [N,H,H] with weights [F,N,K,K], optional
/// bias [F]; returns [F,out,out]. Implemented as im2col followed by a
/// filter-by-patch product.
Tensor conv2d_forward(const Tensor& input, const Tensor& weights,
                      const std::optional<Tensor>& bias, const ConvGeometry& geom);

/// z = W x + b with W [units, in], x [in], b [units].
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

}  // namespace gradleak
