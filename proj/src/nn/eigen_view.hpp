#pragma once

#include <Eigen/Dense>

#include "railcause/nn/tensor.hpp"

namespace railcause::nn::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using MatrixView = Eigen::Map<RowMatrix>;
using ConstMatrixView = Eigen::Map<const RowMatrix>;
using VectorView = Eigen::Map<RowVector>;
using ConstVectorView = Eigen::Map<const RowVector>;

inline ConstMatrixView matrix_view(const Tensor& t, std::size_t rows, std::size_t cols) {
  return ConstMatrixView(t.data(), static_cast<Eigen::Index>(rows),
                         static_cast<Eigen::Index>(cols));
}
inline MatrixView matrix_view(Tensor& t, std::size_t rows, std::size_t cols) {
  return MatrixView(t.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}
inline ConstVectorView vector_view(const Tensor& t) {
  return ConstVectorView(t.data(), static_cast<Eigen::Index>(t.size()));
}
inline VectorView vector_view(Tensor& t) {
  return VectorView(t.data(), static_cast<Eigen::Index>(t.size()));
}

}  // namespace railcause::nn::detail
