#pragma once

#include <Eigen/Core>

namespace reflectsde {

// Largest state / noise dimension supported. Vectors and matrices are
// dynamically sized up to this bound but live on the stack, so the
// per-step arithmetic in the schemes never touches the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

}  // namespace reflectsde
