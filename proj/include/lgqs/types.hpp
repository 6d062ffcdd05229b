#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lgqs {

// Upper bound on any matrix dimension in the library (2N phase-space
// coordinates, 2M channel coordinates, measurement rows). Keeps all the small
// matrices on the stack.
inline constexpr int kMaxDim = 8;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                           kMaxDim, kMaxDim>;

}  // namespace lgqs
