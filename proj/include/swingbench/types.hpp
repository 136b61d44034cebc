#pragma once

#include <Eigen/Dense>

#include <complex>

namespace swingbench {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using MatrixXc = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorXc = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

}  // namespace swingbench
