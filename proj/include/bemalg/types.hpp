#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SparseCore>

namespace bemalg {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace bemalg
