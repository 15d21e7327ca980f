#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace spinbound {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Spinor = Eigen::Vector2cd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

using PointList = std::vector<Vec2>;

}  // namespace spinbound
