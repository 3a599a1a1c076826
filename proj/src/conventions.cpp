#include "hitchin/conventions.hpp"

#include <cmath>

namespace hitchin {

Mat2 su2_basis(int a) {
  Mat2 m = Mat2::Zero();
  switch (a) {
    case 0: m << 0.0, kI, kI, 0.0; break;
    case 1: m << 0.0, 1.0, -1.0, 0.0; break;
    case 2: m << kI, 0.0, 0.0, -kI; break;
    default: throw std::out_of_range("su2_basis index");
  }
  return m;
}

Vec3 su2_coords(const Mat2& m) {
  Vec3 c;
  for (int a = 0; a < 3; ++a) c[a] = 0.5 * inner(m, su2_basis(a));
  return c;
}

Mat2 su2_from(const Vec3& c) {
  Mat2 m;
  m << kI * c[2], kI * c[0] + c[1], kI * c[0] - c[1], -kI * c[2];
  return m;
}

Mat2 su2_exp(const Mat2& x) {
  // x^2 = -|c|^2 I for x = sum c_a e_a.
  const double th = std::sqrt(std::max(0.0, -(x * x).trace().real() / 2.0));
  const double sinc = th < 1e-8 ? 1.0 - th * th / 6.0 : std::sin(th) / th;
  return std::cos(th) * Mat2::Identity() + sinc * x;
}

Eigen::Matrix3d adjoint_rotation(const Mat2& u) {
  Eigen::Matrix3d r;
  const Mat2 ui = u.adjoint();
  for (int b = 0; b < 3; ++b) {
    const Vec3 col = su2_coords(u * su2_basis(b) * ui);
    r.col(b) = col;
  }
  return r;
}

}  // namespace hitchin
