// Shared conventions for the disk model.
//
//   z = r e^{i theta},  dA = r dr dtheta,  *dr = r dtheta,  <A, B> = Tr(A B^*).
//   sigma = diag(i, -i).  Matrix-valued (1,0)-forms phi dz carry |dz|^2 = 2,
//   so <phi dz, psi dz> = 2 Tr(phi psi^*).
//   The L^2 metric carries an overall factor kMetricScale; see metrics.hpp.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace hitchin {

using cd = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kI{0.0, 1.0};

// Pointwise weight of (1,0)-form coefficients: |dz|^2.
inline constexpr double kDzNorm2 = 2.0;
// Overall normalization of the L^2 metric on the disk model.
inline constexpr double kMetricScale = 0.125;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};
struct FieldTypeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline Mat2 sigma3() {
  Mat2 m;
  m << kI, 0.0, 0.0, -kI;
  return m;
}

inline Mat2 offdiag(cd upper, cd lower) {
  Mat2 m;
  m << 0.0, upper, lower, 0.0;
  return m;
}

inline Mat2 zero2() { return Mat2::Zero(); }

// Basis of su(2): e_a = i * pauli_a, with Tr(e_a e_b^*) = 2 delta_ab.
Mat2 su2_basis(int a);
// Coordinates c with m = sum c_a e_a for skew-hermitian traceless m.
Vec3 su2_coords(const Mat2& m);
Mat2 su2_from(const Vec3& c);

inline double inner(const Mat2& a, const Mat2& b) {
  return (a * b.adjoint()).trace().real();
}
inline double norm2(const Mat2& a) { return a.cwiseAbs2().sum(); }
inline Mat2 bracket(const Mat2& a, const Mat2& b) { return a * b - b * a; }
// Skew-hermitian part (M - M^*)/2.
inline Mat2 skew_part(const Mat2& m) { return 0.5 * (m - m.adjoint()); }

// exp of a traceless skew-hermitian 2x2 matrix, in closed form.
Mat2 su2_exp(const Mat2& x);
// Matrix R with Ad_U(e_b) = sum_a R_ab e_a.
Eigen::Matrix3d adjoint_rotation(const Mat2& u);

}  // namespace hitchin
