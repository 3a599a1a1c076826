// Gauge-fixing operator L_t = (D^1)^* D^1 on the disk model, with
// D^1 xi = (d_A xi, t [Phi, xi]).
//
// Discretization: xi lives on the rings 0..n_r-1 (ring n_r is Dirichlet),
// d_A xi lives on edges as parallel-transported differences
// U xi' U^{-1} - xi with U the exponential of the midpoint connection, and
// the potential is assembled pointwise from brackets with Phi. The assembled
// matrix K is the quadratic form of |D^1 xi|^2, so the Coulomb residual and
// L_t are exact discrete adjoints of each other.
#pragma once

#include "hitchin/model_fields.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <string>
#include <vector>

namespace hitchin {

struct LinearOp {
  Eigen::SparseMatrix<double> K;  // energy form: c^T K c = |D^1 xi|^2
  Eigen::VectorXd mass;           // diagonal L^2 mass: |xi|^2 = c^T M c
  GridPtr grid;
  double t = 1.0;
  PairKind kind = PairKind::fiducial;
  std::string boundary = "Dirichlet xi = 0 at r_max; zero flux through the origin";
  // Pair used for the bracket terms; needed by the adjoint and by D^1.
  std::shared_ptr<const HiggsPair> pair;
  std::vector<Mat2> radial_transport;   // per radial edge
  std::vector<Mat2> angular_transport;  // per angular edge

  int unknown_nodes() const { return grid->n_r * grid->n_theta; }
  int size() const { return 3 * unknown_nodes(); }

  // Lazily built sparse Cholesky factorization (shared by copies).
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& factor() const;

 private:
  mutable std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

struct GaugeSolveResult {
  MatrixField xi;
  double residual_norm = 0.0;
  int iterations = 0;
};

LinearOp assemble_Lt(const HiggsPair& pair, double t);
// Strong-form application (M^{-1} K) to a node 0-form.
MatrixField apply_Lt(const LinearOp& op, const MatrixField& xi);
GaugeSolveResult solve_Lt(const LinearOp& op, const MatrixField& rhs, double tol = 1e-10);

// D^1 xi as a tangent pair (alpha on edges, phi at nodes).
TangentPair apply_D1(const LinearOp& op, const MatrixField& xi);
// (D^1)^* v in strong form: d_A^* alpha - 2 pi_skew(i *[Phi^* ^ phi]).
MatrixField coulomb_residual(const LinearOp& op, const TangentPair& v);
MatrixField coulomb_residual(const HiggsPair& pair, const TangentPair& v);
// Relative size of the Coulomb residual: |(D^1)^* v| / (|D^1| |v|) with the
// operator scale estimated from the diagonal of K.
double coulomb_relative(const LinearOp& op, const TangentPair& v);

std::pair<TangentPair, GaugeSolveResult> gauge_fix(const LinearOp& op, const TangentPair& v,
                                                   double tol = 1e-10);
std::pair<TangentPair, GaugeSolveResult> gauge_fix(const HiggsPair& pair, const TangentPair& v,
                                                   double tol = 1e-10);

// L^2 norms on node 0-forms (Tr pairing, cell areas as weights).
double l2_norm0(const MatrixField& xi);
double sup_norm0(const MatrixField& xi);

// Energy pieces |d_A xi|^2 and 2|[Phi ^ xi]|^2 evaluated independently of the
// assembled matrix: node-sampled connection, centered differences, cell
// quadrature.
struct EnergySplit {
  double quadratic_form;  // <L xi, xi> from the assembled operator
  double gradient;        // |d_A xi|^2
  double potential;       // 2 |[t Phi ^ xi]|^2
};
EnergySplit energy_identity(const LinearOp& op, const MatrixField& xi);

// Smallest generalized eigenvalue of (K, M) by shift-invert Lanczos.
struct SpectrumEstimate {
  double lambda_min = 0.0;
  int steps = 0;
};
SpectrumEstimate smallest_eigenvalue(const LinearOp& op, int steps = 40, unsigned seed = 7);

// Strong-form potential acting on xi at one node, computed from brackets.
Mat2 potential_action(const Mat2& phi, double t, const Mat2& xi);

void dump_operator_triplets(const LinearOp& op, const std::string& path);

// Radial reduction for diagonal fields u(r) sigma on a rotationally symmetric
// pair q = c z: tridiagonal block of L_t divided by 8 pi, over rings 0..n_r-1.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;
};
Tridiagonal radial_block(const LinearOp& op);

struct GreenScalingReport {
  double t = 0.0, factor = 1.0;
  double deviation = 0.0;      // max node-wise relative deviation
  double inverse_norm_t = 0.0;   // 1 / lambda_min at t
  double inverse_norm_tp = 0.0;  // 1 / lambda_min at factor * t
  int shared_nodes = 0;
};
struct PacketSpec {
  double power = 1.5;   // profile exp(-|w|^power)
  double mix = 0.5;     // weight of the Re(w)-modulated e_1 component
};
// Solves L u = packet(t^{2/3} z) at t and t' = factor t on shared scaled
// logarithmic grids and compares t'^{4/3} u' with t^{4/3} u.
GreenScalingReport verify_green_scaling(const PainleveTable& table, double t, double factor,
                                        const PacketSpec& packet, int nodes_per_octave = 12,
                                        int n_theta = 32, double rho_inner = 0.01);

// Newton correction of an approximate pair for a rotationally symmetric
// q = c z dz^2. The complex gauge exp(gamma), gamma = u(r) diag(1, -1), moves the
// metric function k = chi h_t to k + u; each step solves the radial reduction of
// L_t (radial_block of the operator assembled at the current pair). The discrete
// equation is defect-corrected against the exact profile h_t(|c|^{1/3} r), and
// the boundary value of k at r_max is kept from the approximate pair.
struct NewtonReport {
  HiggsPair corrected;
  MatrixField gamma;              // hermitian, diag(u, -u)
  std::vector<double> residuals;  // sup-norm of the defect-corrected residual per iterate
  std::vector<double> k_approximate, k_corrected;  // per ring
  double distance = 0.0;          // sup over nodes of |corrected - approximate| (A and Phi)
  int iterations = 0;
};
NewtonReport newton_correct(const PainleveTable& table, const HiggsPair& approximate,
                            double tol = 1e-13, int max_iter = 30);

}  // namespace hitchin
