// Tangent vectors to the family of approximate solutions: horizontal (moving
// q), radial (qdot = q) and vertical (moving in the fibre), their first-order
// gauge corrections and their Coulomb-gauge representatives.
//
// Horizontal and radial tangents are stored as (t^{-1} Adot, Phidot), i.e. the
// variation of (A, t Phi) times 1/t; vertical tangents are stored unscaled.
#pragma once

#include "hitchin/gauge_op.hpp"
#include "hitchin/metrics.hpp"

#include <vector>

namespace hitchin {

// (1/2) offdiag(|q|^{-1/2} qdot, |q|^{1/2} qdot/q): the t -> infinity limit of
// the corrected horizontal Higgs variation.
MatrixField phi_infinity(const QuadDifferentialModel& q, GridPtr grid);
TangentPair infinity_representative(const QuadDifferentialModel& q, GridPtr grid);

// Exact derivative of the approximate family in the direction qdot, cutoff
// included: (t^{-1} Adot, Phidot) with alpha sampled at edge midpoints.
TangentPair horizontal_raw(const PainleveTable& table, const QuadDifferentialModel& q, double t,
                           const CutoffSpec& chi, GridPtr grid);
// Infinitesimal gauge gamma_t = -(c/2) Im(qdot/q) sigma, c the connection
// coefficient of the approximate pair (c = 4 f_t where the cutoff is 1).
MatrixField correction_gauge(const PainleveTable& table, const QuadDifferentialModel& q,
                             double t, const CutoffSpec& chi, GridPtr grid);
// horizontal_raw - t^{-1} D^1 gamma_t, with t, the cutoff and D^1 taken from op.
// q must share its coefficients with the pair of op; its qdot is the direction.
TangentPair first_correction(const LinearOp& op, const PainleveTable& table,
                             const QuadDifferentialModel& q);

// first_correction in the direction qdot = q of the pair of op.
TangentPair radial_tangent(const LinearOp& op, const PainleveTable& table);

// Vertical data on a double-cover grid for q = z dz^2, with w^2 = z and
// eta = f dw - conj(f dw), f = w^{2m}. xi_loc = 2 (F - conj F) N' with F' = f and
// N' = offdiag(e^{i theta/2}, e^{-i theta/2}) parallel for the limiting connection.
struct VerticalData {
  int mode = 0;
  MatrixField xi_loc;
  MatrixField xi_inf;         // chi * xi_loc
  TangentPair alpha_inf;      // (d^h_{A_inf} xi_loc, 0): lattice representative of 2 eta N'
  TangentPair beta_inf;       // (d^h_{A_inf}((1 - chi) xi_loc), 0)
  ScalarOneForm eta;
};
VerticalData vertical_data(const LinearOp& limiting_op, const CutoffSpec& chi, int mode = 0);

struct GaugedTangent {
  TangentPair v;
  MatrixField xi;  // the solved gauge (v = v0 - D^1 xi)
  double coulomb_before = 0.0;
  double coulomb_after = 0.0;
};
GaugedTangent gauge_fixed(const LinearOp& op, const TangentPair& v0, double tol = 1e-10);

struct MixedProbe {
  double pairing = 0.0;         // <h, v>_{L^2}
  double pairing_err = 0.0;
  double pointwise_max = 0.0;   // max pointwise |<h, v>|
  double symmetry_defect = 0.0; // |<h, v> - <v, h>|
};
MixedProbe mixed_inner_probe(const TangentPair& h, const TangentPair& v);

// One value of t of the metric-difference sweeps. Radial (qdot = z),
// horizontal and vertical tangents share one operator and one factorization:
// the approximate pair of q = z dz^2 on a scale-covariant double-cover grid.
struct SweepSettings {
  int nodes_per_octave = 12;
  int n_theta = 64;           // over the full cover
  double rho_inner = 0.01;
  int vertical_mode = 0;
  std::vector<cd> horizontal_dot{1.0};  // qdot = dz^2
  CutoffSpec chi{};
  double tol = 1e-10;
};

struct SweepPoint {
  double t = 0.0;
  int n_r = 0;
  // Differences <v, w> - <v_inf, w_inf> on the same grid, and the references.
  double rr = 0.0, rr_ref = 0.0;
  double hh = 0.0, hh_ref = 0.0;
  double vv = 0.0, vv_ref = 0.0, vv_semiflat = 0.0;
  double rh = 0.0, rh_ref = 0.0;
  MixedProbe rv, hv;  // the limiting pairings of these vanish pointwise
  double radial_coulomb = 0.0, horizontal_coulomb = 0.0, vertical_coulomb = 0.0;
  double sup_phi_horizontal = 0.0;  // sup |phi_t - phi_inf| of the first correction
  double sup_phi_radial = 0.0;
  double sup_xi_horizontal = 0.0;   // sup |xi| of the horizontal gauge fix
  double sup_xi_vertical = 0.0;     // sup |xi_t + xi_inf|
};
SweepPoint sweep_point(const PainleveTable& table, double t, const SweepSettings& s = {});

}  // namespace hitchin
