// Polar grids on the unit disk (or its double cover), matrix-valued fields,
// the model quadratic differential, and the limiting / fiducial / approximate
// pairs together with curvature and the Hitchin residual.
#pragma once

#include "hitchin/conventions.hpp"
#include "hitchin/painleve.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hitchin {

enum class Spacing { graded, logarithmic };

// Rings r[0] < ... < r[n_r] = r_max. Rings 0..n_r-1 carry unknowns of the
// gauge operator; ring n_r carries the Dirichlet condition. face[k] is the
// inner radius of the control cell of ring k (face[0] = 0: the cells tile the
// full disk and there is no flux through the origin).
struct PolarGrid {
  int n_r = 0;
  int n_theta = 0;
  double r_min = 0.0;
  double r_max = 1.0;
  double grading = 1.0;
  int cover_sheets = 1;
  Spacing spacing = Spacing::graded;
  int nodes_per_octave = 0;
  std::vector<double> r;
  std::vector<double> face;
  double dtheta = 0.0;

  int rings() const { return n_r + 1; }
  int node(int k, int j) const { return k * n_theta + j; }
  int nodes() const { return rings() * n_theta; }
  double theta(int j) const { return j * dtheta; }
  double outer_face(int k) const { return k < n_r ? face[k + 1] : r_max; }
  double width(int k) const { return outer_face(k) - face[k]; }
  double cell_area(int k) const {
    const double o = outer_face(k);
    return 0.5 * (o * o - face[k] * face[k]) * dtheta;
  }
  double period() const { return 2.0 * kPi * cover_sheets; }

  // r_k = r_max ((k + 1/2)/(n_r + 1/2))^grading; with origin_node the
  // offset is dropped and ring 0 sits at r = 0.
  static PolarGrid graded(int n_r, int n_theta, double grading = 1.0, double r_max = 1.0,
                          int cover_sheets = 1, bool origin_node = false);
  // r_k = r_max 2^{(k - n_r)/m} with n_r = ceil(m log2(r_max / r_inner)).
  static PolarGrid logarithmic(double r_inner, int nodes_per_octave, int n_theta,
                               double r_max = 1.0, int cover_sheets = 1);
  // Logarithmic grid whose rings form the same set in the scaled variable
  // t^{2/3} r for all t on a geometric ladder; the innermost ring sits near
  // rho_inner in that variable.
  static PolarGrid scale_covariant(double t, double rho_inner, int nodes_per_octave, int n_theta,
                                   int cover_sheets = 1);
};

using GridPtr = std::shared_ptr<const PolarGrid>;

enum class FormDegree { zero, one, one_zero, zero_one, two, one_one };
enum class Symmetry { skew_hermitian, hermitian, general };
enum class Layout { nodes, edges };

// Nodes layout: c0[node] holds the single coefficient (0-form, (1,0)-form
// coefficient of dz, (1,1)-form coefficient of dzbar^dz, 2-form coefficient of
// dr^dtheta), or the dr coefficient of a 1-form with c1 holding dtheta.
// Edges layout (1-forms only): c0 on radial edges (k,j)->(k+1,j), sampled at
// the midpoint, size n_r*n_theta; c1 on angular edges (k,j)->(k,j+1), size
// (n_r+1)*n_theta.
struct MatrixField {
  GridPtr grid;
  FormDegree degree = FormDegree::zero;
  Symmetry symmetry = Symmetry::general;
  Layout layout = Layout::nodes;
  std::vector<Mat2> c0;
  std::vector<Mat2> c1;

  static MatrixField zeros(GridPtr g, FormDegree d, Symmetry s, Layout l = Layout::nodes);
  bool is_one_form() const { return degree == FormDegree::one; }
};

struct FieldCheck {
  double max_trace = 0.0;
  double max_symmetry_defect = 0.0;
  bool ok(double tol = 1e-12) const { return max_trace <= tol && max_symmetry_defect <= tol; }
};
FieldCheck check_field(const MatrixField& f);
// Equivariance on the double cover: values at theta and theta + 2 pi agree up to
// the given sign (+1 even, -1 odd).
double equivariance_defect(const MatrixField& f, int sign);

// q = f(z) dz^2 with qdot = fdot(z) dz^2, polynomials in z.
struct QuadDifferentialModel {
  std::vector<cd> coeffs{0.0, 1.0};
  std::vector<cd> dot_coeffs{1.0};

  QuadDifferentialModel() = default;
  QuadDifferentialModel(std::vector<cd> c, std::vector<cd> dc);
  cd f(cd z) const;
  cd fp(cd z) const;
  cd fdot(cd z) const;
  cd fdotp(cd z) const;
  double abs_q(cd z) const { return std::abs(f(z)); }
  // Same model with qdot replaced by q (the radial direction).
  QuadDifferentialModel radial() const;
  // Scales f so that the integral of |q| over the unit disk equals 1.
  QuadDifferentialModel normalized() const;
  void validate() const;
};

struct CutoffSpec {
  double rho1 = 0.625;
  double rho2 = 0.875;
  bool active = true;
  static CutoffSpec none() { return {0.0, 0.0, false}; }
  double operator()(double x) const;
  double derivative(double x) const;
  void validate(double r_max) const;
};

enum class PairKind { limiting, fiducial, approximate, corrected };
std::string to_string(PairKind k);

struct HiggsPair {
  MatrixField A;    // 1-form (a_r, a_theta) at nodes, skew-hermitian
  MatrixField Phi;  // (1,0)-form coefficient at nodes
  double t = 1.0;
  PairKind kind = PairKind::limiting;
  QuadDifferentialModel q;
  CutoffSpec chi = CutoffSpec::none();
  GridPtr grid() const { return A.grid; }
};

// Infinitesimal deformation (alpha, phi). alpha lives on edges; phi is the
// variation of the full Higgs field t Phi (times the stored scale).
struct TangentPair {
  MatrixField alpha;
  MatrixField phi;
  bool gauged = false;
  double scale = 1.0;
  std::string label;
  GridPtr grid() const { return phi.grid; }
  static TangentPair zeros(GridPtr g);
};
TangentPair operator+(const TangentPair& a, const TangentPair& b);
TangentPair operator-(const TangentPair& a, const TangentPair& b);
TangentPair operator*(double s, const TangentPair& a);

// Real components of Im(dbar log|f|) at z: (dr, dtheta) coefficients.
std::pair<double, double> im_dbar_log_abs(const QuadDifferentialModel& q, double r, double theta);

HiggsPair limiting_configuration(const QuadDifferentialModel& q, GridPtr grid);
HiggsPair fiducial_solution(const PainleveTable& table, double t, GridPtr grid);
HiggsPair approximate_solution(const PainleveTable& table, const QuadDifferentialModel& q,
                               double t, const CutoffSpec& chi, GridPtr grid);

// Pointwise connection and Higgs field of the approximate family at one point.
struct PairSample {
  Mat2 a_r, a_theta, phi;
};
PairSample approximate_sample(const PainleveTable& table, const QuadDifferentialModel& q,
                              double t, const CutoffSpec& chi, double r, double theta);

MatrixField curvature(const MatrixField& A);

struct ResidualReport {
  MatrixField moment;  // F_A + t^2 [Phi ^ Phi^*], coefficient of dr^dtheta
  MatrixField holo;    // dbar_A Phi, coefficient of dzbar^dz
  double sup_moment = 0.0, l2_moment = 0.0;
  double sup_holo = 0.0, l2_holo = 0.0;
};
// Pointwise norms use |dr^dtheta| = 1/r and |dzbar^dz| = 2.
ResidualReport hitchin_residual(const HiggsPair& pair, double t);

// Defect-corrected residual of the approximate pair: at each node the discrete
// residual of a reference exact pair is subtracted (the cutoff-free pair on the
// inner side of the annulus midpoint, the limiting pair outside), so the
// truncation error of the stencil cancels. Nodes whose 3x3 stencil straddles a
// cutoff boundary are excluded from the inner/outer maxima.
struct ResidualDefect {
  double sup_inner = 0.0;    // |q| <= rho1 on the whole stencil
  double sup_outer = 0.0;    // |q| >= rho2 on the whole stencil
  double sup_annulus = 0.0;  // every other node
  double raw_sup = 0.0;      // uncorrected residual, all nodes
  int excluded = 0;          // stencil-crossing nodes outside the annulus
};
ResidualDefect approximate_residual_defect(const PainleveTable& table,
                                           const QuadDifferentialModel& q, double t,
                                           const CutoffSpec& chi, GridPtr grid);

// Nonuniform centered radial derivative of a node field (one-sided at the ends).
std::vector<Mat2> radial_derivative(const PolarGrid& g, const std::vector<Mat2>& v);
std::vector<Mat2> angular_derivative(const PolarGrid& g, const std::vector<Mat2>& v);

// CSV dump: one block per stored component with a header naming it.
void dump_field_csv(const MatrixField& f, const std::string& path, const std::string& name);

}  // namespace hitchin
