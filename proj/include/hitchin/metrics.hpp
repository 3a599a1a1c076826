// L^2, special Kaehler and semiflat metric quantities on the disk model.
//
// The L^2 metric is  kMetricScale * integral( <a1, a2> + 2 Re <phi1, phi2> ) dA
// with the pointwise conventions of conventions.hpp, divided by the number of
// sheets so that cover integrals return integrals over the disk.
#pragma once

#include "hitchin/model_fields.hpp"

#include <vector>

namespace hitchin {

struct MetricValue {
  double value = 0.0;
  double err_est = 0.0;
  double alpha_part = 0.0;
  double phi_part = 0.0;
  int n_r = 0;
  int n_theta = 0;
};

// Radial rule for integral_0^R g(r) dr with g ~ r^a at 0 (a > -1). Nodes are
// graded r_k = R (k/n)^grading; the trapezoid rule in k/n is used on all cells
// but the first, where g is integrated as an exact power.
struct RadialQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  static RadialQuadrature graded(int n, double grading = 2.0, double r_max = 1.0, double a = 0.0);
};

struct QuadratureSpec {
  int n_r = 256;
  int n_theta = 64;
  double grading = 2.0;
  double r_max = 1.0;
};

MetricValue l2_inner(const TangentPair& v, const TangentPair& w);
// Pointwise maximum of |<v, w>| over edges (alpha part) and nodes (phi part).
double pointwise_inner_max(const TangentPair& v, const TangentPair& w);

// (1/4) integral |qdot|^2 / |q| dA over the disk.
MetricValue sk_metric(const QuadDifferentialModel& q, const QuadratureSpec& spec = {});
// (1/2) integral |q| dA over the disk.
MetricValue kahler_potential(const QuadDifferentialModel& q, const QuadratureSpec& spec = {});

struct ConeReport {
  std::vector<double> scales;
  std::vector<double> homogeneity_ratio;  // |t^2 qdot|^2 at t^2 q over |qdot|^2 at q, / t^2
  std::vector<double> radial_ratio;       // |2 t q|^2 at t^2 q over 4 |q|^2 at q
  std::vector<double> kahler_ratio;       // K(t^2 q) / (t^2 K(q))
  double max_rel_error = 0.0;
  double unit_speed = 0.0;  // 4 |q|^2_sK with int |q| = 1
};
ConeReport cone_check(const QuadDifferentialModel& q, const std::vector<double>& scales,
                      const QuadratureSpec& spec = {});

struct ChartReport {
  double z_chart = 0.0;
  double w_chart = 0.0;
  double rel_mismatch = 0.0;
};
// z-chart: (1/4) int |fdot|^2/|f| dA_z. w-chart: (1/8) int |tau|^2 dA_w over the
// double cover with tau = 2 fdot / f' dw and dA_w = |f'|^2 / (4|f|) dA_z.
ChartReport chart_crosscheck(const QuadDifferentialModel& q, const QuadratureSpec& spec = {});

// Imaginary-valued scalar 1-form sampled at the nodes of a cover grid.
struct ScalarOneForm {
  GridPtr grid;
  std::vector<cd> dr;
  std::vector<cd> dtheta;
};
// (1/2) integral over the cover of |eta|^2.
MetricValue semiflat_vertical(const ScalarOneForm& eta);

}  // namespace hitchin
