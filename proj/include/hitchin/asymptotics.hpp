// Exponent extraction from t-indexed samples, packet integrals and the
// metric-difference exponent table.
#pragma once

#include "hitchin/deformations.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hitchin {

struct Sample {
  double t = 0.0;
  double value = 0.0;
};

enum class Window {
  asymptotic,  // drop the smallest third of the t values
  all,
};

struct PowerLawFit {
  double exponent = 0.0;
  double coefficient = 0.0;  // value ~ coefficient * t^exponent
  double r_squared = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::vector<double> residuals;  // in log|value|, ordered by t
  // Refit on the upper half of the window; NaN when fewer than 2 points remain.
  double upper_half_exponent = 0.0;
  // log|value| = a + b t on the same window.
  double semilog_rate = 0.0;
  double semilog_r_squared = 0.0;
  bool prefers_exponential = false;
};

// Least squares on (log t, log|value|). Needs at least 4 samples in total and
// one-signed nonzero values in the window.
PowerLawFit fit_power_law(std::vector<Sample> samples, Window window = Window::asymptotic);

struct ExponentialFit {
  double rate = 0.0;         // value ~ coefficient * exp(rate * t)
  double coefficient = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
};
ExponentialFit fit_exponential(std::vector<Sample> samples, Window window = Window::all);

struct ExpansionPeel {
  std::vector<double> ladder;
  std::vector<double> coefficients;
  int terms_used = 0;          // ladder entries needed to reach the noise floor
  double residual_max = 0.0;   // max |value - sum c_k t^lambda_k| / max |value|
  bool residual_fitted = false;
  PowerLawFit terminal_residual_fit;
};

// Sum c_k t^{lambda_k} fitted on all samples. Terms are added one at a time
// (joint least squares each time) until the relative residual drops below
// noise_floor; the remaining coefficients are 0. Samples are sorted first, so
// the result does not depend on their order.
ExpansionPeel peel_expansion(std::vector<Sample> samples, const std::vector<double>& ladder,
                             double noise_floor = 1e-12);

// int_0^1 f(T r) r^j dr with T = t^{2/3}.
double packet_integral_radial(const std::function<double(double)>& f, int j, double t);
// int over the unit disk of f(T z) z^{j-1} dA. Trapezoid in theta with n_theta
// nodes, adaptive Gauss-Kronrod in r.
cd packet_integral_disk(const std::function<cd(cd)>& f, int j, double t, int n_theta = 64);

struct TableRow {
  std::string direction;
  double t_lo = 0.0, t_hi = 0.0;
  double exponent = 0.0;     // NaN when the difference vanishes identically
  double coefficient = 0.0;
  double r_squared = 0.0;
  double expected = 0.0;     // exponent of the leading term of the expansion
  double upper_half_exponent = 0.0;
  double max_abs = 0.0;
  bool identically_zero = false;
  std::string note;
  std::vector<Sample> samples;
};

struct MetricTable {
  std::vector<SweepPoint> points;
  std::vector<TableRow> rows;
};

double expected_exponent(const std::string& direction);
// Directions out of {rr, hh, vv, rh, rv, hv}; t_grid needs at least 8 increasing
// values. Differences whose absolute value stays below zero_floor at every t are
// reported as identically zero.
MetricTable metric_difference_table(const PainleveTable& table, const std::vector<double>& t_grid,
                                    const std::vector<std::string>& directions,
                                    const SweepSettings& settings = {}, double zero_floor = 1e-12);

std::vector<double> geometric_grid(double t_min, double t_max, int count);

// CSV direction,t_lo,t_hi,exponent,coefficient,r_squared,expected
std::string table_csv(const std::vector<TableRow>& rows);
std::string table_json(const std::vector<TableRow>& rows);
// Whitespace-separated sweep columns for gnuplot.
std::string sweep_dat(const std::vector<SweepPoint>& points);
std::string format_double(double x);
void write_text(const std::string& path, const std::string& text);

}  // namespace hitchin
