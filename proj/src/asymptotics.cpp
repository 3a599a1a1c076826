#include "hitchin/asymptotics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace hitchin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

void sort_samples(std::vector<Sample>& s) {
  std::sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) {
    return a.t != b.t ? a.t < b.t : a.value < b.value;
  });
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
  std::vector<double> residuals;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  KahanSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0)) throw DomainError("fit needs at least two distinct t values");
  LineFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  KahanSum ssr;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.residuals.push_back(r);
    ssr.add(r * r);
  }
  f.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - ssr.value() / syy.value(), 0.0, 1.0) : 1.0;
  return f;
}

std::vector<Sample> windowed(std::vector<Sample> s, Window w) {
  if (s.size() < 4) throw DomainError("fit needs at least 4 samples");
  for (const Sample& p : s)
    if (!(p.t > 0.0) || !std::isfinite(p.value))
      throw DomainError("fit samples need t > 0 and finite values");
  sort_samples(s);
  if (w == Window::asymptotic) s.erase(s.begin(), s.begin() + s.size() / 3);
  return s;
}

void require_one_signed(const std::vector<Sample>& s) {
  const bool pos = s.front().value > 0.0;
  for (const Sample& p : s) {
    if (p.value == 0.0 || (p.value > 0.0) != pos)
      throw DomainError("values change sign or vanish in the fit window; peel the expansion first");
  }
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

// int_0^T g(s) ds on dyadic pieces so that the adaptive rule resolves the
// decay near the origin without refining the whole range.
double integrate_to(const std::function<double(double)>& g, double T) {
  double acc = 0.0, a = 0.0, b = std::min(1.0, T);
  while (a < T) {
    acc += integrate(g, a, b);
    a = b;
    b = std::min(2.0 * b, T);
  }
  return acc;
}

}  // namespace

PowerLawFit fit_power_law(std::vector<Sample> samples, Window window) {
  const std::vector<Sample> s = windowed(std::move(samples), window);
  require_one_signed(s);
  std::vector<double> lx, ly, tx;
  for (const Sample& p : s) {
    lx.push_back(std::log(p.t));
    ly.push_back(std::log(std::abs(p.value)));
    tx.push_back(p.t);
  }
  const LineFit f = fit_line(lx, ly);
  PowerLawFit out;
  out.exponent = f.slope;
  out.coefficient = std::copysign(std::exp(f.intercept), s.front().value);
  out.r_squared = f.r_squared;
  out.residuals = f.residuals;
  out.t_lo = s.front().t;
  out.t_hi = s.back().t;
  const std::size_t half = s.size() / 2;
  if (s.size() - half >= 2) {
    const std::vector<double> ux(lx.begin() + half, lx.end()), uy(ly.begin() + half, ly.end());
    out.upper_half_exponent = fit_line(ux, uy).slope;
  } else {
    out.upper_half_exponent = kNaN;
  }
  const LineFit e = fit_line(tx, ly);
  out.semilog_rate = e.slope;
  out.semilog_r_squared = e.r_squared;
  out.prefers_exponential = e.r_squared > f.r_squared;
  return out;
}

ExponentialFit fit_exponential(std::vector<Sample> samples, Window window) {
  const std::vector<Sample> s = windowed(std::move(samples), window);
  require_one_signed(s);
  std::vector<double> x, y;
  for (const Sample& p : s) {
    x.push_back(p.t);
    y.push_back(std::log(std::abs(p.value)));
  }
  const LineFit f = fit_line(x, y);
  ExponentialFit out;
  out.rate = f.slope;
  out.coefficient = std::copysign(std::exp(f.intercept), s.front().value);
  out.r_squared = f.r_squared;
  out.t_lo = s.front().t;
  out.t_hi = s.back().t;
  return out;
}

ExpansionPeel peel_expansion(std::vector<Sample> samples, const std::vector<double>& ladder,
                             double noise_floor) {
  if (ladder.empty()) throw DomainError("peel_expansion needs a nonempty ladder");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (!(ladder[k] < ladder[k - 1])) throw DomainError("ladder must be strictly decreasing");
    if (ladder[k - 1] - ladder[k] < 1e-3)
      throw DomainError("ill-conditioned peel: near-equal ladder exponents");
  }
  if (samples.size() < ladder.size())
    throw DomainError("peel_expansion needs at least as many samples as ladder terms");
  sort_samples(samples);
  const int n = static_cast<int>(samples.size());
  // Rows weighted by t^{-lambda_0} so that the leading term is O(1) throughout.
  Eigen::VectorXd b(n), w(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    w(i) = std::pow(samples[i].t, -ladder[0]);
    b(i) = samples[i].value * w(i);
    scale = std::max(scale, std::abs(samples[i].value));
  }

  ExpansionPeel out;
  out.ladder = ladder;
  out.coefficients.assign(ladder.size(), 0.0);
  std::vector<double> residual(n);
  for (int k = 1; k <= static_cast<int>(ladder.size()); ++k) {
    Eigen::MatrixXd a(n, k);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < k; ++c) a(i, c) = std::pow(samples[i].t, ladder[c]) * w(i);
    Eigen::VectorXd colnorm = a.colwise().norm().transpose();
    for (int c = 0; c < k; ++c) a.col(c) /= colnorm(c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) throw DomainError("ill-conditioned peel: ladder columns are dependent");
    const Eigen::VectorXd x = qr.solve(b);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      KahanSum model;
      for (int c = 0; c < k; ++c) model.add(x(c) / colnorm(c) * std::pow(samples[i].t, ladder[c]));
      residual[i] = samples[i].value - model.value();
      worst = std::max(worst, std::abs(residual[i]));
    }
    for (int c = 0; c < k; ++c) out.coefficients[c] = x(c) / colnorm(c);
    out.terms_used = k;
    out.residual_max = scale > 0.0 ? worst / scale : 0.0;
    if (out.residual_max < noise_floor) break;
  }
  if (out.residual_max >= noise_floor && n >= 4) {
    std::vector<Sample> rs(n);
    for (int i = 0; i < n; ++i) rs[i] = {samples[i].t, residual[i]};
    try {
      out.terminal_residual_fit = fit_power_law(rs, Window::all);
      out.residual_fitted = true;
    } catch (const DomainError&) {
      out.residual_fitted = false;
    }
  }
  return out;
}

double packet_integral_radial(const std::function<double(double)>& f, int j, double t) {
  if (j < 0) throw DomainError("packet_integral: j < 0 is not integrable");
  if (!(t > 0.0)) throw DomainError("packet_integral: t must be positive");
  const double T = std::pow(t, 2.0 / 3.0);
  auto g = [&](double s) { return f(s) * std::pow(s, j); };
  return integrate_to(g, T) / std::pow(T, j + 1);
}

cd packet_integral_disk(const std::function<cd(cd)>& f, int j, double t, int n_theta) {
  if (j < 0) throw DomainError("packet_integral: j < 0 is not integrable");
  if (!(t > 0.0)) throw DomainError("packet_integral: t must be positive");
  if (n_theta < 1) throw ConfigError("packet_integral: n_theta must be positive");
  const double T = std::pow(t, 2.0 / 3.0);
  const double dth = 2.0 * kPi / n_theta;
  cd acc = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const cd e = std::polar(1.0, k * dth);
    // z = (s/T) e, dA = r dr dtheta; the factor T^{-(j+1)} comes out of z^{j-1} r dr.
    auto re = [&](double s) { return (f(s * e) * std::pow(s, j)).real(); };
    auto im = [&](double s) { return (f(s * e) * std::pow(s, j)).imag(); };
    const cd radial(integrate_to(re, T), integrate_to(im, T));
    acc += radial * std::pow(e, j - 1);
  }
  return acc * dth / std::pow(T, j + 1);
}

double expected_exponent(const std::string& d) {
  static const std::map<std::string, double> table{
      {"rr", -5.0 / 3.0}, {"hh", -2.0 / 3.0}, {"vv", -2.0 / 3.0},
      {"rh", -1.0},       {"rv", -1.0},       {"hv", -2.0 / 3.0}};
  const auto it = table.find(d);
  if (it == table.end()) throw ConfigError("unknown direction '" + d + "'");
  return it->second;
}

MetricTable metric_difference_table(const PainleveTable& table, const std::vector<double>& t_grid,
                                    const std::vector<std::string>& directions,
                                    const SweepSettings& settings, double zero_floor) {
  for (const std::string& d : directions) expected_exponent(d);
  if (t_grid.size() < 8) throw ConfigError("metric_difference_table needs at least 8 values of t");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (!(t_grid[i] > 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
      throw ConfigError("t grid must be positive and increasing");
  MetricTable out;
  for (double t : t_grid) out.points.push_back(sweep_point(table, t, settings));
  auto pick = [](const SweepPoint& p, const std::string& d) {
    if (d == "rr") return p.rr;
    if (d == "hh") return p.hh;
    if (d == "vv") return p.vv;
    if (d == "rh") return p.rh;
    if (d == "rv") return p.rv.pairing;
    return p.hv.pairing;
  };
  for (const std::string& d : directions) {
    TableRow row;
    row.direction = d;
    row.expected = expected_exponent(d);
    for (const SweepPoint& p : out.points) {
      row.samples.push_back({p.t, pick(p, d)});
      row.max_abs = std::max(row.max_abs, std::abs(row.samples.back().value));
    }
    if (!t_grid.empty()) {
      row.t_lo = *std::min_element(t_grid.begin(), t_grid.end());
      row.t_hi = *std::max_element(t_grid.begin(), t_grid.end());
    }
    row.exponent = row.coefficient = row.upper_half_exponent = kNaN;
    if (row.max_abs < zero_floor) {
      row.identically_zero = true;
      row.r_squared = kNaN;
      row.note = "identically zero";
    } else {
      try {
        const PowerLawFit f = fit_power_law(row.samples);
        row.exponent = f.exponent;
        row.coefficient = f.coefficient;
        row.r_squared = f.r_squared;
        row.upper_half_exponent = f.upper_half_exponent;
        row.t_lo = f.t_lo;
        row.t_hi = f.t_hi;
      } catch (const DomainError& e) {
        row.r_squared = kNaN;
        row.note = e.what();
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<double> geometric_grid(double t_min, double t_max, int count) {
  if (count < 1 || !(t_min > 0.0) || !(t_max >= t_min))
    throw ConfigError("geometric grid needs count >= 1 and 0 < t_min <= t_max");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = count == 1 ? t_min : t_min * std::pow(t_max / t_min, double(i) / (count - 1));
  g.back() = t_max;
  return g;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string table_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "direction,t_lo,t_hi,exponent,coefficient,r_squared,expected\n";
  for (const TableRow& r : rows)
    os << r.direction << ',' << format_double(r.t_lo) << ',' << format_double(r.t_hi) << ','
       << format_double(r.exponent) << ',' << format_double(r.coefficient) << ','
       << format_double(r.r_squared) << ',' << format_double(r.expected) << '\n';
  return os.str();
}

std::string table_json(const std::vector<TableRow>& rows) {
  auto num = [](double x) { return std::isnan(x) ? nlohmann::json(nullptr) : nlohmann::json(x); };
  nlohmann::json arr = nlohmann::json::array();
  for (const TableRow& r : rows) {
    nlohmann::json o;
    o["direction"] = r.direction;
    o["t_lo"] = num(r.t_lo);
    o["t_hi"] = num(r.t_hi);
    o["exponent"] = num(r.exponent);
    o["coefficient"] = num(r.coefficient);
    o["r_squared"] = num(r.r_squared);
    o["expected"] = num(r.expected);
    o["identically_zero"] = r.identically_zero;
    o["upper_half_exponent"] = num(r.upper_half_exponent);
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string sweep_dat(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "# t n_r rr hh vv rh rv hv sup_phi_horizontal sup_phi_radial sup_xi_vertical\n";
  for (const SweepPoint& p : points)
    os << format_double(p.t) << ' ' << p.n_r << ' ' << format_double(p.rr) << ' '
       << format_double(p.hh) << ' ' << format_double(p.vv) << ' ' << format_double(p.rh) << ' '
       << format_double(p.rv.pairing) << ' ' << format_double(p.hv.pairing) << ' '
       << format_double(p.sup_phi_horizontal) << ' ' << format_double(p.sup_phi_radial) << ' '
       << format_double(p.sup_xi_vertical) << '\n';
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace hitchin
