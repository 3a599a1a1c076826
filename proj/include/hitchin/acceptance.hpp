// The twelve acceptance checks as library functions. The CLI subcommands, the
// acceptance binary and the Python module all call these.
#pragma once

#include "hitchin/asymptotics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace hitchin {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;  // measured quantities, in print order
  std::vector<std::string> failures;                   // failed sub-checks
  std::string line() const;                            // one-line summary
  void check(bool ok, const std::string& what);
  void add(const std::string& key, double v) { values.emplace_back(key, v); }
};

// Sweep shared by the radial, vertical/mixed and packet-ratio criteria.
struct SweepBundle {
  MetricTable table;               // q = z, qdot = dz^2
  std::vector<SweepPoint> rotation;  // qdot = i z, for the horizontal packet ratio
};

struct AcceptanceSettings {
  std::vector<double> sweep_t;     // default 8 * 2^{i/4}, i = 0..12
  std::vector<double> rotation_t;  // default 8, 16, 32
  SweepSettings sweep;
  int seed = 20240611;             // random fields of the energy identity
};
AcceptanceSettings default_acceptance_settings();

SweepBundle run_sweeps(const PainleveTable& table, const AcceptanceSettings& s);

CriterionResult check_painleve(const PainleveTable& table);
CriterionResult check_ft_properties(const PainleveTable& table);
CriterionResult check_residual(const PainleveTable& table);
CriterionResult check_green_scaling(const PainleveTable& table);
CriterionResult check_packet_ladder();
CriterionResult check_coulomb_gauge(const PainleveTable& table, const SweepBundle& sweeps,
                                    int seed);
CriterionResult check_radial(const SweepBundle& sweeps);
CriterionResult check_vertical_mixed(const SweepBundle& sweeps);
CriterionResult check_cone();
CriterionResult check_chart();
CriterionResult check_newton(const PainleveTable& table);
CriterionResult check_packet_ratios(const SweepBundle& sweeps);

// Runs the criteria whose ids are listed (all when empty), in id order.
std::vector<CriterionResult> run_acceptance(const PainleveTable& table,
                                            const std::vector<int>& ids = {},
                                            const AcceptanceSettings& s =
                                                default_acceptance_settings());

}  // namespace hitchin
