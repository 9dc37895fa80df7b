#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "halolab/bounds.hpp"
#include "halolab/rng.hpp"
#include "halolab/special.hpp"

namespace halo {

// Verification-guided planner at the conditional-valid-mass abstraction: at
// round j the proposal is valid with probability rho_j; the verifier accepts
// valid proposals with probability c = 1 - eps_fn and invalid ones with
// probability eps_fp; the first acceptance terminates.
struct PlannerConfig {
  int budget_q = 10;
  double eps_fp = 0.0;
  double eps_fn = 0.0;
  ScheduleSpec schedule;

  void validate() const;
};

struct PlannerOutcome {
  bool accepted = false;  // false means abstained
  int round = 0;          // 1-based round of acceptance
  bool valid = false;     // whether the accepted plan was valid
};

PlannerOutcome run_planner(const PlannerConfig& cfg, Rng& rng);

struct ReliabilityReport {
  long trials = 0;
  double h_hat = 0.0, a_hat = 0.0, s_hat = 0.0;  // accepted-invalid / abstained / accepted-valid
  WilsonInterval h_ci, a_ci, s_ci;
  long h_count = 0, a_count = 0, s_count = 0;
  double h_cap = 0.0;  // q * eps_fp
  double a_cap = 0.0;  // prod (1 - c rho_j)
  std::vector<long> accept_round_hist;  // index j-1: acceptances at round j
  std::vector<double> rho;              // schedule echo (clamped)
  bool any_clamped = false;
};

ReliabilityReport estimate_reliability(const PlannerConfig& cfg, long trials, uint64_t seed,
                                       int threads = 1);

struct ScheduleComparisonRow {
  std::string schedule_name;
  int q = 0;
  double h_hat = 0.0, a_hat = 0.0, s_hat = 0.0;
  double h_cap = 0.0, a_cap = 0.0;
  bool meets_alpha_beta = false;
};

struct ScheduleComparison {
  double gamma = 0.0;
  int horizon = 0;
  double alpha = 0.0, beta = 0.0;
  std::vector<ScheduleComparisonRow> rows;
  std::vector<std::string> schedule_names;
  std::vector<int> crossover_q;  // per schedule; -1 when never met within the grid
};

// Every schedule starts from the horizon-barrier mass rho_1 = gamma^T. For
// each (schedule, q) the measured rates, certified caps, and whether the
// (alpha, beta) target is met; crossover is the smallest q in the grid that
// meets it.
ScheduleComparison compare_schedules(double gamma, int horizon, double alpha, double beta,
                                     double eps_fp, double eps_fn,
                                     const std::vector<ScheduleSpec>& schedule_kinds,
                                     const std::vector<int>& q_grid, long trials, uint64_t seed,
                                     int threads = 1);

// Optional index-level backend: a finite plan library with elimination on
// rejection, one concrete mechanism that grows the conditional valid mass.
struct EliminationConfig {
  long library_size = 1024;
  long valid_count = 8;
  int budget_q = 10;
  double eps_fp = 0.0;
  double eps_fn = 0.0;
};

struct EliminationReport {
  long trials = 0;
  double h_hat = 0.0, a_hat = 0.0, s_hat = 0.0;
  std::vector<double> rho_hat;     // measured conditional valid mass per round
  std::vector<long> reached;       // trials reaching round j
};

EliminationReport run_elimination_planner(const EliminationConfig& cfg, long trials,
                                          uint64_t seed, int threads = 1);

}  // namespace halo
