#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "halolab/linalg.hpp"
#include "halolab/special.hpp"

namespace halo {

// Result of a closed-form lower bound. raw may be <= 0 (vacuous); clamped is
// raw restricted to [0,1].
struct BoundResult {
  double raw = 0.0;
  double clamped = 0.0;
  bool vacuous = false;             // raw <= 0
  bool degenerate_mass = false;     // some p_i was 0 or 1 and contributed 0
};

BoundResult make_lower_bound(double raw);

// ---------------------------------------------------------------------------
// Isoperimetric bounds
// ---------------------------------------------------------------------------

struct IsoBoundInputs {
  std::vector<double> mode_mass;  // in-ball masses p_i^{(R)}
  double gap_halfwidth = 0.0;     // W
  double lipschitz = 1.0;         // L on B_R; epsilon = W / L
  double radius = 3.0;            // R
  int latent_dim = 2;             // d, used for the tail q(R)
};

// H >= sum_i [Phi(Phi^{-1}(p_i) + eps) - p_i] - q(R).
BoundResult iso_lower_bound(const IsoBoundInputs& in);

// Small-eps linearization with the uniform Taylor remainder cap:
// H >= eps * sum_i phi(Phi^{-1}(p_i)) - q(R) - eps^2 / (2 sqrt(2 pi e)).
BoundResult iso_bound_linearized(const IsoBoundInputs& in);

struct LipschitzProfileEntry {
  double radius;
  double lipschitz;
  std::vector<double> mode_mass;  // p_i^{(R)} at this radius
};

struct SupOverRResult {
  BoundResult best;
  double argmax_radius = 0.0;
  std::vector<BoundResult> per_entry;
};

// Evaluates the iso bound on every (R, L_R, p^{(R)}) profile entry and keeps
// the pointwise maximum.
SupOverRResult iso_bound_sup_over_R(const std::vector<LipschitzProfileEntry>& profile,
                                    double gap_halfwidth, int latent_dim);

// ---------------------------------------------------------------------------
// Precision barrier, trilemma, refinement steps
// ---------------------------------------------------------------------------

struct PrecisionInputs {
  double tube_constant = 1.0;      // C_M
  double delta = 0.1;
  int ambient_dim = 7;             // d
  int manifold_dim = 2;            // k < d
  double density_cap = 1.0;        // ess-sup of the action density
  double fold_count = 1.0;         // N_delta >= 1
  double sigma_star = 1.0;         // conditioning floor > 0
  double latent_density_cap = 1.0; // rho_Z^max
  double target_eta = 0.5;         // eta in (0,1)
};

// H >= 1 - C_M * delta^{d-k} * density_cap.
BoundResult precision_lower_bound(const PrecisionInputs& in);

// Density the tube must reach so that H <= eta: (1-eta)/C_M * delta^{-(d-k)}.
double required_density(const PrecisionInputs& in);

// H >= 1 - C_M * delta^{d-k} * N_delta * rho_max * sigma_star^{-d}.
BoundResult trilemma_bound(const PrecisionInputs& in);

// Threshold on N_delta * sigma_star^{-d} for H <= eta:
// (1-eta)/(C_M rho_max) * delta^{-(d-k)}.
double fold_collapse_requirement(const PrecisionInputs& in);

struct RefinementSteps {
  bool vacuous = false;
  long k_min = 0;
  double raw = 0.0;  // the unrounded requirement
};

// K >= [ (d-k) ln(1/delta) + ln((1-eta)/(C_M rho_max)) ] / (d ln(1/lambda)).
RefinementSteps required_refinement_steps(int d, int k, double delta, double eta, double lambda,
                                          double c_m, double rho_max);

// ---------------------------------------------------------------------------
// Horizon and planning bounds
// ---------------------------------------------------------------------------

struct HorizonBound {
  double success_cap = 1.0;  // prod gamma_t, computed in log space
  double h_lower = 0.0;      // 1 - success_cap
};

HorizonBound horizon_success_bound(const std::vector<double>& gamma);

struct ReliabilityWindow {
  long q_min = 0;
  long q_max = 0;
  bool q_max_unbounded = false;  // eps_fp == 0
  bool q_min_unbounded = false;  // abstention target unreachable
  bool feasible = false;
};

// Non-adaptive window: q_min = ceil(ln beta / ln(1 - c rho)),
// q_max = floor(alpha / eps_fp).
ReliabilityWindow reliability_window(double alpha, double beta, double eps_fp, double eps_fn,
                                     double rho);

struct AbstentionBound {
  double product_bound = 1.0;   // prod (1 - c rho_j)
  double exp_bound = 1.0;       // exp(-c sum rho_j)
  double required_mass = 0.0;   // (1/c) ln(1/beta)
};

AbstentionBound abstention_bound(const std::vector<double>& rho, double c, double beta);

// ---------------------------------------------------------------------------
// Amplification schedules
// ---------------------------------------------------------------------------

struct ScheduleSpec {
  enum class Kind { Constant, Polynomial, Geometric };
  Kind kind = Kind::Constant;
  double rho1 = 0.0;
  double param = 0.0;  // polynomial exponent p, or geometric ratio r

  // Conditional valid mass at round j (1-based), clamped into [0,1].
  double rho(int j) const;
  bool clamps_by(int q) const;  // any rho_j hits the [0,1] clamp for j <= q
  std::string name() const;
};

struct AmplificationReport {
  double sum_rho = 0.0;  // clamped schedule mass over j = 1..q
  bool any_clamped = false;
  double necessary_threshold = 0.0;  // 1 - alpha - beta
  bool necessary_met = false;        // sum_rho >= threshold
  // polynomial branch (rho_1 <= gamma^T, exponent p)
  double poly_q_requirement = 0.0;
  long poly_q_requirement_ceil = 0;
  // geometric branch (ratio r > 1)
  double geo_series_mass = 0.0;    // rho_1 (r^q - 1)/(r - 1), unclamped
  double geo_required_mass = 0.0;  // (1/c) ln(1/beta)
  bool geo_fp_ok = false;          // q eps_fp <= alpha
  bool geo_mass_ok = false;        // series mass >= required mass
  bool geo_sufficient = false;
  long geo_min_q = -1;  // smallest q whose series mass meets the requirement
};

AmplificationReport amplification_check(const ScheduleSpec& schedule, double gamma, int horizon,
                                        double alpha, double beta, double c, double eps_fp, int q);

// ---------------------------------------------------------------------------
// Tube volumes
// ---------------------------------------------------------------------------

struct Box {
  std::vector<double> lo, hi;
  double volume() const;
  int dim() const { return static_cast<int>(lo.size()); }
};

using DistanceFn = std::function<double(const Vec&)>;

struct TubeVolumeEstimate {
  double volume = 0.0;
  double ci_half = 0.0;  // 95% half-width on the volume
  long hits = 0;
  long n = 0;
};

// Hit-or-miss Monte Carlo of {dist(a) <= delta} over the box (which must
// contain the tube).
TubeVolumeEstimate tube_volume_mc(const DistanceFn& dist, double delta, const Box& box, long n,
                                  uint64_t seed, int threads = 1);

struct TubeScalingFit {
  std::vector<double> deltas;
  std::vector<TubeVolumeEstimate> estimates;
  double slope = 0.0;      // d log V / d log delta
  double log_c = 0.0;      // intercept
  double c_fit = 0.0;      // exp(intercept): empirical C_M when slope ~ d-k
  int expected_codim = 0;
  bool regime_violation = false;  // |slope - (d-k)| > 0.2
};

// Regression of log V against log delta over a grid; the box may depend on
// delta as long as it always contains the tube.
TubeScalingFit fit_tube_scaling(const DistanceFn& dist, const std::vector<double>& deltas,
                                const std::function<Box(double)>& box_for_delta, long n_per_delta,
                                int expected_codim, uint64_t seed, int threads = 1);

}  // namespace halo
