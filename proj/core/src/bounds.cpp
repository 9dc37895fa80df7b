#include "halolab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "halolab/errors.hpp"
#include "halolab/parallel.hpp"
#include "halolab/rng.hpp"

namespace halo {

BoundResult make_lower_bound(double raw) {
  BoundResult r;
  r.raw = raw;
  r.clamped = std::max(0.0, std::min(1.0, raw));
  r.vacuous = raw <= 0.0;
  return r;
}

namespace {

void check_iso_inputs(const IsoBoundInputs& in) {
  if (in.mode_mass.empty()) throw ConfigError("iso bound: need at least one mode mass");
  if (in.gap_halfwidth <= 0.0) throw ConfigError("iso bound: gap half-width W must be positive");
  if (in.lipschitz <= 0.0) throw ConfigError("iso bound: Lipschitz constant must be positive");
  if (in.radius <= 0.0) throw ConfigError("iso bound: radius must be positive");
  if (in.latent_dim < 1) throw ConfigError("iso bound: latent dim must be >= 1");
  double total = 0.0;
  for (size_t i = 0; i < in.mode_mass.size(); ++i) {
    const double p = in.mode_mass[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw ConfigError("iso bound: mode mass p_" + std::to_string(i) +
                        " must lie in [0,1], got " + std::to_string(p));
    total += p;
  }
  if (total > 1.0 + 1e-12)
    throw ConfigError("iso bound: mode masses sum to " + std::to_string(total) + " > 1");
}

}  // namespace

BoundResult iso_lower_bound(const IsoBoundInputs& in) {
  check_iso_inputs(in);
  const double eps = in.gap_halfwidth / in.lipschitz;
  const double tail = chi_tail(in.radius, in.latent_dim);
  double sum = 0.0;
  bool degenerate = false;
  for (double p : in.mode_mass) {
    if (p <= 0.0 || p >= 1.0) {
      // Phi^{-1} is undefined at the endpoints; the halo term vanishes in the limit.
      degenerate = true;
      continue;
    }
    sum += std_normal_cdf(std_normal_quantile(p) + eps) - p;
  }
  BoundResult r = make_lower_bound(sum - tail);
  r.degenerate_mass = degenerate;
  return r;
}

BoundResult iso_bound_linearized(const IsoBoundInputs& in) {
  check_iso_inputs(in);
  const double eps = in.gap_halfwidth / in.lipschitz;
  const double tail = chi_tail(in.radius, in.latent_dim);
  double sum = 0.0;
  bool degenerate = false;
  for (double p : in.mode_mass) {
    if (p <= 0.0 || p >= 1.0) {
      degenerate = true;
      continue;
    }
    sum += std_normal_pdf(std_normal_quantile(p));
  }
  // sup |x phi(x)| = 1/sqrt(2 pi e) gives the uniform Taylor remainder.
  const double remainder = eps * eps / (2.0 * std::sqrt(2.0 * 3.14159265358979323846 * 2.71828182845904523536));
  BoundResult r = make_lower_bound(eps * sum - tail - remainder);
  r.degenerate_mass = degenerate;
  return r;
}

SupOverRResult iso_bound_sup_over_R(const std::vector<LipschitzProfileEntry>& profile,
                                    double gap_halfwidth, int latent_dim) {
  if (profile.empty()) throw ConfigError("iso_bound_sup_over_R: profile must be nonempty");
  SupOverRResult res;
  res.per_entry.reserve(profile.size());
  bool first = true;
  for (const auto& entry : profile) {
    IsoBoundInputs in;
    in.mode_mass = entry.mode_mass;
    in.gap_halfwidth = gap_halfwidth;
    in.lipschitz = entry.lipschitz;
    in.radius = entry.radius;
    in.latent_dim = latent_dim;
    const BoundResult b = iso_lower_bound(in);
    res.per_entry.push_back(b);
    if (first || b.raw > res.best.raw) {
      res.best = b;
      res.argmax_radius = entry.radius;
      first = false;
    }
  }
  return res;
}

namespace {

void check_precision_inputs(const PrecisionInputs& in) {
  if (in.tube_constant <= 0.0) throw ConfigError("precision bound: C_M must be positive");
  if (in.delta <= 0.0) throw ConfigError("precision bound: delta must be positive");
  if (in.manifold_dim >= in.ambient_dim || in.manifold_dim < 0)
    throw ConfigError("precision bound: need 0 <= k < d");
  if (in.fold_count < 1.0) throw ConfigError("precision bound: fold count N must be >= 1");
  if (in.latent_density_cap <= 0.0) throw ConfigError("precision bound: rho_max must be positive");
}

}  // namespace

BoundResult precision_lower_bound(const PrecisionInputs& in) {
  check_precision_inputs(in);
  const int codim = in.ambient_dim - in.manifold_dim;
  const double raw = 1.0 - in.tube_constant * std::pow(in.delta, codim) * in.density_cap;
  return make_lower_bound(raw);
}

double required_density(const PrecisionInputs& in) {
  check_precision_inputs(in);
  if (!(in.target_eta > 0.0 && in.target_eta < 1.0))
    throw ConfigError("required_density: eta must lie in (0,1)");
  const int codim = in.ambient_dim - in.manifold_dim;
  return (1.0 - in.target_eta) / in.tube_constant * std::pow(in.delta, -codim);
}

BoundResult trilemma_bound(const PrecisionInputs& in) {
  check_precision_inputs(in);
  if (in.sigma_star <= 0.0)
    throw ConfigError("trilemma_bound: sigma_star must be positive (bound undefined at 0)");
  const int codim = in.ambient_dim - in.manifold_dim;
  // log-space to survive sigma^{-d} at small sigma
  const double log_term = std::log(in.tube_constant) + codim * std::log(in.delta) +
                          std::log(in.fold_count) + std::log(in.latent_density_cap) -
                          in.ambient_dim * std::log(in.sigma_star);
  const double raw = 1.0 - std::exp(log_term);
  return make_lower_bound(raw);
}

double fold_collapse_requirement(const PrecisionInputs& in) {
  check_precision_inputs(in);
  if (!(in.target_eta > 0.0 && in.target_eta < 1.0))
    throw ConfigError("fold_collapse_requirement: eta must lie in (0,1)");
  const int codim = in.ambient_dim - in.manifold_dim;
  return (1.0 - in.target_eta) / (in.tube_constant * in.latent_density_cap) *
         std::pow(in.delta, -codim);
}

RefinementSteps required_refinement_steps(int d, int k, double delta, double eta, double lambda,
                                          double c_m, double rho_max) {
  if (k >= d || k < 0) throw ConfigError("required_refinement_steps: need 0 <= k < d");
  if (!(delta > 0.0)) throw ConfigError("required_refinement_steps: delta must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("required_refinement_steps: eta in (0,1)");
  if (!(lambda > 0.0 && lambda < 1.0))
    throw ConfigError("required_refinement_steps: lambda must lie in (0,1); lambda = 1 gives no "
                      "contraction and the requirement diverges");
  if (c_m <= 0.0 || rho_max <= 0.0)
    throw ConfigError("required_refinement_steps: C_M and rho_max must be positive");
  const double bracket =
      (d - k) * std::log(1.0 / delta) + std::log((1.0 - eta) / (c_m * rho_max));
  RefinementSteps out;
  out.raw = bracket / (d * std::log(1.0 / lambda));
  if (bracket < 0.0) {
    out.vacuous = true;
    out.k_min = 0;
    return out;
  }
  out.k_min = static_cast<long>(std::ceil(out.raw));
  return out;
}

HorizonBound horizon_success_bound(const std::vector<double>& gamma) {
  double log_prod = 0.0;
  for (size_t t = 0; t < gamma.size(); ++t) {
    if (!(gamma[t] > 0.0 && gamma[t] <= 1.0))
      throw ConfigError("horizon_success_bound: gamma_" + std::to_string(t + 1) +
                        " must lie in (0,1]");
    log_prod += std::log(gamma[t]);
  }
  HorizonBound hb;
  hb.success_cap = std::exp(log_prod);
  hb.h_lower = 1.0 - hb.success_cap;
  return hb;
}

ReliabilityWindow reliability_window(double alpha, double beta, double eps_fp, double eps_fn,
                                     double rho) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ConfigError("reliability_window: rho must lie in (0,1]");
  if (alpha < 0.0 || beta < 0.0 || alpha + beta > 1.0)
    throw ConfigError("reliability_window: need alpha, beta >= 0 with alpha + beta <= 1");
  if (eps_fp < 0.0 || eps_fp > 1.0 || eps_fn < 0.0 || eps_fn > 1.0)
    throw ConfigError("reliability_window: verifier rates must lie in [0,1]");
  const double c = 1.0 - eps_fn;
  ReliabilityWindow w;

  if (beta >= 1.0) {
    w.q_min = 0;
  } else if (c * rho >= 1.0) {
    w.q_min = 1;  // a single certain true-accept drives abstention to zero
  } else if (beta <= 0.0 || c * rho <= 0.0) {
    w.q_min_unbounded = true;
  } else {
    w.q_min = static_cast<long>(std::ceil(std::log(beta) / std::log(1.0 - c * rho)));
    w.q_min = std::max<long>(w.q_min, 0);
  }

  if (eps_fp == 0.0) {
    w.q_max_unbounded = true;
    w.q_max = 0;
  } else {
    w.q_max = static_cast<long>(std::floor(alpha / eps_fp));
  }

  w.feasible = !w.q_min_unbounded && (w.q_max_unbounded || w.q_min <= w.q_max);
  return w;
}

AbstentionBound abstention_bound(const std::vector<double>& rho, double c, double beta) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("abstention_bound: c must lie in [0,1]");
  AbstentionBound ab;
  double log_prod = 0.0;
  double sum = 0.0;
  bool product_zero = false;
  for (size_t j = 0; j < rho.size(); ++j) {
    if (!(rho[j] >= 0.0 && rho[j] <= 1.0))
      throw ConfigError("abstention_bound: rho_" + std::to_string(j + 1) + " must lie in [0,1]");
    sum += rho[j];
    const double f = 1.0 - c * rho[j];
    if (f <= 0.0) {
      product_zero = true;
    } else {
      log_prod += std::log(f);
    }
  }
  ab.product_bound = product_zero ? 0.0 : std::exp(log_prod);
  ab.exp_bound = std::exp(-c * sum);
  if (beta > 0.0 && beta < 1.0 && c > 0.0) {
    ab.required_mass = std::log(1.0 / beta) / c;
  } else {
    ab.required_mass = 0.0;
  }
  return ab;
}

double ScheduleSpec::rho(int j) const {
  double v = 0.0;
  switch (kind) {
    case Kind::Constant:
      v = rho1;
      break;
    case Kind::Polynomial:
      v = rho1 * std::pow(static_cast<double>(j), param);
      break;
    case Kind::Geometric:
      v = rho1 * std::pow(param, static_cast<double>(j - 1));
      break;
  }
  return std::max(0.0, std::min(1.0, v));
}

bool ScheduleSpec::clamps_by(int q) const {
  for (int j = 1; j <= q; ++j) {
    double v = 0.0;
    switch (kind) {
      case Kind::Constant: v = rho1; break;
      case Kind::Polynomial: v = rho1 * std::pow(static_cast<double>(j), param); break;
      case Kind::Geometric: v = rho1 * std::pow(param, static_cast<double>(j - 1)); break;
    }
    if (v > 1.0 || v < 0.0) return true;
  }
  return false;
}

std::string ScheduleSpec::name() const {
  char buf[48];
  switch (kind) {
    case Kind::Constant:
      return "constant";
    case Kind::Polynomial:
      std::snprintf(buf, sizeof(buf), "poly_p%g", param);
      return buf;
    case Kind::Geometric:
      std::snprintf(buf, sizeof(buf), "geo_r%g", param);
      return buf;
  }
  return "unknown";
}

AmplificationReport amplification_check(const ScheduleSpec& schedule, double gamma, int horizon,
                                        double alpha, double beta, double c, double eps_fp,
                                        int q) {
  if (q < 1) throw ConfigError("amplification_check: q must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("amplification_check: gamma in (0,1)");
  if (schedule.kind == ScheduleSpec::Kind::Geometric && schedule.param <= 1.0)
    throw ConfigError("amplification_check: geometric schedule requires ratio r > 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("amplification_check: beta in (0,1)");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("amplification_check: c in (0,1]");

  AmplificationReport rep;
  const double rho1 = std::exp(horizon * std::log(gamma));  // gamma^T in log space

  for (int j = 1; j <= q; ++j) rep.sum_rho += schedule.rho(j);
  rep.any_clamped = schedule.clamps_by(q);
  rep.necessary_threshold = 1.0 - alpha - beta;
  rep.necessary_met = rep.sum_rho >= rep.necessary_threshold;

  // Polynomial floor on q for sum rho_j >= 1 - alpha - beta when rho_j <= rho_1 j^p.
  {
    const double p = schedule.kind == ScheduleSpec::Kind::Polynomial ? schedule.param : 0.0;
    rep.poly_q_requirement =
        std::pow(1.0 + (p + 1.0) * rep.necessary_threshold / rho1, 1.0 / (p + 1.0)) - 1.0;
    rep.poly_q_requirement_ceil = static_cast<long>(std::ceil(rep.poly_q_requirement));
  }

  // Geometric sufficiency: q eps_fp <= alpha and rho_1 (r^q - 1)/(r - 1) >= ln(1/beta)/c.
  rep.geo_required_mass = std::log(1.0 / beta) / c;
  if (schedule.kind == ScheduleSpec::Kind::Geometric) {
    const double r = schedule.param;
    rep.geo_series_mass = schedule.rho1 * (std::pow(r, q) - 1.0) / (r - 1.0);
    rep.geo_fp_ok = q * eps_fp <= alpha;
    rep.geo_mass_ok = rep.geo_series_mass >= rep.geo_required_mass;
    rep.geo_sufficient = rep.geo_fp_ok && rep.geo_mass_ok;
    rep.geo_min_q = -1;
    for (int qq = 1; qq <= std::max(q, 4096); ++qq) {
      const double mass = schedule.rho1 * (std::pow(r, qq) - 1.0) / (r - 1.0);
      if (mass >= rep.geo_required_mass) {
        rep.geo_min_q = qq;
        break;
      }
    }
  }
  return rep;
}

double Box::volume() const {
  if (lo.size() != hi.size() || lo.empty()) throw ConfigError("Box: inconsistent bounds");
  double v = 1.0;
  for (size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw ConfigError("Box: need hi > lo in every coordinate");
    v *= hi[i] - lo[i];
  }
  return v;
}

TubeVolumeEstimate tube_volume_mc(const DistanceFn& dist, double delta, const Box& box, long n,
                                  uint64_t seed, int threads) {
  if (n < 1) throw ConfigError("tube_volume_mc: n must be >= 1");
  if (delta < 0.0) throw ConfigError("tube_volume_mc: delta must be >= 0");
  const double box_vol = box.volume();
  const int d = box.dim();

  const long shard_size = 65536;
  const int n_shards = static_cast<int>((n + shard_size - 1) / shard_size);
  std::vector<long> hits(n_shards, 0);
  parallel_for(n_shards, threads, [&](int s) {
    Rng rng(shard_seed(seed, static_cast<uint64_t>(s)));
    const long lo = static_cast<long>(s) * shard_size;
    const long hi = std::min(n, lo + shard_size);
    Vec a(d);
    long h = 0;
    for (long i = lo; i < hi; ++i) {
      for (int j = 0; j < d; ++j) a[j] = rng.uniform(box.lo[j], box.hi[j]);
      if (dist(a) <= delta) ++h;
    }
    hits[s] = h;
  });

  TubeVolumeEstimate est;
  est.n = n;
  for (long h : hits) est.hits += h;
  est.volume = box_vol * static_cast<double>(est.hits) / n;
  const WilsonInterval w = wilson95(est.hits, n);
  est.ci_half = box_vol * w.half_width;
  return est;
}

TubeScalingFit fit_tube_scaling(const DistanceFn& dist, const std::vector<double>& deltas,
                                const std::function<Box(double)>& box_for_delta, long n_per_delta,
                                int expected_codim, uint64_t seed, int threads) {
  if (deltas.size() < 2) throw ConfigError("fit_tube_scaling: need at least two deltas");
  TubeScalingFit fit;
  fit.deltas = deltas;
  fit.expected_codim = expected_codim;
  fit.estimates.resize(deltas.size());
  for (size_t i = 0; i < deltas.size(); ++i) {
    fit.estimates[i] = tube_volume_mc(dist, deltas[i], box_for_delta(deltas[i]), n_per_delta,
                                      shard_seed(seed, 1000 + i), threads);
    if (fit.estimates[i].hits == 0)
      throw NumericalError("fit_tube_scaling: zero hits at delta = " +
                           std::to_string(deltas[i]) + "; increase n or shrink the grid");
  }
  // Ordinary least squares of log V on log delta.
  const size_t m = deltas.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double x = std::log(deltas[i]);
    const double y = std::log(fit.estimates[i].volume);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.log_c = (sy - fit.slope * sx) / m;
  fit.c_fit = std::exp(fit.log_c);
  fit.regime_violation = std::fabs(fit.slope - expected_codim) > 0.2;
  return fit;
}

}  // namespace halo
