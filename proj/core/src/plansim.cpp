#include "halolab/plansim.hpp"

#include <algorithm>
#include <cmath>

#include "halolab/errors.hpp"
#include "halolab/parallel.hpp"

namespace halo {

void PlannerConfig::validate() const {
  if (budget_q < 1) throw ConfigError("PlannerConfig: budget q must be >= 1");
  if (eps_fp < 0.0 || eps_fp > 1.0 || eps_fn < 0.0 || eps_fn > 1.0)
    throw ConfigError("PlannerConfig: verifier rates must lie in [0,1]");
}

PlannerOutcome run_planner(const PlannerConfig& cfg, Rng& rng) {
  const double c = 1.0 - cfg.eps_fn;
  for (int j = 1; j <= cfg.budget_q; ++j) {
    const double rho_j = cfg.schedule.rho(j);
    const bool valid = rng.uniform() < rho_j;
    const double accept_prob = valid ? c : cfg.eps_fp;
    if (rng.uniform() < accept_prob) return PlannerOutcome{true, j, valid};
  }
  return PlannerOutcome{false, 0, false};
}

ReliabilityReport estimate_reliability(const PlannerConfig& cfg, long trials, uint64_t seed,
                                       int threads) {
  cfg.validate();
  if (trials < 1) throw ConfigError("estimate_reliability: trials must be >= 1");

  const long shard_size = 4096;
  const int n_shards = static_cast<int>((trials + shard_size - 1) / shard_size);
  struct Tally {
    long h = 0, a = 0, s = 0;
    std::vector<long> accept_round;
  };
  std::vector<Tally> tallies(n_shards);
  parallel_for(n_shards, threads, [&](int sh) {
    Rng rng(shard_seed(seed, static_cast<uint64_t>(sh)));
    const long lo = static_cast<long>(sh) * shard_size;
    const long hi = std::min(trials, lo + shard_size);
    Tally& t = tallies[sh];
    t.accept_round.assign(cfg.budget_q, 0);
    for (long i = lo; i < hi; ++i) {
      const PlannerOutcome out = run_planner(cfg, rng);
      if (!out.accepted) {
        t.a += 1;
      } else {
        t.accept_round[out.round - 1] += 1;
        if (out.valid) {
          t.s += 1;
        } else {
          t.h += 1;
        }
      }
    }
  });

  ReliabilityReport rep;
  rep.trials = trials;
  rep.accept_round_hist.assign(cfg.budget_q, 0);
  for (const auto& t : tallies) {
    rep.h_count += t.h;
    rep.a_count += t.a;
    rep.s_count += t.s;
    for (int j = 0; j < cfg.budget_q; ++j) rep.accept_round_hist[j] += t.accept_round[j];
  }
  rep.h_hat = static_cast<double>(rep.h_count) / trials;
  rep.a_hat = static_cast<double>(rep.a_count) / trials;
  rep.s_hat = static_cast<double>(rep.s_count) / trials;
  rep.h_ci = wilson95(rep.h_count, trials);
  rep.a_ci = wilson95(rep.a_count, trials);
  rep.s_ci = wilson95(rep.s_count, trials);

  // Certified caps from the schedule (clamped values).
  const double c = 1.0 - cfg.eps_fn;
  rep.h_cap = cfg.budget_q * cfg.eps_fp;
  rep.rho.resize(cfg.budget_q);
  double log_prod = 0.0;
  bool zero = false;
  for (int j = 1; j <= cfg.budget_q; ++j) {
    rep.rho[j - 1] = cfg.schedule.rho(j);
    const double f = 1.0 - c * rep.rho[j - 1];
    if (f <= 0.0) {
      zero = true;
    } else {
      log_prod += std::log(f);
    }
  }
  rep.a_cap = zero ? 0.0 : std::exp(log_prod);
  rep.any_clamped = cfg.schedule.clamps_by(cfg.budget_q);
  return rep;
}

ScheduleComparison compare_schedules(double gamma, int horizon, double alpha, double beta,
                                     double eps_fp, double eps_fn,
                                     const std::vector<ScheduleSpec>& schedule_kinds,
                                     const std::vector<int>& q_grid, long trials, uint64_t seed,
                                     int threads) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("compare_schedules: gamma in (0,1)");
  if (schedule_kinds.empty() || q_grid.empty())
    throw ConfigError("compare_schedules: need at least one schedule and one q");

  ScheduleComparison cmp;
  cmp.gamma = gamma;
  cmp.horizon = horizon;
  cmp.alpha = alpha;
  cmp.beta = beta;

  const double rho1 = std::exp(horizon * std::log(gamma));
  uint64_t stream = 0;
  for (size_t si = 0; si < schedule_kinds.size(); ++si) {
    ScheduleSpec spec = schedule_kinds[si];
    spec.rho1 = rho1;  // all schedules share the horizon-barrier initial mass
    cmp.schedule_names.push_back(spec.name());
    int crossover = -1;
    for (int q : q_grid) {
      PlannerConfig cfg;
      cfg.budget_q = q;
      cfg.eps_fp = eps_fp;
      cfg.eps_fn = eps_fn;
      cfg.schedule = spec;
      const ReliabilityReport rep =
          estimate_reliability(cfg, trials, shard_seed(seed, stream++), threads);
      ScheduleComparisonRow row;
      row.schedule_name = spec.name();
      row.q = q;
      row.h_hat = rep.h_hat;
      row.a_hat = rep.a_hat;
      row.s_hat = rep.s_hat;
      row.h_cap = rep.h_cap;
      row.a_cap = rep.a_cap;
      row.meets_alpha_beta = rep.h_hat <= alpha && rep.a_hat <= beta;
      if (row.meets_alpha_beta && crossover < 0) crossover = q;
      cmp.rows.push_back(row);
    }
    cmp.crossover_q.push_back(crossover);
  }
  return cmp;
}

EliminationReport run_elimination_planner(const EliminationConfig& cfg, long trials,
                                          uint64_t seed, int threads) {
  if (cfg.library_size < 1 || cfg.valid_count < 0 || cfg.valid_count > cfg.library_size)
    throw ConfigError("run_elimination_planner: need 0 <= valid_count <= library_size >= 1");
  if (cfg.budget_q < 1) throw ConfigError("run_elimination_planner: budget q must be >= 1");
  if (trials < 1) throw ConfigError("run_elimination_planner: trials must be >= 1");

  const long shard_size = 1024;
  const int n_shards = static_cast<int>((trials + shard_size - 1) / shard_size);
  struct Tally {
    long h = 0, a = 0, s = 0;
    std::vector<long> reached, valid_prop;
  };
  std::vector<Tally> tallies(n_shards);
  parallel_for(n_shards, threads, [&](int sh) {
    Rng rng(shard_seed(seed, static_cast<uint64_t>(sh)));
    const long lo = static_cast<long>(sh) * shard_size;
    const long hi = std::min(trials, lo + shard_size);
    Tally& t = tallies[sh];
    t.reached.assign(cfg.budget_q, 0);
    t.valid_prop.assign(cfg.budget_q, 0);
    const double c = 1.0 - cfg.eps_fn;
    for (long i = lo; i < hi; ++i) {
      // Candidate pool: indices below valid_count are the valid plans.
      std::vector<long> pool(cfg.library_size);
      for (long k = 0; k < cfg.library_size; ++k) pool[k] = k;
      bool done = false;
      for (int j = 1; j <= cfg.budget_q && !pool.empty(); ++j) {
        t.reached[j - 1] += 1;
        const size_t pick = static_cast<size_t>(rng.below(pool.size()));
        const long idx = pool[pick];
        const bool valid = idx < cfg.valid_count;
        if (valid) t.valid_prop[j - 1] += 1;
        const double accept_prob = valid ? c : cfg.eps_fp;
        if (rng.uniform() < accept_prob) {
          if (valid) {
            t.s += 1;
          } else {
            t.h += 1;
          }
          done = true;
          break;
        }
        // Rejected: eliminate this index from further consideration.
        pool[pick] = pool.back();
        pool.pop_back();
      }
      if (!done) t.a += 1;
    }
  });

  EliminationReport rep;
  rep.trials = trials;
  rep.rho_hat.assign(cfg.budget_q, 0.0);
  rep.reached.assign(cfg.budget_q, 0);
  std::vector<long> valid_prop(cfg.budget_q, 0);
  long h = 0, a = 0, s = 0;
  for (const auto& t : tallies) {
    h += t.h;
    a += t.a;
    s += t.s;
    for (int j = 0; j < cfg.budget_q; ++j) {
      rep.reached[j] += t.reached[j];
      valid_prop[j] += t.valid_prop[j];
    }
  }
  rep.h_hat = static_cast<double>(h) / trials;
  rep.a_hat = static_cast<double>(a) / trials;
  rep.s_hat = static_cast<double>(s) / trials;
  for (int j = 0; j < cfg.budget_q; ++j)
    rep.rho_hat[j] = rep.reached[j] > 0
                         ? static_cast<double>(valid_prop[j]) / rep.reached[j]
                         : 0.0;
  return rep;
}

}  // namespace halo
