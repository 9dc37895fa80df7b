#include "halolab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "halolab/csvio.hpp"
#include "halolab/errors.hpp"
#include "halolab/parallel.hpp"

namespace halo {

using nlohmann::json;
namespace fs = std::filesystem;

std::string artifact_version() { return "0.1.0"; }

void apply_preset(const std::string& preset, TrainParams& train, EvalParams& eval) {
  if (preset == "desk") {
    train.hidden = 128;
    train.steps = 10000;
    train.batch = 512;
    eval.n = 100000;
  } else if (preset == "paper") {
    train.hidden = 256;
    train.steps = 100000;
    train.batch = 2048;
    eval.n = 1000000;
  } else {
    throw ConfigError("unknown preset '" + preset + "' (expected desk or paper)");
  }
}

FlowConfig make_flow_config(int action_dim, const TrainParams& tp) {
  FlowConfig c;
  c.mlp.action_dim = action_dim;
  c.mlp.embed_dim = tp.embed_dim;
  c.mlp.hidden = tp.hidden;
  c.mlp.depth = tp.depth;
  c.adamw.lr = tp.lr;
  c.adamw.weight_decay = tp.weight_decay;
  c.adamw.clip = tp.clip;
  c.sample_steps = tp.flow_steps;
  c.integrator = tp.integrator;
  c.ema_decay = tp.ema_decay;
  c.eval_use_ema = tp.flow_eval_use_ema;
  return c;
}

DiffusionConfig make_diffusion_config(int action_dim, const TrainParams& tp) {
  DiffusionConfig c;
  c.mlp.action_dim = action_dim;
  c.mlp.embed_dim = tp.embed_dim;
  c.mlp.hidden = tp.hidden;
  c.mlp.depth = tp.depth;
  c.adamw.lr = tp.lr;
  c.adamw.weight_decay = tp.weight_decay;
  c.adamw.clip = tp.clip;
  c.t_diff = tp.t_diff;
  c.ddim_steps = tp.ddim_steps;
  c.ema_decay = tp.ema_decay;
  c.eval_use_ema = tp.diffusion_eval_use_ema;
  return c;
}

TrainedFlow train_flow(const DataSampler& data, int action_dim, const TrainParams& tp,
                       uint64_t seed, long log_every) {
  TrainedFlow out{FlowHead(make_flow_config(action_dim, tp), mix64(seed ^ 1)), {}};
  Rng rng(mix64(seed ^ 2));
  for (long step = 0; step < tp.steps; ++step) {
    const double loss = out.head.train_step(data(tp.batch, rng), rng);
    if (step % log_every == 0 || step == tp.steps - 1) out.loss_curve.push_back(loss);
  }
  return out;
}

TrainedDiffusion train_diffusion(const DataSampler& data, int action_dim, const TrainParams& tp,
                                 uint64_t seed, long log_every) {
  TrainedDiffusion out{DiffusionHead(make_diffusion_config(action_dim, tp), mix64(seed ^ 1)), {}};
  Rng rng(mix64(seed ^ 2));
  for (long step = 0; step < tp.steps; ++step) {
    const double loss = out.head.train_step(data(tp.batch, rng), rng);
    if (step % log_every == 0 || step == tp.steps - 1) out.loss_curve.push_back(loss);
  }
  return out;
}

DataSampler band_data_sampler(const BandGeometry& geom) {
  return [geom](int n, Rng& rng) { return band_sample_training(geom, n, rng); };
}

DataSampler grasp_data_sampler(const GraspManifold& manifold, double noise_sigma) {
  return [manifold, noise_sigma](int n, Rng& rng) {
    return grasp_sample_training(manifold, noise_sigma, n, rng);
  };
}

// ---------------------------------------------------------------------------
// Topology experiment
// ---------------------------------------------------------------------------

namespace {

BandGeometry make_band(const TopologyConfig& cfg, int modes, double w) {
  BandGeometry geom;
  geom.modes = modes;
  geom.strip_halfwidth = cfg.strip_halfwidth;
  geom.gap_halfwidth = w;
  geom.x_min = cfg.x_min;
  geom.x_max = cfg.x_max;
  geom.y_max = BandGeometry::fitted_y_max(modes, cfg.strip_halfwidth, w);
  geom.validate();
  return geom;
}

struct CellKey {
  std::string head;
  int modes;
  double w;
  int seed_index;
};

void evaluate_topology_cell(const TopologyConfig& cfg, const BandGeometry& geom,
                            const BatchDecoder& decode, uint64_t cell_seed, int threads,
                            TopologyCell& cell) {
  std::atomic<long> band_hits{0};
  Classifier classify = [&geom, &band_hits](const Vec& a) {
    if (a[0] >= geom.x_min && a[0] <= geom.x_max && std::fabs(a[1]) <= geom.y_max)
      band_hits.fetch_add(1, std::memory_order_relaxed);
    return band_classify(geom, a);
  };
  cell.report = estimate_hallucination(decode, classify, 2, geom.modes, cfg.eval.n,
                                       cfg.eval.batch, mix64(cell_seed ^ 0xE1), threads);
  cell.band_mass = static_cast<double>(band_hits.load()) / cfg.eval.n;
  cell.safe_mass = 1.0 - cell.report.h_hat;
  cell.min_mode_mass = *std::min_element(cell.report.mode_mass.begin(),
                                         cell.report.mode_mass.end());
  cell.lipschitz =
      estimate_lipschitz(decode, 2, mix64(cell_seed ^ 0xE2), cfg.eval.lipschitz_radius,
                         cfg.eval.lipschitz_probes, cfg.eval.lipschitz_h, threads);
}

}  // namespace

std::vector<std::pair<std::string, std::vector<double>>> TopologyResult::h_vs_m() const {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (const std::string head : {"flow", "diffusion"}) {
    std::vector<double> means;
    for (int m : config.m_list) {
      double sum = 0.0;
      int count = 0;
      for (const auto& cell : cells) {
        if (cell.head == head && cell.modes == m && cell.gap_halfwidth == config.sweep_w &&
            !cell.failed) {
          sum += cell.report.h_hat;
          count += 1;
        }
      }
      if (count > 0) means.push_back(sum / count);
    }
    if (!means.empty()) out.emplace_back(head, means);
  }
  return out;
}

TopologyResult run_topology_experiment(const TopologyConfig& cfg, uint64_t root_seed, int threads,
                                       const std::string& out_dir, bool dry_run) {
  TopologyResult result;
  result.config = cfg;

  std::vector<std::string> heads;
  if (cfg.run_flow) heads.push_back("flow");
  if (cfg.run_diffusion) heads.push_back("diffusion");
  if (heads.empty()) throw ConfigError("topology: enable at least one head type");
  if (cfg.seeds < 1) throw ConfigError("topology: seeds must be >= 1");

  // Sweep cells (M x sweep_w) plus M=2 ratio cells, deduplicated.
  std::vector<std::pair<int, double>> cell_geoms;
  std::set<std::pair<int, long long>> seen;
  auto add_cell = [&](int m, double w) {
    const auto key = std::make_pair(m, static_cast<long long>(std::llround(w * 1e12)));
    if (seen.insert(key).second) cell_geoms.emplace_back(m, w);
  };
  for (int m : cfg.m_list) add_cell(m, cfg.sweep_w);
  for (double w : cfg.ratio_w_list) add_cell(2, w);

  std::vector<CellKey> keys;
  for (const auto& head : heads)
    for (const auto& [m, w] : cell_geoms)
      for (int s = 0; s < cfg.seeds; ++s) keys.push_back(CellKey{head, m, w, s});

  if (dry_run) return result;

  result.cells.resize(keys.size());
  const int inner_threads = std::max(1, threads / static_cast<int>(keys.size()));
  parallel_for(static_cast<int>(keys.size()), threads, [&](int idx) {
    const CellKey& key = keys[idx];
    TopologyCell& cell = result.cells[idx];
    cell.head = key.head;
    cell.modes = key.modes;
    cell.gap_halfwidth = key.w;
    cell.seed_index = key.seed_index;
    cell.seed = shard_seed(root_seed, static_cast<uint64_t>(idx));
    try {
      const BandGeometry geom = make_band(cfg, key.modes, key.w);
      const DataSampler data = band_data_sampler(geom);
      if (key.head == "flow") {
        TrainedFlow tf = train_flow(data, 2, cfg.train, cell.seed);
        const FlowHead& head = tf.head;
        BatchDecoder decode = [&head](const std::vector<Vec>& zs) {
          return head.sample_batch(zs);
        };
        evaluate_topology_cell(cfg, geom, decode, cell.seed, inner_threads, cell);
      } else {
        TrainedDiffusion td = train_diffusion(data, 2, cfg.train, cell.seed);
        const DiffusionHead& head = td.head;
        BatchDecoder decode = [&head](const std::vector<Vec>& zs) {
          return head.sample_batch(zs);
        };
        evaluate_topology_cell(cfg, geom, decode, cell.seed, inner_threads, cell);
      }
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
  });

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    {
      CsvWriter cells_csv(out_dir + "/topology_cells.csv",
                          {"head", "M", "W", "seed", "H_hat", "ci_lo", "ci_hi", "safe_mass",
                           "band_mass", "min_mode_mass", "L_hat", "W_over_L", "failed"});
      for (const auto& c : result.cells) {
        if (c.failed) {
          cells_csv.row(c.head, static_cast<long>(c.modes), c.gap_halfwidth,
                        static_cast<long>(c.seed_index), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                        std::string("1"));
          continue;
        }
        cells_csv.row(c.head, static_cast<long>(c.modes), c.gap_halfwidth,
                      static_cast<long>(c.seed_index), c.report.h_hat, c.report.h_ci.lo,
                      c.report.h_ci.hi, c.safe_mass, c.band_mass, c.min_mode_mass,
                      c.lipschitz.l_hat, c.gap_halfwidth / c.lipschitz.l_hat, std::string("0"));
      }
    }
    {
      CsvWriter modes_csv(out_dir + "/topology_modes.csv", {"head", "M", "W", "seed", "mode", "mass"});
      for (const auto& c : result.cells) {
        if (c.failed) continue;
        for (size_t m = 0; m < c.report.mode_mass.size(); ++m)
          modes_csv.row(c.head, static_cast<long>(c.modes), c.gap_halfwidth,
                        static_cast<long>(c.seed_index), static_cast<long>(m),
                        c.report.mode_mass[m]);
      }
    }
    {
      CsvWriter hm_csv(out_dir + "/topology_h_vs_m.csv", {"head", "M", "W", "H_mean", "n_seeds"});
      for (const auto& head : heads) {
        for (int m : cfg.m_list) {
          double sum = 0.0;
          long count = 0;
          for (const auto& c : result.cells)
            if (c.head == head && c.modes == m && c.gap_halfwidth == cfg.sweep_w && !c.failed) {
              sum += c.report.h_hat;
              count += 1;
            }
          if (count > 0) hm_csv.row(head, static_cast<long>(m), cfg.sweep_w, sum / count, count);
        }
      }
    }
    {
      CsvWriter hr_csv(out_dir + "/topology_h_vs_ratio.csv",
                       {"head", "W", "ratio_mean", "H_mean", "n_seeds"});
      for (const auto& head : heads) {
        for (double w : cfg.ratio_w_list) {
          double hsum = 0.0, rsum = 0.0;
          long count = 0;
          for (const auto& c : result.cells)
            if (c.head == head && c.modes == 2 && c.gap_halfwidth == w && !c.failed) {
              hsum += c.report.h_hat;
              rsum += w / c.lipschitz.l_hat;
              count += 1;
            }
          if (count > 0) hr_csv.row(head, w, rsum / count, hsum / count, count);
        }
      }
    }
    if (cfg.emit_seam_map) {
      // One seam map per head from the first M=2 cell's first seed.
      for (const auto& head_name : heads) {
        const TopologyCell* chosen = nullptr;
        for (const auto& c : result.cells)
          if (c.head == head_name && c.modes == 2 && c.seed_index == 0 && !c.failed) {
            chosen = &c;
            break;
          }
        if (!chosen) continue;
        const BandGeometry geom = make_band(cfg, chosen->modes, chosen->gap_halfwidth);
        const DataSampler data = band_data_sampler(geom);
        std::vector<SeamPoint> pts;
        if (head_name == "flow") {
          TrainedFlow tf = train_flow(data, 2, cfg.train, chosen->seed);
          pts = seam_map([&](const std::vector<Vec>& zs) { return tf.head.sample_batch(zs); },
                         [&](const Vec& a) { return band_classify(geom, a); }, cfg.seam_grid);
        } else {
          TrainedDiffusion td = train_diffusion(data, 2, cfg.train, chosen->seed);
          pts = seam_map([&](const std::vector<Vec>& zs) { return td.head.sample_batch(zs); },
                         [&](const Vec& a) { return band_classify(geom, a); }, cfg.seam_grid);
        }
        CsvWriter seam_csv(out_dir + "/seam_" + head_name + ".csv",
                           {"zx", "zy", "ax", "ay", "class"});
        for (const auto& p : pts)
          seam_csv.row(p.zx, p.zy, p.ax, p.ay, static_cast<long>(p.cls.safe ? p.cls.mode : -1));
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Precision experiment
// ---------------------------------------------------------------------------

PrecisionResult run_precision_experiment(const PrecisionConfig& cfg, uint64_t root_seed,
                                         int threads, const std::string& out_dir, bool dry_run) {
  PrecisionResult result;
  result.config = cfg;
  cfg.manifold.validate();

  if (dry_run) return result;

  const DistanceOracle dist = [&cfg](const Vec& a) {
    const GraspProjection p = grasp_project(cfg.manifold, a);
    return DistanceSample{p.distance, p.degenerate};
  };

  if (cfg.run_noise_oracle) {
    Rng rng(mix64(root_seed ^ 0xA11CE));
    const std::vector<Vec> samples =
        grasp_sample_training(cfg.manifold, cfg.noise_sigma, cfg.eval.n, rng);
    result.oracle_curve =
        distance_curve(samples, dist, cfg.delta_min, cfg.delta_max, cfg.delta_points);
  }

  std::vector<std::string> heads;
  if (cfg.run_flow) heads.push_back("flow");
  if (cfg.run_diffusion) heads.push_back("diffusion");

  struct RunKey {
    std::string head;
    int seed_index;
  };
  std::vector<RunKey> keys;
  for (const auto& h : heads)
    for (int s = 0; s < cfg.seeds; ++s) keys.push_back(RunKey{h, s});

  result.runs.resize(keys.size());
  parallel_for(static_cast<int>(keys.size()), threads, [&](int idx) {
    const RunKey& key = keys[idx];
    PrecisionHeadRun& run = result.runs[idx];
    run.head = key.head;
    run.seed_index = key.seed_index;
    run.seed = shard_seed(root_seed, static_cast<uint64_t>(idx));
    run.k_grid = cfg.k_grid;
    try {
      const DataSampler data = grasp_data_sampler(cfg.manifold, cfg.noise_sigma);
      const int d = GraspManifold::ambient_dim;

      auto eval_with = [&](SteppedSampler& sampler, const std::function<void(int)>& set_steps,
                           const std::function<std::vector<Vec>(const std::vector<Vec>&)>& decode) {
        // Distance curve from eval.n decoded samples.
        Rng zrng(mix64(run.seed ^ 0xE1));
        std::vector<Vec> latents(cfg.eval.n, Vec(d));
        for (auto& z : latents)
          for (double& v : z) v = zrng.normal();
        std::vector<Vec> actions;
        actions.reserve(latents.size());
        const long bs = cfg.eval.batch;
        for (size_t lo = 0; lo < latents.size(); lo += bs) {
          const size_t hi = std::min(latents.size(), lo + bs);
          std::vector<Vec> chunk(latents.begin() + lo, latents.begin() + hi);
          std::vector<Vec> dec = decode(chunk);
          actions.insert(actions.end(), dec.begin(), dec.end());
        }
        run.curve = distance_curve(actions, dist, cfg.delta_min, cfg.delta_max, cfg.delta_points);

        // Jacobian chains along seeded trajectories for every K in the grid.
        for (int k_steps : cfg.k_grid) {
          set_steps(k_steps);
          Rng crng(mix64(run.seed ^ 0xC4));
          double geo_sum = 0.0, global_sum = 0.0;
          for (int t = 0; t < cfg.chain_trajectories; ++t) {
            Vec z(d);
            for (double& v : z) v = crng.normal();
            const JacobianChainReport rep = jacobian_chain(sampler, z, cfg.chain_h);
            geo_sum += rep.geomean_sigma_min;
            global_sum += rep.global_sigma_min;
          }
          run.chain_geomean.push_back(geo_sum / cfg.chain_trajectories);
          run.chain_global_smin.push_back(global_sum / cfg.chain_trajectories);
        }
      };

      if (key.head == "flow") {
        TrainedFlow tf = train_flow(data, d, cfg.train, run.seed);
        eval_with(tf.head, [&](int k) { tf.head.set_sample_steps(k); },
                  [&](const std::vector<Vec>& zs) { return tf.head.sample_batch(zs); });
      } else {
        TrainedDiffusion td = train_diffusion(data, d, cfg.train, run.seed);
        eval_with(td.head, [&](int k) { td.head.set_ddim_steps(k); },
                  [&](const std::vector<Vec>& zs) { return td.head.sample_batch(zs); });
      }
    } catch (const std::exception& e) {
      run.failed = true;
      run.error = e.what();
    }
  });

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto write_curve = [](const std::string& path, const DistanceCurve& curve) {
      CsvWriter csv(path, {"delta", "H_hat", "ci_lo", "ci_hi"});
      for (size_t i = 0; i < curve.deltas.size(); ++i)
        csv.row(curve.deltas[i], curve.h_hat[i], curve.ci[i].lo, curve.ci[i].hi);
    };
    if (result.oracle_curve) write_curve(out_dir + "/precision_oracle_curve.csv", *result.oracle_curve);
    for (const auto& run : result.runs) {
      if (run.failed) continue;
      write_curve(out_dir + "/precision_curve_" + run.head + "_s" +
                      std::to_string(run.seed_index) + ".csv",
                  run.curve);
    }
    {
      CsvWriter chains(out_dir + "/precision_chains.csv",
                       {"head", "seed", "K", "geomean_sigma_min", "global_sigma_min"});
      for (const auto& run : result.runs) {
        if (run.failed) continue;
        for (size_t i = 0; i < run.k_grid.size(); ++i)
          chains.row(run.head, static_cast<long>(run.seed_index),
                     static_cast<long>(run.k_grid[i]), run.chain_geomean[i],
                     run.chain_global_smin[i]);
      }
    }
    {
      CsvWriter dist_csv(out_dir + "/precision_distances.csv",
                         {"head", "seed", "min", "q25", "med", "q75", "q95", "max", "degenerate"});
      for (const auto& run : result.runs) {
        if (run.failed) continue;
        dist_csv.row(run.head, static_cast<long>(run.seed_index), run.curve.d_min, run.curve.d_q25,
                     run.curve.d_med, run.curve.d_q75, run.curve.d_q95, run.curve.d_max,
                     run.curve.degenerate_count);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Planner simulation
// ---------------------------------------------------------------------------

ScheduleComparison run_plansim_experiment(const PlansimConfig& cfg, uint64_t root_seed,
                                          int threads, const std::string& out_dir) {
  if (cfg.schedules.empty()) throw ConfigError("plansim: need at least one schedule");
  if (cfg.q_grid.empty()) throw ConfigError("plansim: need a nonempty q grid");
  const ScheduleComparison cmp =
      compare_schedules(cfg.gamma, cfg.horizon, cfg.alpha, cfg.beta, cfg.eps_fp, cfg.eps_fn,
                        cfg.schedules, cfg.q_grid, cfg.trials, root_seed, threads);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    CsvWriter csv(out_dir + "/plansim_compare.csv",
                  {"schedule", "q", "H_hat", "A_hat", "S_hat", "H_cap", "A_cap",
                   "meets_alpha_beta"});
    for (const auto& row : cmp.rows)
      csv.row(row.schedule_name, static_cast<long>(row.q), row.h_hat, row.a_hat, row.s_hat,
              row.h_cap, row.a_cap, std::string(row.meets_alpha_beta ? "1" : "0"));
  }
  return cmp;
}

// ---------------------------------------------------------------------------
// Config serialization
// ---------------------------------------------------------------------------

namespace {

json train_to_json(const TrainParams& t) {
  return json{{"hidden", t.hidden},
              {"depth", t.depth},
              {"embed_dim", t.embed_dim},
              {"steps", t.steps},
              {"batch", t.batch},
              {"lr", t.lr},
              {"weight_decay", t.weight_decay},
              {"clip", t.clip},
              {"ema_decay", t.ema_decay},
              {"flow_steps", t.flow_steps},
              {"integrator", t.integrator == Integrator::Euler ? "euler" : "heun"},
              {"t_diff", t.t_diff},
              {"ddim_steps", t.ddim_steps},
              {"flow_eval_use_ema", t.flow_eval_use_ema},
              {"diffusion_eval_use_ema", t.diffusion_eval_use_ema}};
}

void check_known_keys(const json& j, const std::vector<std::string>& known,
                      const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
  }
}

TrainParams train_from_json(const json& j, const TrainParams& base) {
  check_known_keys(j,
                   {"hidden", "depth", "embed_dim", "steps", "batch", "lr", "weight_decay",
                    "clip", "ema_decay", "flow_steps", "integrator", "t_diff", "ddim_steps",
                    "flow_eval_use_ema", "diffusion_eval_use_ema"},
                   "train");
  TrainParams t = base;
  t.hidden = j.value("hidden", base.hidden);
  t.depth = j.value("depth", base.depth);
  t.embed_dim = j.value("embed_dim", base.embed_dim);
  t.steps = j.value("steps", base.steps);
  t.batch = j.value("batch", base.batch);
  t.lr = j.value("lr", base.lr);
  t.weight_decay = j.value("weight_decay", base.weight_decay);
  t.clip = j.value("clip", base.clip);
  t.ema_decay = j.value("ema_decay", base.ema_decay);
  t.flow_steps = j.value("flow_steps", base.flow_steps);
  if (j.contains("integrator")) {
    const std::string integ = j.at("integrator").get<std::string>();
    if (integ == "euler")
      t.integrator = Integrator::Euler;
    else if (integ == "heun")
      t.integrator = Integrator::Heun;
    else
      throw ConfigError("config: unknown integrator '" + integ + "'");
  }
  t.t_diff = j.value("t_diff", base.t_diff);
  t.ddim_steps = j.value("ddim_steps", base.ddim_steps);
  t.flow_eval_use_ema = j.value("flow_eval_use_ema", base.flow_eval_use_ema);
  t.diffusion_eval_use_ema = j.value("diffusion_eval_use_ema", base.diffusion_eval_use_ema);
  return t;
}

json eval_to_json(const EvalParams& e) {
  return json{{"n", e.n},
              {"batch", e.batch},
              {"lipschitz_probes", e.lipschitz_probes},
              {"lipschitz_radius", e.lipschitz_radius},
              {"lipschitz_h", e.lipschitz_h}};
}

EvalParams eval_from_json(const json& j, const EvalParams& base) {
  check_known_keys(j, {"n", "batch", "lipschitz_probes", "lipschitz_radius", "lipschitz_h"},
                   "eval");
  EvalParams e = base;
  e.n = j.value("n", base.n);
  e.batch = j.value("batch", base.batch);
  e.lipschitz_probes = j.value("lipschitz_probes", base.lipschitz_probes);
  e.lipschitz_radius = j.value("lipschitz_radius", base.lipschitz_radius);
  e.lipschitz_h = j.value("lipschitz_h", base.lipschitz_h);
  return e;
}

json schedule_to_json(const ScheduleSpec& s) {
  std::string kind;
  switch (s.kind) {
    case ScheduleSpec::Kind::Constant: kind = "constant"; break;
    case ScheduleSpec::Kind::Polynomial: kind = "polynomial"; break;
    case ScheduleSpec::Kind::Geometric: kind = "geometric"; break;
  }
  return json{{"kind", kind}, {"rho1", s.rho1}, {"param", s.param}};
}

ScheduleSpec schedule_from_json(const json& j) {
  check_known_keys(j, {"kind", "rho1", "param"}, "schedule");
  if (!j.contains("kind")) throw ConfigError("config: missing required field 'kind' in schedule");
  ScheduleSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    s.kind = ScheduleSpec::Kind::Constant;
  else if (kind == "polynomial")
    s.kind = ScheduleSpec::Kind::Polynomial;
  else if (kind == "geometric")
    s.kind = ScheduleSpec::Kind::Geometric;
  else
    throw ConfigError("config: unknown schedule kind '" + kind + "'");
  s.rho1 = j.value("rho1", 0.0);
  s.param = j.value("param", 0.0);
  return s;
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string topology_config_to_json(const TopologyConfig& cfg) {
  json j{{"m_list", cfg.m_list},
         {"sweep_w", cfg.sweep_w},
         {"ratio_w_list", cfg.ratio_w_list},
         {"strip_halfwidth", cfg.strip_halfwidth},
         {"x_min", cfg.x_min},
         {"x_max", cfg.x_max},
         {"seeds", cfg.seeds},
         {"run_flow", cfg.run_flow},
         {"run_diffusion", cfg.run_diffusion},
         {"train", train_to_json(cfg.train)},
         {"eval", eval_to_json(cfg.eval)},
         {"emit_seam_map", cfg.emit_seam_map},
         {"seam_grid", json{{"z_min", cfg.seam_grid.z_min},
                            {"z_max", cfg.seam_grid.z_max},
                            {"nx", cfg.seam_grid.nx},
                            {"ny", cfg.seam_grid.ny}}}};
  return j.dump(1);
}

TopologyConfig topology_config_from_json(const std::string& text, const TopologyConfig& base) {
  const json j = parse_config_text(text);
  check_known_keys(j,
                   {"m_list", "sweep_w", "ratio_w_list", "strip_halfwidth", "x_min", "x_max",
                    "seeds", "run_flow", "run_diffusion", "train", "eval", "emit_seam_map",
                    "seam_grid"},
                   "topology config");
  TopologyConfig cfg = base;
  cfg.m_list = j.value("m_list", base.m_list);
  cfg.sweep_w = j.value("sweep_w", base.sweep_w);
  cfg.ratio_w_list = j.value("ratio_w_list", base.ratio_w_list);
  cfg.strip_halfwidth = j.value("strip_halfwidth", base.strip_halfwidth);
  cfg.x_min = j.value("x_min", base.x_min);
  cfg.x_max = j.value("x_max", base.x_max);
  cfg.seeds = j.value("seeds", base.seeds);
  cfg.run_flow = j.value("run_flow", base.run_flow);
  cfg.run_diffusion = j.value("run_diffusion", base.run_diffusion);
  if (j.contains("train")) cfg.train = train_from_json(j.at("train"), base.train);
  if (j.contains("eval")) cfg.eval = eval_from_json(j.at("eval"), base.eval);
  cfg.emit_seam_map = j.value("emit_seam_map", base.emit_seam_map);
  if (j.contains("seam_grid")) {
    const json& g = j.at("seam_grid");
    check_known_keys(g, {"z_min", "z_max", "nx", "ny"}, "seam_grid");
    cfg.seam_grid.z_min = g.value("z_min", base.seam_grid.z_min);
    cfg.seam_grid.z_max = g.value("z_max", base.seam_grid.z_max);
    cfg.seam_grid.nx = g.value("nx", base.seam_grid.nx);
    cfg.seam_grid.ny = g.value("ny", base.seam_grid.ny);
  }
  return cfg;
}

std::string precision_config_to_json(const PrecisionConfig& cfg) {
  json j{{"manifold", json{{"ring_radius", cfg.manifold.ring_radius},
                           {"h_min", cfg.manifold.h_min},
                           {"h_max", cfg.manifold.h_max}}},
         {"noise_sigma", cfg.noise_sigma},
         {"seeds", cfg.seeds},
         {"run_flow", cfg.run_flow},
         {"run_diffusion", cfg.run_diffusion},
         {"train", train_to_json(cfg.train)},
         {"eval", eval_to_json(cfg.eval)},
         {"delta_min", cfg.delta_min},
         {"delta_max", cfg.delta_max},
         {"delta_points", cfg.delta_points},
         {"k_grid", cfg.k_grid},
         {"chain_trajectories", cfg.chain_trajectories},
         {"chain_h", cfg.chain_h},
         {"run_noise_oracle", cfg.run_noise_oracle}};
  return j.dump(1);
}

PrecisionConfig precision_config_from_json(const std::string& text, const PrecisionConfig& base) {
  const json j = parse_config_text(text);
  check_known_keys(j,
                   {"manifold", "noise_sigma", "seeds", "run_flow", "run_diffusion", "train",
                    "eval", "delta_min", "delta_max", "delta_points", "k_grid",
                    "chain_trajectories", "chain_h", "run_noise_oracle"},
                   "precision config");
  PrecisionConfig cfg = base;
  if (j.contains("manifold")) {
    const json& m = j.at("manifold");
    check_known_keys(m, {"ring_radius", "h_min", "h_max"}, "manifold");
    cfg.manifold.ring_radius = m.value("ring_radius", base.manifold.ring_radius);
    cfg.manifold.h_min = m.value("h_min", base.manifold.h_min);
    cfg.manifold.h_max = m.value("h_max", base.manifold.h_max);
  }
  cfg.noise_sigma = j.value("noise_sigma", base.noise_sigma);
  cfg.seeds = j.value("seeds", base.seeds);
  cfg.run_flow = j.value("run_flow", base.run_flow);
  cfg.run_diffusion = j.value("run_diffusion", base.run_diffusion);
  if (j.contains("train")) cfg.train = train_from_json(j.at("train"), base.train);
  if (j.contains("eval")) cfg.eval = eval_from_json(j.at("eval"), base.eval);
  cfg.delta_min = j.value("delta_min", base.delta_min);
  cfg.delta_max = j.value("delta_max", base.delta_max);
  cfg.delta_points = j.value("delta_points", base.delta_points);
  cfg.k_grid = j.value("k_grid", base.k_grid);
  cfg.chain_trajectories = j.value("chain_trajectories", base.chain_trajectories);
  cfg.chain_h = j.value("chain_h", base.chain_h);
  cfg.run_noise_oracle = j.value("run_noise_oracle", base.run_noise_oracle);
  return cfg;
}

std::string plansim_config_to_json(const PlansimConfig& cfg) {
  json scheds = json::array();
  for (const auto& s : cfg.schedules) scheds.push_back(schedule_to_json(s));
  json j{{"gamma", cfg.gamma},   {"horizon", cfg.horizon}, {"alpha", cfg.alpha},
         {"beta", cfg.beta},     {"eps_fp", cfg.eps_fp},   {"eps_fn", cfg.eps_fn},
         {"schedules", scheds},  {"q_grid", cfg.q_grid},   {"trials", cfg.trials}};
  return j.dump(1);
}

PlansimConfig plansim_config_from_json(const std::string& text, const PlansimConfig& base) {
  const json j = parse_config_text(text);
  check_known_keys(j,
                   {"gamma", "horizon", "alpha", "beta", "eps_fp", "eps_fn", "schedules",
                    "q_grid", "trials"},
                   "plansim config");
  PlansimConfig cfg = base;
  cfg.gamma = j.value("gamma", base.gamma);
  cfg.horizon = j.value("horizon", base.horizon);
  cfg.alpha = j.value("alpha", base.alpha);
  cfg.beta = j.value("beta", base.beta);
  cfg.eps_fp = j.value("eps_fp", base.eps_fp);
  cfg.eps_fn = j.value("eps_fn", base.eps_fn);
  if (j.contains("schedules")) {
    cfg.schedules.clear();
    for (const auto& s : j.at("schedules")) cfg.schedules.push_back(schedule_from_json(s));
  }
  cfg.q_grid = j.value("q_grid", base.q_grid);
  cfg.trials = j.value("trials", base.trials);
  return cfg;
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
  fs::create_directories(out_dir);
  json j;
  j["command"] = manifest.command;
  j["artifact_version"] = manifest.version;
  j["root_seed"] = manifest.root_seed;
  j["threads"] = manifest.threads;
  j["dry_run"] = manifest.dry_run;
  j["wall_clock_sec"] = manifest.wall_clock_sec;
  if (!manifest.config_json.empty()) j["config"] = json::parse(manifest.config_json);
  json seeds = json::object();
  for (const auto& [stage, seed] : manifest.stage_seeds) seeds[stage] = seed;
  j["stage_seeds"] = seeds;
  json outputs = json::array();
  for (const auto& rel : manifest.output_files) {
    const std::string full = out_dir + "/" + rel;
    outputs.push_back(json{{"path", rel}, {"fnv1a64", fnv1a64_file(full)}});
  }
  j["outputs"] = outputs;
  j["failed_cells"] = manifest.failed_cells;
  write_text_file(out_dir + "/manifest.json", j.dump(1) + "\n");
}

}  // namespace halo
