#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halolab/band_env.hpp"
#include "halolab/chain_env.hpp"
#include "halolab/diffusion_head.hpp"
#include "halolab/flow_head.hpp"
#include "halolab/grasp_env.hpp"
#include "halolab/metrics.hpp"
#include "halolab/plansim.hpp"

namespace halo {

// ---------------------------------------------------------------------------
// Presets and training
// ---------------------------------------------------------------------------

struct TrainParams {
  int hidden = 128;
  int depth = 4;
  int embed_dim = 64;
  long steps = 10000;
  int batch = 512;
  double lr = 2e-4;
  double weight_decay = 1e-4;
  double clip = 1.0;
  double ema_decay = 0.999;
  // samplers
  int flow_steps = 50;
  Integrator integrator = Integrator::Euler;
  int t_diff = 200;
  int ddim_steps = 50;
  bool flow_eval_use_ema = false;
  bool diffusion_eval_use_ema = true;

  bool operator==(const TrainParams&) const = default;
};

struct EvalParams {
  long n = 100000;
  int batch = 4096;
  long lipschitz_probes = 2048;
  double lipschitz_radius = 3.0;
  double lipschitz_h = 0.01;

  bool operator==(const EvalParams&) const = default;
};

// desk: hidden 128, 10k steps, batch 512, 1e5 eval samples.
// paper: hidden 256, 100k steps, batch 2048, 1e6 eval samples.
void apply_preset(const std::string& preset, TrainParams& train, EvalParams& eval);

using DataSampler = std::function<std::vector<Vec>(int n, Rng& rng)>;

struct TrainedFlow {
  FlowHead head;
  std::vector<double> loss_curve;  // sampled every log_every steps
};
struct TrainedDiffusion {
  DiffusionHead head;
  std::vector<double> loss_curve;
};

FlowConfig make_flow_config(int action_dim, const TrainParams& tp);
DiffusionConfig make_diffusion_config(int action_dim, const TrainParams& tp);

// Seed discipline: init uses mix64(seed ^ 1), batch draws use mix64(seed ^ 2).
TrainedFlow train_flow(const DataSampler& data, int action_dim, const TrainParams& tp,
                       uint64_t seed, long log_every = 1000);
TrainedDiffusion train_diffusion(const DataSampler& data, int action_dim, const TrainParams& tp,
                                 uint64_t seed, long log_every = 1000);

DataSampler band_data_sampler(const BandGeometry& geom);
DataSampler grasp_data_sampler(const GraspManifold& manifold, double noise_sigma);

// ---------------------------------------------------------------------------
// Topology experiment (band)
// ---------------------------------------------------------------------------

struct TopologyConfig {
  std::vector<int> m_list{2, 3, 4, 5};
  double sweep_w = 0.25;                          // fixed W for the H-vs-M sweep
  std::vector<double> ratio_w_list{0.1, 0.25, 0.5};  // M = 2 cells for the H-vs-W/L table
  double strip_halfwidth = 0.5;
  double x_min = -1.0;
  double x_max = 1.0;
  int seeds = 3;
  bool run_flow = true;
  bool run_diffusion = true;
  TrainParams train;
  EvalParams eval;
  bool emit_seam_map = true;
  SeamGridSpec seam_grid;

  bool operator==(const TopologyConfig&) const = default;
};

struct TopologyCell {
  std::string head;  // "flow" | "diffusion"
  int modes = 0;
  double gap_halfwidth = 0.0;
  int seed_index = 0;
  uint64_t seed = 0;
  bool failed = false;
  std::string error;
  HallucinationReport report;
  LipschitzEstimate lipschitz;
  double safe_mass = 0.0;  // 1 - H
  double band_mass = 0.0;  // inside the x-range and |y| <= y_max, gaps included
  double min_mode_mass = 0.0;
};

struct TopologyResult {
  TopologyConfig config;
  std::vector<TopologyCell> cells;

  // 3-seed mean H over the sweep cells, one entry per (head, M), in m_list order.
  std::vector<std::pair<std::string, std::vector<double>>> h_vs_m() const;
};

TopologyResult run_topology_experiment(const TopologyConfig& cfg, uint64_t root_seed, int threads,
                                       const std::string& out_dir = "", bool dry_run = false);

// ---------------------------------------------------------------------------
// Precision experiment (grasp manifold)
// ---------------------------------------------------------------------------

struct PrecisionConfig {
  GraspManifold manifold;
  double noise_sigma = 0.01;
  int seeds = 3;
  bool run_flow = true;
  bool run_diffusion = true;
  TrainParams train;
  EvalParams eval;
  double delta_min = 1e-3;
  double delta_max = 1e-1;
  int delta_points = 25;
  std::vector<int> k_grid{5, 10, 20, 50};
  int chain_trajectories = 8;
  double chain_h = 0.01;
  bool run_noise_oracle = true;

  bool operator==(const PrecisionConfig&) const = default;
};

struct PrecisionHeadRun {
  std::string head;
  int seed_index = 0;
  uint64_t seed = 0;
  bool failed = false;
  std::string error;
  DistanceCurve curve;
  std::vector<int> k_grid;
  std::vector<double> chain_geomean;       // per K, averaged over trajectories
  std::vector<double> chain_global_smin;   // per K, averaged over trajectories
};

struct PrecisionResult {
  PrecisionConfig config;
  std::optional<DistanceCurve> oracle_curve;  // noisy-manifold baseline, no training
  std::vector<PrecisionHeadRun> runs;
};

PrecisionResult run_precision_experiment(const PrecisionConfig& cfg, uint64_t root_seed,
                                         int threads, const std::string& out_dir = "",
                                         bool dry_run = false);

// ---------------------------------------------------------------------------
// Planner simulation experiment
// ---------------------------------------------------------------------------

struct PlansimConfig {
  double gamma = 0.8;
  int horizon = 20;
  double alpha = 0.1;
  double beta = 0.05;
  double eps_fp = 0.001;
  double eps_fn = 0.0;
  std::vector<ScheduleSpec> schedules;  // rho1 overwritten with gamma^T
  std::vector<int> q_grid;
  long trials = 10000;

  bool operator==(const PlansimConfig&) const = default;
};

ScheduleComparison run_plansim_experiment(const PlansimConfig& cfg, uint64_t root_seed,
                                          int threads, const std::string& out_dir = "");

// ---------------------------------------------------------------------------
// Config serialization (lossless round trips) and manifests
// ---------------------------------------------------------------------------

// Parsing merges over `base`: absent fields keep the base (preset) defaults,
// so a full serialize -> parse round trip is lossless and partial configs are
// legal. Unknown keys are rejected with the offending name.
std::string topology_config_to_json(const TopologyConfig& cfg);
TopologyConfig topology_config_from_json(const std::string& text,
                                         const TopologyConfig& base = TopologyConfig{});
std::string precision_config_to_json(const PrecisionConfig& cfg);
PrecisionConfig precision_config_from_json(const std::string& text,
                                           const PrecisionConfig& base = PrecisionConfig{});
std::string plansim_config_to_json(const PlansimConfig& cfg);
PlansimConfig plansim_config_from_json(const std::string& text,
                                       const PlansimConfig& base = PlansimConfig{});

struct RunManifest {
  std::string command;
  std::string version;
  std::string config_json;  // echo of the parsed config
  uint64_t root_seed = 0;
  int threads = 1;
  bool dry_run = false;
  double wall_clock_sec = 0.0;
  std::vector<std::pair<std::string, uint64_t>> stage_seeds;
  std::vector<std::string> output_files;  // paths relative to the manifest
  std::vector<std::string> failed_cells;
};

// Writes manifest.json (with per-file FNV-1a checksums) into out_dir.
void write_manifest(const std::string& out_dir, const RunManifest& manifest);

std::string artifact_version();

}  // namespace halo
