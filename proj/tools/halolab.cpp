// halolab: seeded experiment pipelines for generative-policy hallucination
// analysis. Subcommands: train, topology, precision, bounds, plansim, seam-map.
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "halolab/bounds.hpp"
#include "halolab/checkpoint.hpp"
#include "halolab/csvio.hpp"
#include "halolab/errors.hpp"
#include "halolab/experiment.hpp"
#include "halolab/metrics.hpp"
#include "halolab/parallel.hpp"

namespace fs = std::filesystem;
using halo::ConfigError;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::string config_path;
  uint64_t seed = 0;
  std::string preset = "desk";
  std::string out_dir = "out";
  int threads = halo::default_threads();
  bool dry_run = false;
};

json load_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  try {
    return json::parse(halo::read_text_file(path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

template <typename T>
T require_field(const json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string("missing required field: ") + name);
  try {
    return j.at(name).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field '") + name + "': " + e.what());
  }
}

double wall_seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> list_outputs(const std::string& out_dir) {
  std::vector<std::string> files;
  if (!fs::exists(out_dir)) return files;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    files.push_back(name);
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_topology(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  halo::TopologyConfig base;
  halo::apply_preset(g.preset, base.train, base.eval);
  const halo::TopologyConfig cfg =
      halo::topology_config_from_json(load_config_json(g.config_path).dump(), base);

  const halo::TopologyResult result =
      halo::run_topology_experiment(cfg, g.seed, g.threads, g.out_dir, g.dry_run);

  halo::RunManifest manifest;
  manifest.command = "topology";
  manifest.version = halo::artifact_version();
  manifest.config_json = halo::topology_config_to_json(cfg);
  manifest.root_seed = g.seed;
  manifest.threads = g.threads;
  manifest.dry_run = g.dry_run;
  for (const auto& cell : result.cells) {
    const std::string tag = cell.head + "_M" + std::to_string(cell.modes) + "_W" +
                            halo::format_double(cell.gap_halfwidth) + "_s" +
                            std::to_string(cell.seed_index);
    manifest.stage_seeds.emplace_back(tag, cell.seed);
    if (cell.failed) manifest.failed_cells.push_back(tag + ": " + cell.error);
  }
  manifest.output_files = list_outputs(g.out_dir);
  manifest.wall_clock_sec = wall_seconds_since(t0);
  halo::write_manifest(g.out_dir, manifest);
  std::printf("topology: %zu cells, %zu failed, %.1f s -> %s\n", result.cells.size(),
              manifest.failed_cells.size(), manifest.wall_clock_sec, g.out_dir.c_str());
  return 0;
}

int cmd_precision(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  halo::PrecisionConfig base;
  halo::apply_preset(g.preset, base.train, base.eval);
  const halo::PrecisionConfig cfg =
      halo::precision_config_from_json(load_config_json(g.config_path).dump(), base);

  const halo::PrecisionResult result =
      halo::run_precision_experiment(cfg, g.seed, g.threads, g.out_dir, g.dry_run);

  halo::RunManifest manifest;
  manifest.command = "precision";
  manifest.version = halo::artifact_version();
  manifest.config_json = halo::precision_config_to_json(cfg);
  manifest.root_seed = g.seed;
  manifest.threads = g.threads;
  manifest.dry_run = g.dry_run;
  for (const auto& run : result.runs) {
    const std::string tag = run.head + "_s" + std::to_string(run.seed_index);
    manifest.stage_seeds.emplace_back(tag, run.seed);
    if (run.failed) manifest.failed_cells.push_back(tag + ": " + run.error);
  }
  manifest.output_files = list_outputs(g.out_dir);
  manifest.wall_clock_sec = wall_seconds_since(t0);
  halo::write_manifest(g.out_dir, manifest);
  std::printf("precision: %zu runs, %zu failed, %.1f s -> %s\n", result.runs.size(),
              manifest.failed_cells.size(), manifest.wall_clock_sec, g.out_dir.c_str());
  return 0;
}

int cmd_plansim(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  const json j = load_config_json(g.config_path);
  const std::string mode = j.value("mode", "compare");

  halo::RunManifest manifest;
  manifest.command = "plansim";
  manifest.version = halo::artifact_version();
  manifest.root_seed = g.seed;
  manifest.threads = g.threads;

  if (mode == "compare") {
    halo::PlansimConfig base;
    base.schedules = {halo::ScheduleSpec{halo::ScheduleSpec::Kind::Geometric, 0.0, 2.0},
                      halo::ScheduleSpec{halo::ScheduleSpec::Kind::Polynomial, 0.0, 1.0},
                      halo::ScheduleSpec{halo::ScheduleSpec::Kind::Constant, 0.0, 0.0}};
    base.q_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 30, 50};
    json jc = j;
    jc.erase("mode");
    const halo::PlansimConfig cfg = halo::plansim_config_from_json(jc.dump(), base);
    halo::run_plansim_experiment(cfg, g.seed, g.threads, g.out_dir);
    manifest.config_json = halo::plansim_config_to_json(cfg);
  } else if (mode == "estimate") {
    halo::PlannerConfig cfg;
    cfg.budget_q = require_field<int>(j, "q");
    cfg.eps_fp = require_field<double>(j, "eps_fp");
    cfg.eps_fn = require_field<double>(j, "eps_fn");
    if (!j.contains("schedule")) throw ConfigError("missing required field: schedule");
    {
      const json& s = j.at("schedule");
      halo::PlansimConfig tmp;  // reuse the schedule parser via a one-entry config
      json wrap{{"schedules", json::array({s})}};
      tmp = halo::plansim_config_from_json(wrap.dump(), tmp);
      cfg.schedule = tmp.schedules.at(0);
    }
    const long trials = j.value("trials", 10000L);
    const halo::ReliabilityReport rep =
        halo::estimate_reliability(cfg, trials, g.seed, g.threads);
    fs::create_directories(g.out_dir);
    json out{{"trials", rep.trials},
             {"H_hat", rep.h_hat},
             {"A_hat", rep.a_hat},
             {"S_hat", rep.s_hat},
             {"H_ci", json{{"lo", rep.h_ci.lo}, {"hi", rep.h_ci.hi}}},
             {"A_ci", json{{"lo", rep.a_ci.lo}, {"hi", rep.a_ci.hi}}},
             {"S_ci", json{{"lo", rep.s_ci.lo}, {"hi", rep.s_ci.hi}}},
             {"H_cap", rep.h_cap},
             {"A_cap", rep.a_cap},
             {"accept_round_hist", rep.accept_round_hist},
             {"rho", rep.rho},
             {"any_clamped", rep.any_clamped}};
    halo::write_text_file(g.out_dir + "/plansim_reliability.json", out.dump(1) + "\n");
    manifest.config_json = j.dump();
  } else if (mode == "elimination") {
    halo::EliminationConfig cfg;
    cfg.library_size = require_field<long>(j, "library_size");
    cfg.valid_count = require_field<long>(j, "valid_count");
    cfg.budget_q = require_field<int>(j, "q");
    cfg.eps_fp = j.value("eps_fp", 0.0);
    cfg.eps_fn = j.value("eps_fn", 0.0);
    const long trials = j.value("trials", 10000L);
    const halo::EliminationReport rep =
        halo::run_elimination_planner(cfg, trials, g.seed, g.threads);
    fs::create_directories(g.out_dir);
    json out{{"trials", rep.trials},   {"H_hat", rep.h_hat},     {"A_hat", rep.a_hat},
             {"S_hat", rep.s_hat},     {"rho_hat", rep.rho_hat}, {"reached", rep.reached}};
    halo::write_text_file(g.out_dir + "/plansim_elimination.json", out.dump(1) + "\n");
    manifest.config_json = j.dump();
  } else {
    throw ConfigError("plansim: unknown mode '" + mode + "' (compare|estimate|elimination)");
  }

  manifest.output_files = list_outputs(g.out_dir);
  manifest.wall_clock_sec = wall_seconds_since(t0);
  halo::write_manifest(g.out_dir, manifest);
  std::printf("plansim(%s): %.1f s -> %s\n", mode.c_str(), manifest.wall_clock_sec,
              g.out_dir.c_str());
  return 0;
}

json bound_result_to_json(const halo::BoundResult& r) {
  return json{{"raw", r.raw},
              {"clamped", r.clamped},
              {"vacuous", r.vacuous},
              {"degenerate_mass", r.degenerate_mass}};
}

json eval_bound_request(const json& req, uint64_t seed, int threads) {
  const std::string bound = require_field<std::string>(req, "bound");
  json out{{"bound", bound}, {"inputs", req}};
  if (bound == "iso") {
    halo::IsoBoundInputs in;
    in.mode_mass = require_field<std::vector<double>>(req, "mode_mass");
    in.gap_halfwidth = require_field<double>(req, "W");
    in.lipschitz = require_field<double>(req, "L");
    in.radius = require_field<double>(req, "R");
    in.latent_dim = require_field<int>(req, "d");
    out["result"] = bound_result_to_json(halo::iso_lower_bound(in));
    out["linearized"] = bound_result_to_json(halo::iso_bound_linearized(in));
  } else if (bound == "precision") {
    halo::PrecisionInputs in;
    in.tube_constant = require_field<double>(req, "C_M");
    in.delta = require_field<double>(req, "delta");
    in.ambient_dim = require_field<int>(req, "d");
    in.manifold_dim = require_field<int>(req, "k");
    in.density_cap = require_field<double>(req, "density_cap");
    out["result"] = bound_result_to_json(halo::precision_lower_bound(in));
  } else if (bound == "trilemma") {
    halo::PrecisionInputs in;
    in.tube_constant = require_field<double>(req, "C_M");
    in.delta = require_field<double>(req, "delta");
    in.ambient_dim = require_field<int>(req, "d");
    in.manifold_dim = require_field<int>(req, "k");
    in.fold_count = require_field<double>(req, "N_delta");
    in.sigma_star = require_field<double>(req, "sigma_star");
    in.latent_density_cap = require_field<double>(req, "rho_max");
    in.target_eta = req.value("eta", 0.5);
    out["result"] = bound_result_to_json(halo::trilemma_bound(in));
    out["fold_collapse_requirement"] = halo::fold_collapse_requirement(in);
  } else if (bound == "kstep") {
    const auto steps = halo::required_refinement_steps(
        require_field<int>(req, "d"), require_field<int>(req, "k"),
        require_field<double>(req, "delta"), require_field<double>(req, "eta"),
        require_field<double>(req, "lambda"), require_field<double>(req, "C_M"),
        require_field<double>(req, "rho_max"));
    out["result"] = json{{"vacuous", steps.vacuous}, {"K_min", steps.k_min}, {"raw", steps.raw}};
  } else if (bound == "horizon") {
    const auto hb = halo::horizon_success_bound(require_field<std::vector<double>>(req, "gamma"));
    out["result"] = json{{"success_cap", hb.success_cap}, {"H_lower", hb.h_lower}};
  } else if (bound == "reliability_window") {
    const auto w = halo::reliability_window(
        require_field<double>(req, "alpha"), require_field<double>(req, "beta"),
        require_field<double>(req, "eps_fp"), require_field<double>(req, "eps_fn"),
        require_field<double>(req, "rho"));
    out["result"] = json{{"q_min", w.q_min},
                         {"q_max", w.q_max},
                         {"q_max_unbounded", w.q_max_unbounded},
                         {"q_min_unbounded", w.q_min_unbounded},
                         {"feasible", w.feasible}};
  } else if (bound == "abstention") {
    const auto ab = halo::abstention_bound(require_field<std::vector<double>>(req, "rho"),
                                           require_field<double>(req, "c"),
                                           req.value("beta", 0.05));
    out["result"] = json{{"product_bound", ab.product_bound},
                         {"exp_bound", ab.exp_bound},
                         {"required_mass", ab.required_mass}};
  } else if (bound == "amplification") {
    halo::ScheduleSpec spec;
    const std::string kind = require_field<std::string>(req, "schedule_kind");
    if (kind == "constant")
      spec.kind = halo::ScheduleSpec::Kind::Constant;
    else if (kind == "polynomial")
      spec.kind = halo::ScheduleSpec::Kind::Polynomial;
    else if (kind == "geometric")
      spec.kind = halo::ScheduleSpec::Kind::Geometric;
    else
      throw ConfigError("amplification: unknown schedule_kind '" + kind + "'");
    spec.param = req.value("schedule_param", 0.0);
    const double gamma = require_field<double>(req, "gamma");
    const int horizon = require_field<int>(req, "T");
    spec.rho1 = req.value("rho1", std::exp(horizon * std::log(gamma)));
    const auto rep = halo::amplification_check(
        spec, gamma, horizon, require_field<double>(req, "alpha"),
        require_field<double>(req, "beta"), require_field<double>(req, "c"),
        require_field<double>(req, "eps_fp"), require_field<int>(req, "q"));
    out["result"] = json{{"sum_rho", rep.sum_rho},
                         {"any_clamped", rep.any_clamped},
                         {"necessary_threshold", rep.necessary_threshold},
                         {"necessary_met", rep.necessary_met},
                         {"poly_q_requirement", rep.poly_q_requirement},
                         {"poly_q_requirement_ceil", rep.poly_q_requirement_ceil},
                         {"geo_series_mass", rep.geo_series_mass},
                         {"geo_required_mass", rep.geo_required_mass},
                         {"geo_fp_ok", rep.geo_fp_ok},
                         {"geo_mass_ok", rep.geo_mass_ok},
                         {"geo_sufficient", rep.geo_sufficient},
                         {"geo_min_q", rep.geo_min_q}};
  } else if (bound == "tube_volume") {
    // Tube volume for the built-in manifolds: "circle" (radius r in the
    // plane) or "grasp".
    const std::string manifold = require_field<std::string>(req, "manifold");
    const double delta = require_field<double>(req, "delta");
    const long n = req.value("n", 1000000L);
    halo::DistanceFn dist;
    halo::Box box;
    if (manifold == "circle") {
      const double r = require_field<double>(req, "radius");
      dist = [r](const halo::Vec& a) {
        return std::fabs(std::sqrt(a[0] * a[0] + a[1] * a[1]) - r);
      };
      box.lo = {-(r + delta), -(r + delta)};
      box.hi = {r + delta, r + delta};
    } else if (manifold == "grasp") {
      halo::GraspManifold m;
      m.ring_radius = req.value("ring_radius", 1.0);
      m.h_min = req.value("h_min", 0.0);
      m.h_max = req.value("h_max", 1.0);
      dist = [m](const halo::Vec& a) { return halo::grasp_distance(m, a); };
      const double r = m.ring_radius;
      box.lo = {-(r + delta), -(r + delta), m.h_min - delta, -delta, -delta, -(1 + delta),
                -(1 + delta)};
      box.hi = {r + delta, r + delta, m.h_max + delta, delta, delta, 1 + delta, 1 + delta};
    } else {
      throw ConfigError("tube_volume: unknown manifold '" + manifold + "' (circle|grasp)");
    }
    const auto est = halo::tube_volume_mc(dist, delta, box, n, seed, threads);
    out["result"] = json{{"volume", est.volume},
                         {"ci_half", est.ci_half},
                         {"hits", est.hits},
                         {"n", est.n}};
  } else {
    throw ConfigError("unknown bound '" + bound + "'");
  }
  return out;
}

int cmd_bounds(const GlobalOpts& g) {
  const json j = load_config_json(g.config_path);
  json requests = json::array();
  if (j.contains("requests")) {
    requests = j.at("requests");
  } else if (j.is_array()) {
    requests = j;
  } else {
    requests.push_back(j);
  }
  json results = json::array();
  for (const auto& req : requests) results.push_back(eval_bound_request(req, g.seed, g.threads));
  fs::create_directories(g.out_dir);
  const std::string payload = results.dump(1) + "\n";
  halo::write_text_file(g.out_dir + "/bounds_results.json", payload);
  std::fputs(payload.c_str(), stdout);
  return 0;
}

int cmd_train(const GlobalOpts& g) {
  const auto t0 = std::chrono::steady_clock::now();
  const json j = load_config_json(g.config_path);
  const std::string head = require_field<std::string>(j, "head");
  const std::string env = require_field<std::string>(j, "env");

  halo::TrainParams tp;
  halo::EvalParams ep;
  halo::apply_preset(g.preset, tp, ep);
  if (j.contains("train")) {
    halo::TopologyConfig tmp;  // borrow the train-params parser
    json wrap{{"train", j.at("train")}};
    tmp.train = tp;
    tmp = halo::topology_config_from_json(wrap.dump(), tmp);
    tp = tmp.train;
  }

  halo::DataSampler data;
  int action_dim = 0;
  if (env == "band") {
    halo::BandGeometry geom;
    if (j.contains("band")) {
      const json& b = j.at("band");
      geom.modes = b.value("modes", geom.modes);
      geom.strip_halfwidth = b.value("strip_halfwidth", geom.strip_halfwidth);
      geom.gap_halfwidth = b.value("gap_halfwidth", geom.gap_halfwidth);
      geom.x_min = b.value("x_min", geom.x_min);
      geom.x_max = b.value("x_max", geom.x_max);
      geom.y_max = b.value("y_max", halo::BandGeometry::fitted_y_max(
                                        geom.modes, geom.strip_halfwidth, geom.gap_halfwidth));
    }
    geom.validate();
    data = halo::band_data_sampler(geom);
    action_dim = 2;
  } else if (env == "grasp") {
    halo::GraspManifold m;
    double noise_sigma = 0.01;
    if (j.contains("grasp")) {
      const json& gj = j.at("grasp");
      m.ring_radius = gj.value("ring_radius", m.ring_radius);
      m.h_min = gj.value("h_min", m.h_min);
      m.h_max = gj.value("h_max", m.h_max);
      noise_sigma = gj.value("noise_sigma", noise_sigma);
    }
    m.validate();
    data = halo::grasp_data_sampler(m, noise_sigma);
    action_dim = halo::GraspManifold::ambient_dim;
  } else {
    throw ConfigError("train: unknown env '" + env + "' (band|grasp)");
  }

  fs::create_directories(g.out_dir);
  const std::string ckpt = g.out_dir + "/" + j.value("checkpoint_out", head + "_head.json");

  if (g.dry_run) {
    std::printf("train(dry-run): would train %s on %s for %ld steps\n", head.c_str(), env.c_str(),
                tp.steps);
    return 0;
  }

  double final_loss = 0.0;
  if (head == "flow") {
    halo::TrainedFlow tf = halo::train_flow(data, action_dim, tp, g.seed);
    halo::save_flow_head(ckpt, tf.head, g.seed);
    final_loss = tf.loss_curve.back();
  } else if (head == "diffusion") {
    halo::TrainedDiffusion td = halo::train_diffusion(data, action_dim, tp, g.seed);
    halo::save_diffusion_head(ckpt, td.head, g.seed);
    final_loss = td.loss_curve.back();
  } else {
    throw ConfigError("train: unknown head '" + head + "' (flow|diffusion)");
  }

  const long export_n = j.value("export_data_n", 0L);
  if (export_n > 0) {
    halo::Rng rng(halo::mix64(g.seed ^ 0xDA7A));
    const auto actions = data(static_cast<int>(export_n), rng);
    std::vector<std::string> header;
    for (int c = 0; c < action_dim; ++c) header.push_back("a" + std::to_string(c));
    halo::CsvWriter csv(g.out_dir + "/training_data.csv", header);
    for (const auto& a : actions) {
      for (double v : a) csv.field(v);
      csv.end_row();
    }
  }

  std::printf("train: %s on %s, %ld steps, final loss %.6g, %.1f s -> %s\n", head.c_str(),
              env.c_str(), tp.steps, final_loss, wall_seconds_since(t0), ckpt.c_str());
  return 0;
}

int cmd_seam_map(const GlobalOpts& g) {
  const json j = load_config_json(g.config_path);
  const std::string ckpt = require_field<std::string>(j, "checkpoint");

  halo::BandGeometry geom;
  if (j.contains("band")) {
    const json& b = j.at("band");
    geom.modes = b.value("modes", geom.modes);
    geom.strip_halfwidth = b.value("strip_halfwidth", geom.strip_halfwidth);
    geom.gap_halfwidth = b.value("gap_halfwidth", geom.gap_halfwidth);
    geom.x_min = b.value("x_min", geom.x_min);
    geom.x_max = b.value("x_max", geom.x_max);
    geom.y_max = b.value("y_max", halo::BandGeometry::fitted_y_max(
                                      geom.modes, geom.strip_halfwidth, geom.gap_halfwidth));
  }
  geom.validate();

  halo::SeamGridSpec grid;
  if (j.contains("grid")) {
    const json& gj = j.at("grid");
    grid.z_min = gj.value("z_min", grid.z_min);
    grid.z_max = gj.value("z_max", grid.z_max);
    grid.nx = gj.value("nx", grid.nx);
    grid.ny = gj.value("ny", grid.ny);
  }

  halo::BatchDecoder decode;
  std::optional<halo::FlowHead> flow;
  std::optional<halo::DiffusionHead> diff;
  if (halo::peek_head_kind(ckpt) == halo::HeadKind::Flow) {
    flow.emplace(halo::load_flow_head(ckpt));
    decode = [&flow](const std::vector<halo::Vec>& zs) { return flow->sample_batch(zs); };
  } else {
    diff.emplace(halo::load_diffusion_head(ckpt));
    decode = [&diff](const std::vector<halo::Vec>& zs) { return diff->sample_batch(zs); };
  }

  const auto pts = halo::seam_map(
      decode, [&geom](const halo::Vec& a) { return halo::band_classify(geom, a); }, grid);

  fs::create_directories(g.out_dir);
  halo::CsvWriter csv(g.out_dir + "/seam_map.csv", {"zx", "zy", "ax", "ay", "class"});
  for (const auto& p : pts)
    csv.row(p.zx, p.zy, p.ax, p.ay, static_cast<long>(p.cls.safe ? p.cls.mode : -1));
  std::printf("seam-map: %zu grid points -> %s/seam_map.csv\n", pts.size(), g.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"halolab: hallucination bounds and desk-scale generative-policy experiments"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON config file")->capture_default_str();
  app.add_option("--seed", g.seed, "root seed")->capture_default_str();
  app.add_option("--preset", g.preset, "scale preset: desk|paper")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_flag("--dry-run", g.dry_run, "parse configs and emit the manifest without running");

  auto* train = app.add_subcommand("train", "train one head and write a checkpoint");
  auto* topology = app.add_subcommand("topology", "band-topology hallucination sweep");
  auto* precision = app.add_subcommand("precision", "grasp-manifold precision experiment");
  auto* bounds = app.add_subcommand("bounds", "evaluate closed-form bounds from a key-value doc");
  auto* plansim = app.add_subcommand("plansim", "verification-guided planning simulation");
  auto* seam = app.add_subcommand("seam-map", "decode a latent grid through a checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(g);
    if (topology->parsed()) return cmd_topology(g);
    if (precision->parsed()) return cmd_precision(g);
    if (bounds->parsed()) return cmd_bounds(g);
    if (plansim->parsed()) return cmd_plansim(g);
    if (seam->parsed()) return cmd_seam_map(g);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
