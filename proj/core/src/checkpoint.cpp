#include "halolab/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "halolab/errors.hpp"

namespace halo {

using nlohmann::json;

namespace {

json mlp_cfg_to_json(const MlpConfig& c) {
  return json{{"action_dim", c.action_dim},
              {"embed_dim", c.embed_dim},
              {"hidden", c.hidden},
              {"depth", c.depth},
              {"ln_eps", c.ln_eps}};
}

MlpConfig mlp_cfg_from_json(const json& j) {
  MlpConfig c;
  c.action_dim = j.at("action_dim").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.depth = j.at("depth").get<int>();
  c.ln_eps = j.at("ln_eps").get<double>();
  return c;
}

json adamw_to_json(const AdamWConfig& c) {
  return json{{"lr", c.lr},           {"beta1", c.beta1},
              {"beta2", c.beta2},     {"eps", c.eps},
              {"weight_decay", c.weight_decay}, {"clip", c.clip}};
}

AdamWConfig adamw_from_json(const json& j) {
  AdamWConfig c;
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.beta2 = j.at("beta2").get<double>();
  c.eps = j.at("eps").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.clip = j.at("clip").get<double>();
  return c;
}

json net_state_to_json(const MlpConfig& cfg, const AdamWConfig& adamw, const Vec& params,
                       const OptimizerState& opt, const Vec& ema_shadow, double ema_decay,
                       uint64_t seed) {
  return json{{"mlp", mlp_cfg_to_json(cfg)},
              {"adamw", adamw_to_json(adamw)},
              {"n_params", params.size()},
              {"params", params},
              {"opt", json{{"m", opt.m}, {"v", opt.v}, {"step", opt.step}}},
              {"ema", json{{"decay", ema_decay}, {"shadow", ema_shadow}}},
              {"seed", seed}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("checkpoint: cannot open for writing: " + path);
  out << j.dump(1);
  out << "\n";
  if (!out) throw ConfigError("checkpoint: write failed: " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("checkpoint: cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("checkpoint: malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void check_size(const std::string& path, size_t expected, size_t got, const char* what) {
  if (expected != got)
    throw ShapeError("checkpoint " + path + ": " + what + " length " + std::to_string(got) +
                     " does not match shape header " + std::to_string(expected));
}

}  // namespace

void save_net_checkpoint(const std::string& path, const NetCheckpoint& ck) {
  json j = net_state_to_json(ck.cfg, ck.adamw, ck.params, ck.opt, ck.ema.shadow, ck.ema.decay,
                             ck.seed);
  j["format"] = "halolab-net";
  j["version"] = 1;
  write_json(path, j);
}

NetCheckpoint load_net_checkpoint(const std::string& path) {
  const json j = read_json(path);
  NetCheckpoint ck;
  ck.cfg = mlp_cfg_from_json(j.at("mlp"));
  ck.adamw = adamw_from_json(j.at("adamw"));
  ck.params = j.at("params").get<Vec>();
  const size_t n = j.at("n_params").get<size_t>();
  check_size(path, n, ck.params.size(), "params");
  ck.opt = adamw_init(ck.adamw, n);
  ck.opt.m = j.at("opt").at("m").get<Vec>();
  ck.opt.v = j.at("opt").at("v").get<Vec>();
  ck.opt.step = j.at("opt").at("step").get<long>();
  check_size(path, n, ck.opt.m.size(), "opt.m");
  check_size(path, n, ck.opt.v.size(), "opt.v");
  ck.ema.decay = j.at("ema").at("decay").get<double>();
  ck.ema.shadow = j.at("ema").at("shadow").get<Vec>();
  check_size(path, n, ck.ema.shadow.size(), "ema.shadow");
  ck.seed = j.at("seed").get<uint64_t>();
  const size_t expect = mlp_layout(ck.cfg).total;
  check_size(path, expect, n, "shape-derived parameter count");
  return ck;
}

void save_flow_head(const std::string& path, const FlowHead& head, uint64_t seed) {
  const FlowConfig& c = head.config();
  json j = net_state_to_json(c.mlp, c.adamw, head.net().flat, head.opt(), head.ema_net().flat,
                             c.ema_decay, seed);
  j["format"] = "halolab-head";
  j["version"] = 1;
  j["head"] = "flow";
  j["sampler"] = json{{"sample_steps", c.sample_steps},
                      {"integrator", c.integrator == Integrator::Euler ? "euler" : "heun"},
                      {"eval_use_ema", c.eval_use_ema}};
  write_json(path, j);
}

FlowHead load_flow_head(const std::string& path, uint64_t* seed_out) {
  const json j = read_json(path);
  if (j.value("head", "") != "flow")
    throw ConfigError("checkpoint " + path + ": not a flow head");
  FlowConfig c;
  c.mlp = mlp_cfg_from_json(j.at("mlp"));
  c.adamw = adamw_from_json(j.at("adamw"));
  c.sample_steps = j.at("sampler").at("sample_steps").get<int>();
  const std::string integ = j.at("sampler").at("integrator").get<std::string>();
  if (integ == "euler")
    c.integrator = Integrator::Euler;
  else if (integ == "heun")
    c.integrator = Integrator::Heun;
  else
    throw ConfigError("checkpoint " + path + ": unknown integrator '" + integ + "'");
  c.eval_use_ema = j.at("sampler").at("eval_use_ema").get<bool>();
  c.ema_decay = j.at("ema").at("decay").get<double>();

  FlowHead head(c, 0);
  const size_t n = head.net().flat.size();
  head.net().flat = j.at("params").get<Vec>();
  check_size(path, n, head.net().flat.size(), "params");
  head.ema_net().flat = j.at("ema").at("shadow").get<Vec>();
  check_size(path, n, head.ema_net().flat.size(), "ema.shadow");
  head.opt().m = j.at("opt").at("m").get<Vec>();
  head.opt().v = j.at("opt").at("v").get<Vec>();
  head.opt().step = j.at("opt").at("step").get<long>();
  check_size(path, n, head.opt().m.size(), "opt.m");
  check_size(path, n, head.opt().v.size(), "opt.v");
  if (seed_out) *seed_out = j.at("seed").get<uint64_t>();
  return head;
}

void save_diffusion_head(const std::string& path, const DiffusionHead& head, uint64_t seed) {
  const DiffusionConfig& c = head.config();
  json j = net_state_to_json(c.mlp, c.adamw, head.net().flat, head.opt(), head.ema_net().flat,
                             c.ema_decay, seed);
  j["format"] = "halolab-head";
  j["version"] = 1;
  j["head"] = "diffusion";
  j["sampler"] = json{{"t_diff", c.t_diff},
                      {"ddim_steps", c.ddim_steps},
                      {"eval_use_ema", c.eval_use_ema}};
  j["schedule"] = head.alpha_bar();
  write_json(path, j);
}

DiffusionHead load_diffusion_head(const std::string& path, uint64_t* seed_out) {
  const json j = read_json(path);
  if (j.value("head", "") != "diffusion")
    throw ConfigError("checkpoint " + path + ": not a diffusion head");
  DiffusionConfig c;
  c.mlp = mlp_cfg_from_json(j.at("mlp"));
  c.adamw = adamw_from_json(j.at("adamw"));
  c.t_diff = j.at("sampler").at("t_diff").get<int>();
  c.ddim_steps = j.at("sampler").at("ddim_steps").get<int>();
  c.eval_use_ema = j.at("sampler").at("eval_use_ema").get<bool>();
  c.ema_decay = j.at("ema").at("decay").get<double>();

  DiffusionHead head(c, 0);
  const Vec sched = j.at("schedule").get<Vec>();
  check_size(path, head.alpha_bar().size(), sched.size(), "schedule");
  const size_t n = head.net().flat.size();
  head.net().flat = j.at("params").get<Vec>();
  check_size(path, n, head.net().flat.size(), "params");
  head.ema_net().flat = j.at("ema").at("shadow").get<Vec>();
  check_size(path, n, head.ema_net().flat.size(), "ema.shadow");
  head.opt().m = j.at("opt").at("m").get<Vec>();
  head.opt().v = j.at("opt").at("v").get<Vec>();
  head.opt().step = j.at("opt").at("step").get<long>();
  check_size(path, n, head.opt().m.size(), "opt.m");
  check_size(path, n, head.opt().v.size(), "opt.v");
  if (seed_out) *seed_out = j.at("seed").get<uint64_t>();
  return head;
}

HeadKind peek_head_kind(const std::string& path) {
  const json j = read_json(path);
  const std::string kind = j.value("head", "");
  if (kind == "flow") return HeadKind::Flow;
  if (kind == "diffusion") return HeadKind::Diffusion;
  throw ConfigError("checkpoint " + path + ": missing or unknown head type '" + kind + "'");
}

}  // namespace halo
