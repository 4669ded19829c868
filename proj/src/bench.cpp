// Copyright 2026 The dyngrasp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dyngrasp/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dyngrasp/check/selfcheck.hpp"
#include "dyngrasp/errors.hpp"

namespace dyngrasp {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::sac: return "sac";
    case Method::heuristic: return "heuristic";
    case Method::random: return "random";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  for (auto m : {Method::sac, Method::heuristic, Method::random}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown method: " + std::string(s));
}

namespace {

// Reads fields that are present, remembers which keys were consumed and
// rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <typename T>
  void field(const char* key, T& v) {
    if (!take(key)) return;
    try {
      v = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where() + key + ": " + e.what());
    }
  }

  template <typename E, typename To, typename From>
  void enum_field(const char* key, E& v, To, From from) {
    std::string s;
    field(key, s);
    if (!j_.contains(key)) return;
    v = convert(key, s, from);
  }

  template <typename E, typename To, typename From>
  void enum_list(const char* key, std::vector<E>& v, To, From from) {
    std::vector<std::string> names;
    field(key, names);
    if (!j_.contains(key)) return;
    v.clear();
    for (const auto& n : names) v.push_back(convert(key, n, from));
  }

  void vec3(const char* key, Vec3<double>& v) {
    std::array<double, 3> a{v.x(), v.y(), v.z()};
    field(key, a);
    v = Vec3<double>(a[0], a[1], a[2]);
  }

  template <typename F>
  void object(const char* key, F&& fn) {
    if (!take(key)) return;
    Reader sub(j_.at(key), where() + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown config key: " + where() + key);
    }
  }

 private:
  bool take(const char* key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  template <typename From>
  auto convert(const char* key, const std::string& s, From from) {
    try {
      return from(s);
    } catch (const InvalidArgument& e) {
      throw ConfigError(where() + key + ": " + e.what());
    }
  }

  std::string where() const { return path_.empty() ? "" : path_ + "."; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

class Writer {
 public:
  template <typename T>
  void field(const char* key, const T& v) {
    j[key] = v;
  }

  template <typename E, typename To, typename From>
  void enum_field(const char* key, const E& v, To to, From) {
    j[key] = std::string(to(v));
  }

  template <typename E, typename To, typename From>
  void enum_list(const char* key, const std::vector<E>& v, To to, From) {
    json a = json::array();
    for (const auto& e : v) a.push_back(std::string(to(e)));
    j[key] = a;
  }

  void vec3(const char* key, const Vec3<double>& v) { j[key] = {v.x(), v.y(), v.z()}; }

  template <typename F>
  void object(const char* key, F&& fn) {
    Writer sub;
    fn(sub);
    j[key] = sub.j;
  }

  json j = json::object();
};

// The single list of configurable fields, shared by parsing and the resolved snapshot.
template <typename V>
void visit(V& v, RunConfig& c) {
  const auto rep_to = [](Representation r) { return to_string(r); };
  const auto enc_to = [](nets::EncoderKind k) { return to_string(k); };
  const auto mode_to = [](TrajectoryMode m) { return to_string(m); };
  const auto split_to = [](ObjectSplit s) { return to_string(s); };
  const auto method_to = [](Method m) { return to_string(m); };
  v.enum_field("representation", c.representation, rep_to, representation_from_string);
  v.enum_field("encoder", c.encoder, enc_to, encoder_kind_from_string);
  v.enum_list("trajectory_modes", c.trajectory_modes, mode_to, trajectory_mode_from_string);
  v.enum_list("splits", c.splits, split_to, object_split_from_string);
  v.enum_list("methods", c.methods, method_to, method_from_string);
  v.field("template_points", c.template_points);
  v.field("seeds", c.seeds);
  v.field("output_dir", c.output_dir);
  v.field("eval_episodes", c.eval_episodes);
  v.field("macro_switch", c.macro_switch);
  v.field("checkpoint_every", c.checkpoint_every);
  v.field("ablate_template_points", c.ablate_template_points);
  v.field("ablate_variants", c.ablate_variants);

  EnvConfig& e = c.env;
  v.object("env", [&](auto& s) {
    s.object("trajectory", [&](auto& t) {
      TrajectoryConfig& tc = e.trajectory;
      t.field("speed_min", tc.speed_min);
      t.field("speed_max", tc.speed_max);
      t.field("omega_min_deg", tc.omega_min_deg);
      t.field("omega_max_deg", tc.omega_max_deg);
      t.field("control_points", tc.control_points);
      t.field("circle_radius_min", tc.circle_radius_min);
      t.field("circle_radius_max", tc.circle_radius_max);
      t.field("line_min_length", tc.line_min_length);
      t.field("xy_min", tc.xy_min);
      t.field("xy_max", tc.xy_max);
      t.field("dt", tc.dt);
      t.field("steps", tc.steps);
    });
    s.object("gripper", [&](auto& g) {
      g.field("max_opening", e.gripper.max_opening);
      g.field("finger_depth", e.gripper.finger_depth);
      g.field("palm_depth", e.gripper.palm_depth);
      g.field("clearance", e.gripper.clearance);
    });
    s.object("explorer", [&](auto& x) {
      x.field("radius", e.explorer.radius);
      x.field("points_per_region", e.explorer.points_per_region);
      x.field("tracked", e.explorer.tracked);
      x.field("complement", e.explorer.complement);
      x.field("stale_distance", e.explorer.stale_distance);
    });
    s.object("workspace", [&](auto& w) {
      w.vec3("min", e.workspace.min_corner);
      w.vec3("max", e.workspace.max_corner);
    });
    s.object("reward", [&](auto& r) {
      r.field("approach", e.reward.approach);
      r.field("grasp", e.reward.grasp);
      r.field("lift", e.reward.lift);
      r.field("visibility", e.reward.visibility);
    });
    s.field("surface_points", e.surface_points);
    s.field("noise_std", e.noise_std);
    s.field("detect_radius", e.detect_radius);
    s.field("fov_half_angle_deg", e.fov_half_angle_deg);
    s.field("max_range", e.max_range);
    s.field("max_grasps", e.max_grasps);
    s.field("raw_points", e.raw_points);
    s.field("max_translation", e.max_translation);
    s.field("max_rotation_deg", e.max_rotation_deg);
    s.field("attach_position_tol", e.attach_position_tol);
    s.field("attach_rotation_tol", e.attach_rotation_tol);
    s.field("approach_position_tol", e.approach_position_tol);
    s.field("approach_rotation_tol", e.approach_rotation_tol);
    s.field("lift_height", e.lift_height);
    s.field("start_height_min", e.start_height_min);
    s.field("start_height_max", e.start_height_max);
    s.field("start_lateral", e.start_lateral);
  });

  AgentConfig& a = c.agent;
  v.object("network", [&](auto& n) {
    n.field("intra", a.encoder_widths.intra);
    n.field("inter", a.encoder_widths.inter);
    n.field("hidden", a.hidden);
    n.field("aux_hidden", a.aux_hidden);
  });
  v.object("sac", [&](auto& s) {
    SacHyperparams& h = a.hp;
    s.field("discount", h.discount);
    s.field("aux_target_weight", h.aux_target_weight);
    s.field("aux_goal_weight", h.aux_goal_weight);
    s.field("aux_horizon", h.aux_horizon);
    s.field("actor_lr", h.actor_lr);
    s.field("critic_lr", h.critic_lr);
    s.field("alpha_lr", h.alpha_lr);
    s.field("tau", h.tau);
    s.field("init_temperature", h.init_temperature);
    s.field("target_entropy", h.target_entropy);
    s.field("batch_size", h.batch_size);
    s.field("total_steps", h.total_steps);
    s.field("warmup_steps", h.warmup_steps);
    s.field("update_every", h.update_every);
    s.field("replay_capacity", h.replay_capacity);
  });
}

/// Derived fields: featurizer sizes follow the environment and representation.
void sync(RunConfig& c) {
  c.env.template_points = c.template_points;
  FeaturizerConfig& f = c.agent.features;
  f.rep = c.representation;
  f.max_grasps = c.env.max_grasps;
  f.template_points = c.template_points;
  f.raw_points = c.env.raw_points;
  f.gripper = c.env.gripper;
  c.agent.encoder = c.encoder;
  c.agent.encoder_widths.input_dim = c.representation == Representation::nined ? 9 : 3;
}

json resolved(const RunConfig& cfg) {
  RunConfig copy = cfg;
  Writer w;
  visit(w, copy);
  return w.j;
}

std::string replace_seed(const std::string& pattern, std::uint64_t seed) {
  std::string out = pattern;
  const std::string token = "{seed}";
  for (auto pos = out.find(token); pos != std::string::npos; pos = out.find(token)) {
    out.replace(pos, token.size(), std::to_string(seed));
  }
  return out;
}

std::unique_ptr<Policy> make_policy(Method m, const RunConfig& cfg, const EnvConfig& env,
                                    const SacAgent<float>* agent) {
  std::unique_ptr<Policy> p;
  switch (m) {
    case Method::heuristic: return std::make_unique<HeuristicPolicy>(env);
    case Method::random: p = std::make_unique<RandomPolicy>(); break;
    case Method::sac: p = std::make_unique<AgentPolicy>(*agent); break;
  }
  if (cfg.macro_switch) p = std::make_unique<MacroSwitchPolicy>(std::move(p), env);
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
  if (!f) throw IoError("cannot write " + path);
}

}  // namespace

void RunConfig::validate() const {
  env.validate();
  agent.validate();
  check_compatible(representation, encoder);
  if (trajectory_modes.empty() || splits.empty() || methods.empty()) {
    throw ConfigError("trajectory_modes, splits and methods must be non-empty");
  }
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  if (template_points < 1) throw ConfigError("template_points must be >= 1");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  for (Index l : ablate_template_points) {
    if (l < 1) throw ConfigError("ablate_template_points entries must be >= 1");
  }
  for (const auto& name : ablate_variants) {
    if (name != "full" && name != "gp_to_kp" && name != "ggn_to_pn") {
      throw ConfigError("unknown ablation variant: " + name);
    }
  }
}

EnvConfig RunConfig::env_for(TrajectoryMode mode, ObjectSplit split) const {
  EnvConfig e = env;
  e.trajectory.mode = mode;
  e.split = split;
  return e;
}

TrainConfig RunConfig::train_config(std::uint64_t seed) const {
  TrainConfig t;
  t.env = env_for(trajectory_modes.front(), splits.front());
  t.agent = agent;
  t.seed = seed;
  t.out_dir = output_dir.empty() ? "" : output_dir + "/seed_" + std::to_string(seed);
  t.checkpoint_every = checkpoint_every;
  return t;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Reader r(j, "");
  visit(r, c);
  r.finish();
  sync(c);
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::stringstream s;
  s << f.rdbuf();
  return parse_run_config(s.str());
}

std::string resolved_config_json(const RunConfig& cfg) { return resolved(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : resolved(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void summarize(ReportRow& row) {
  const double n = static_cast<double>(row.per_seed.size());
  row.success_mean = 0.0;
  for (double v : row.per_seed) row.success_mean += v / n;
  row.success_std.reset();
  if (row.per_seed.size() >= 2) {
    double ss = 0.0;
    for (double v : row.per_seed) ss += (v - row.success_mean) * (v - row.success_mean);
    row.success_std = std::sqrt(ss / (n - 1.0));
  }
}

std::string render_records(const BenchmarkReport& report) {
  std::ostringstream out;
  out << json{{"record", "header"}, {"kind", report.kind}, {"config_hash", report.config_hash}, {"seeds", report.seeds}}
             .dump()
      << '\n';
  for (const auto& r : report.rows) {
    json j{{"record", "cell"},
           {"trajectory", r.trajectory},
           {"split", r.split},
           {"method", r.method},
           {"success_mean", r.success_mean},
           {"success_std", r.success_std ? json(*r.success_std) : json(nullptr)},
           {"per_seed", r.per_seed},
           {"episodes", r.episodes},
           {"mean_steps_to_success", r.mean_steps_to_success}};
    if (r.template_points) j["template_points"] = r.template_points;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string render_table(const BenchmarkReport& report) {
  std::ostringstream out;
  out << report.kind << " report  config " << report.config_hash << "  seeds";
  for (auto s : report.seeds) out << ' ' << s;
  out << '\n';
  out << std::left << std::setw(12) << "trajectory" << std::setw(9) << "split" << std::setw(12) << "method"
      << std::setw(5) << "L" << std::setw(18) << "success" << std::setw(10) << "episodes"
      << "steps-to-success\n";
  for (const auto& r : report.rows) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(3) << r.success_mean;
    if (r.success_std) cell << " +- " << *r.success_std;
    out << std::left << std::setw(12) << r.trajectory << std::setw(9) << r.split << std::setw(12) << r.method
        << std::setw(5) << (r.template_points ? std::to_string(r.template_points) : "-") << std::setw(18)
        << cell.str() << std::setw(10) << r.episodes << std::fixed << std::setprecision(1)
        << r.mean_steps_to_success << '\n';
  }
  return out.str();
}

BenchmarkReport run_eval(const RunConfig& cfg, const std::string& checkpoint) {
  BenchmarkReport report{"eval", config_hash(cfg), cfg.seeds, {}};
  for (TrajectoryMode mode : cfg.trajectory_modes) {
    for (ObjectSplit split : cfg.splits) {
      const EnvConfig env = cfg.env_for(mode, split);
      for (Method m : cfg.methods) {
        ReportRow row;
        row.trajectory = to_string(mode);
        row.split = to_string(split);
        row.method = to_string(m);
        row.episodes = cfg.eval_episodes;
        double steps = 0.0;
        int successes = 0;
        for (std::uint64_t seed : cfg.seeds) {
          std::unique_ptr<SacAgent<float>> agent;
          if (m == Method::sac) {
            agent = std::make_unique<SacAgent<float>>(cfg.agent, seed);
            if (!checkpoint.empty()) load_agent(*agent, replace_seed(checkpoint, seed));
          }
          auto policy = make_policy(m, cfg, env, agent.get());
          const EvalResult r = evaluate_policy(env, *policy, cfg.eval_episodes, seed);
          row.per_seed.push_back(r.success_rate());
          steps += r.mean_steps_to_success * r.successes;
          successes += r.successes;
        }
        row.mean_steps_to_success = successes ? steps / successes : 0.0;
        summarize(row);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

BenchmarkReport run_ablation(const RunConfig& cfg, std::ostream& log) {
  BenchmarkReport report{"ablate", config_hash(cfg), cfg.seeds, {}};
  struct Variant {
    const char* name;
    Representation rep;
    nets::EncoderKind enc;
  };
  const Variant variants[] = {{"full", Representation::gaussian_points, nets::EncoderKind::ggn},
                              {"gp_to_kp", Representation::keypoints, nets::EncoderKind::ggn},
                              {"ggn_to_pn", Representation::gaussian_points, nets::EncoderKind::pn_flat}};
  const TrajectoryMode mode = cfg.trajectory_modes.front();
  const ObjectSplit split = cfg.splits.front();
  for (const Variant& v : variants) {
    if (std::find(cfg.ablate_variants.begin(), cfg.ablate_variants.end(), v.name) == cfg.ablate_variants.end()) {
      continue;
    }
    for (Index l : cfg.ablate_template_points) {
      RunConfig c = cfg;
      c.representation = v.rep;
      c.encoder = v.enc;
      c.template_points = l;
      c.methods = {Method::sac};
      c.output_dir = cfg.output_dir + "/ablate/" + v.name + "_L" + std::to_string(l);
      sync(c);
      ReportRow row;
      row.trajectory = to_string(mode);
      row.split = to_string(split);
      row.method = v.name;
      row.template_points = l;
      row.episodes = c.eval_episodes;
      double steps = 0.0;
      int successes = 0;
      for (std::uint64_t seed : c.seeds) {
        SacAgent<float> agent(c.agent, seed);
        train(c.train_config(seed), agent);
        auto policy = make_policy(Method::sac, c, c.env_for(mode, split), &agent);
        const EvalResult r = evaluate_policy(c.env_for(mode, split), *policy, c.eval_episodes, seed);
        row.per_seed.push_back(r.success_rate());
        steps += r.mean_steps_to_success * r.successes;
        successes += r.successes;
        log << v.name << " L=" << l << " seed " << seed << " success " << r.success_rate() << std::endl;
      }
      row.mean_steps_to_success = successes ? steps / successes : 0.0;
      summarize(row);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir + "/config.resolved.json", resolved_config_json(cfg));
  for (std::uint64_t seed : cfg.seeds) {
    const TrainConfig tc = cfg.train_config(seed);
    SacAgent<float> agent(tc.agent, seed);
    double window = 0.0;
    int count = 0, successes = 0;
    const TrainResult r = train(tc, agent, [&](const EpisodeRecord& e) {
      window += e.episode_return;
      successes += e.success ? 1 : 0;
      if (++count == 50) {
        out << "seed " << seed << " episode " << e.episode + 1 << " steps " << e.env_steps << " mean return "
            << window / count << " successes " << successes << "/" << count << std::endl;
        window = 0.0;
        count = successes = 0;
      }
    });
    out << "seed " << seed << " done: " << r.env_steps << " steps, " << r.updates << " updates, checkpoint "
        << tc.out_dir << "/checkpoint.bin" << std::endl;
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const std::string& checkpoint, std::ostream& out) {
  const BenchmarkReport report = run_eval(cfg, checkpoint);
  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir + "/eval_report.jsonl", render_records(report));
  write_text(cfg.output_dir + "/eval_report.txt", render_table(report));
  out << render_table(report);
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  const BenchmarkReport report = run_ablation(cfg, out);
  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir + "/ablate_report.jsonl", render_records(report));
  write_text(cfg.output_dir + "/ablate_report.txt", render_table(report));
  out << render_table(report);
  return kExitOk;
}

int cmd_selfcheck(std::ostream& out) {
  bool all = true;
  for (const auto& r : testing::run_selfcheck(0)) {
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(30) << r.name << std::fixed
        << std::setprecision(2) << std::setw(8) << r.seconds << r.detail << '\n';
    all = all && r.passed;
  }
  out << (all ? "selfcheck passed" : "selfcheck FAILED") << std::endl;
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_trace(const RunConfig& cfg, const std::string& checkpoint, std::uint64_t episode_seed, std::ostream& out) {
  const EnvConfig env = cfg.env_for(cfg.trajectory_modes.front(), cfg.splits.front());
  const Method m = cfg.methods.front();
  std::unique_ptr<SacAgent<float>> agent;
  if (m == Method::sac) {
    agent = std::make_unique<SacAgent<float>>(cfg.agent, cfg.seeds.front());
    if (!checkpoint.empty()) load_agent(*agent, replace_seed(checkpoint, cfg.seeds.front()));
  }
  auto policy = make_policy(m, cfg, env, agent.get());
  DynGraspEnv e(env);
  std::filesystem::create_directories(cfg.output_dir);
  const std::string path = cfg.output_dir + "/trace_" + std::to_string(episode_seed) + ".jsonl";
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  const auto pose = [](const Posed& p) {
    const auto s = serialize_pose(p);
    return std::vector<double>(s.begin(), s.end());
  };
  const EpisodeOutcome o = run_episode(e, *policy, episode_seed, [&](const TraceRecord& t) {
    f << json{{"step", t.step},
              {"object_pose", pose(t.object_pose)},
              {"gripper_pose", pose(t.ee_pose)},
              {"grasp_count", t.grasp_count},
              {"reward", {{"approach", t.reward.approach},
                          {"grasp", t.reward.grasp},
                          {"lift", t.reward.lift},
                          {"visibility", t.reward.visibility},
                          {"total", t.reward.total()}}},
              {"stages", {{"approached", t.stages.approached}, {"grasped", t.stages.grasped}, {"lifted", t.stages.lifted}}},
              {"done", t.done}}
             .dump()
      << '\n';
  });
  out << "trace " << path << ": " << o.steps << " steps, return " << o.episode_return
      << (o.success ? ", success" : ", no success") << std::endl;
  return kExitOk;
}

}  // namespace dyngrasp
