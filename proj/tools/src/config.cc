#include "anchorrefine/cli/config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::cli {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return v;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

std::vector<double> ParseList(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(ParseNumber<double>(key, Trim(item)));
  }
  return out;
}

std::string JoinRect(const planarsim::Rect& r) {
  return FormatDouble(r.x0) + "," + FormatDouble(r.y0) + "," +
         FormatDouble(r.x1) + "," + FormatDouble(r.y1);
}

planarsim::Rect ParseRect(const std::string& key, const std::string& text) {
  const std::vector<double> v = ParseList(key, text);
  if (v.size() != 4) throw ConfigError(key + " needs x0,y0,x1,y1");
  return {v[0], v[1], v[2], v[3]};
}

struct KeyDef {
  std::string name;
  bool hashed;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define AR_DOUBLE_KEY(NAME, FIELD)                                    \
  KeyDef {                                                            \
    NAME, true, [](const RunConfig& c) { return FormatDouble(c.FIELD); }, \
        [](RunConfig& c, const std::string& v) {                      \
          c.FIELD = ParseNumber<double>(NAME, v);                     \
        }                                                             \
  }
#define AR_INT_KEY(NAME, FIELD, TYPE)                                     \
  KeyDef {                                                                \
    NAME, true, [](const RunConfig& c) { return std::to_string(c.FIELD); }, \
        [](RunConfig& c, const std::string& v) {                          \
          c.FIELD = ParseNumber<TYPE>(NAME, v);                           \
        }                                                                 \
  }

const std::vector<KeyDef>& Keys() {
  static const std::vector<KeyDef> keys = {
      AR_DOUBLE_KEY("task.grasp_radius", task.grasp_radius),
      AR_DOUBLE_KEY("task.goal_radius", task.goal_radius),
      AR_DOUBLE_KEY("task.max_step_len", task.max_step_len),
      AR_DOUBLE_KEY("task.max_turn", task.max_turn),
      AR_INT_KEY("task.max_steps", task.max_steps, int),
      {"task.obj_spawn", true,
       [](const RunConfig& c) { return JoinRect(c.task.obj_spawn); },
       [](RunConfig& c, const std::string& v) {
         c.task.obj_spawn = ParseRect("task.obj_spawn", v);
       }},
      {"task.goal_spawn", true,
       [](const RunConfig& c) { return JoinRect(c.task.goal_spawn); },
       [](RunConfig& c, const std::string& v) {
         c.task.goal_spawn = ParseRect("task.goal_spawn", v);
       }},
      AR_INT_KEY("task.task_id", task.task_id, int),
      AR_INT_KEY("task.num_tasks", task.num_tasks, int),
      AR_INT_KEY("data.seed", data_seed, uint64_t),
      AR_INT_KEY("data.n_episodes", n_episodes, int),
      AR_DOUBLE_KEY("data.jitter_std", jitter_std),
      AR_INT_KEY("train.seed", train.seed, uint64_t),
      AR_INT_KEY("train.horizon", train.horizon, int),
      AR_INT_KEY("train.latent_dim", train.latent_dim, int),
      {"train.hidden_widths", true,
       [](const RunConfig& c) {
         std::string s;
         for (size_t i = 0; i < c.train.hidden_widths.size(); ++i) {
           if (i) s += ",";
           s += std::to_string(c.train.hidden_widths[i]);
         }
         return s;
       },
       [](RunConfig& c, const std::string& v) {
         c.train.hidden_widths.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           c.train.hidden_widths.push_back(
               ParseNumber<int>("train.hidden_widths", Trim(item)));
         }
       }},
      {"train.activation", true,
       [](const RunConfig& c) {
         return std::string(c.train.activation == diffnet::Activation::kTanh
                                ? "tanh"
                                : "relu");
       },
       [](RunConfig& c, const std::string& v) {
         if (v == "tanh") {
           c.train.activation = diffnet::Activation::kTanh;
         } else if (v == "relu") {
           c.train.activation = diffnet::Activation::kRelu;
         } else {
           throw ConfigError("train.activation must be tanh or relu");
         }
       }},
      AR_DOUBLE_KEY("train.epsilon", train.epsilon),
      AR_DOUBLE_KEY("train.lambda_grip", train.lambda_grip),
      AR_INT_KEY("train.phase1_steps", train.phase1_steps, int),
      AR_INT_KEY("train.phase2_steps", train.phase2_steps, int),
      AR_INT_KEY("train.batch_size", train.batch_size, int),
      AR_DOUBLE_KEY("train.learning_rate", train.learning_rate),
      {"train.variant", true,
       [](const RunConfig& c) {
         return std::string(pipeline::VariantName(c.train.variant));
       },
       [](RunConfig& c, const std::string& v) {
         c.train.variant = pipeline::ParseVariant(v);
       }},
      {"train.joint_detach", true,
       [](const RunConfig& c) {
         return std::string(c.train.joint_detach ? "true" : "false");
       },
       [](RunConfig& c, const std::string& v) {
         c.train.joint_detach = ParseBool("train.joint_detach", v);
       }},
      AR_INT_KEY("eval.eval_seeds", eval_seeds, int),
      AR_INT_KEY("eval.execute_k", execute_k, int),
      AR_INT_KEY("eval.profile_window", profile_window, int),
      AR_INT_KEY("eval.smoothing_window", smoothing_window, int),
      {"run.output_dir", false,
       [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"run.dataset_path", false,
       [](const RunConfig& c) { return c.dataset_path; },
       [](RunConfig& c, const std::string& v) { c.dataset_path = v; }},
      {"run.emit_svg", false,
       [](const RunConfig& c) {
         return std::string(c.emit_svg ? "true" : "false");
       },
       [](RunConfig& c, const std::string& v) {
         c.emit_svg = ParseBool("run.emit_svg", v);
       }},
  };
  return keys;
}

#undef AR_DOUBLE_KEY
#undef AR_INT_KEY

}  // namespace

void RunConfig::Validate() {
  task.Validate();
  if (n_episodes < 1) throw ConfigError("data.n_episodes must be >= 1");
  if (!(jitter_std >= 0.0)) throw ConfigError("data.jitter_std must be >= 0");
  if (eval_seeds < 1) throw ConfigError("eval.eval_seeds must be >= 1");
  if (execute_k < 0) throw ConfigError("eval.execute_k must be >= 0");
  if (profile_window < 1) throw ConfigError("eval.profile_window must be >= 1");
  if (smoothing_window < 1) {
    throw ConfigError("eval.smoothing_window must be >= 1");
  }
  train.arm_width = planarsim::kArmWidth;
  train.context_dim = planarsim::ContextDim(task.num_tasks);
  train.Validate();
}

void SetKey(RunConfig& config, const std::string& key,
            const std::string& value) {
  for (const KeyDef& k : Keys()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void ApplyConfigText(const std::string& text, RunConfig& config) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "bad section header");
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    // Outside a section, keys are fully qualified (config.resolved form).
    const std::string key = Trim(line.substr(0, eq));
    if (section.empty() && key.find('.') == std::string::npos) {
      throw ConfigError(where + "key outside a section");
    }
    try {
      SetKey(config, section.empty() ? key : section + "." + key,
             Trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

RunConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig config;
  ApplyConfigText(ss.str(), config);
  return config;
}

std::vector<std::pair<std::string, std::string>> CanonicalEntries(
    const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const KeyDef& k : Keys()) out.emplace_back(k.name, k.get(config));
  std::sort(out.begin(), out.end());
  return out;
}

std::string CanonicalText(const RunConfig& config) {
  std::vector<std::string> lines;
  for (const KeyDef& k : Keys()) {
    if (k.hashed) lines.push_back(k.name + "=" + k.get(config) + "\n");
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

uint64_t ConfigHash(const RunConfig& config) {
  return Fnv1a64(CanonicalText(config));
}

std::string ResolveOutputDir(const RunConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
    return root;
  }
  return "runs";
}

}  // namespace anchorrefine::cli
