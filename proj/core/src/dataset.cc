#include "anchorrefine/planarsim/dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::planarsim {

namespace {

using nlohmann::json;

json RectToJson(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect RectFromJson(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
          j.at(3).get<double>()};
}

json TaskToJson(const TaskSpec& t) {
  return json{{"grasp_radius", t.grasp_radius},
              {"goal_radius", t.goal_radius},
              {"max_step_len", t.max_step_len},
              {"max_turn", t.max_turn},
              {"max_steps", t.max_steps},
              {"obj_spawn", RectToJson(t.obj_spawn)},
              {"goal_spawn", RectToJson(t.goal_spawn)},
              {"task_id", t.task_id},
              {"num_tasks", t.num_tasks}};
}

TaskSpec TaskFromJson(const json& j) {
  TaskSpec t;
  t.grasp_radius = j.at("grasp_radius").get<double>();
  t.goal_radius = j.at("goal_radius").get<double>();
  t.max_step_len = j.at("max_step_len").get<double>();
  t.max_turn = j.at("max_turn").get<double>();
  t.max_steps = j.at("max_steps").get<int>();
  t.obj_spawn = RectFromJson(j.at("obj_spawn"));
  t.goal_spawn = RectFromJson(j.at("goal_spawn"));
  t.task_id = j.at("task_id").get<int>();
  t.num_tasks = j.at("num_tasks").get<int>();
  return t;
}

}  // namespace

core::ArmChunk SampleSet::Arm(int sample) const {
  core::ArmChunk arm(horizon, arm_width);
  for (int h = 0; h < horizon; ++h) {
    for (int d = 0; d < arm_width; ++d) {
      arm(h, d) = arm_targets(h * arm_width + d, sample);
    }
  }
  return arm;
}

core::ActionChunk SampleSet::Chunk(int sample) const {
  core::ActionChunk chunk;
  chunk.arm = Arm(sample);
  chunk.grip.resize(horizon);
  for (int h = 0; h < horizon; ++h) chunk.grip[h] = grip_labels(h, sample);
  return chunk;
}

SampleSet SampleSet::Select(const std::vector<int>& samples) const {
  SampleSet out;
  out.horizon = horizon;
  out.arm_width = arm_width;
  const auto n = static_cast<Eigen::Index>(samples.size());
  out.contexts.resize(contexts.rows(), n);
  out.arm_targets.resize(arm_targets.rows(), n);
  out.grip_labels.resize(grip_labels.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = samples[i];
    out.contexts.col(i) = contexts.col(s);
    out.arm_targets.col(i) = arm_targets.col(s);
    out.grip_labels.col(i) = grip_labels.col(s);
    out.episode_index.push_back(episode_index[s]);
    out.step_index.push_back(step_index[s]);
  }
  return out;
}

SampleSet BuildSamples(const std::vector<Episode>& episodes,
                       const TaskSpec& task, int horizon) {
  AR_EXPECT(horizon >= 1, "horizon must be >= 1");
  int total = 0;
  for (const Episode& e : episodes) {
    AR_EXPECT(!e.actions.empty(), "episode without actions");
    total += static_cast<int>(e.actions.size());
  }
  SampleSet set;
  set.horizon = horizon;
  set.arm_width = kArmWidth;
  set.contexts.resize(ContextDim(task.num_tasks), total);
  set.arm_targets.resize(horizon * kArmWidth, total);
  set.grip_labels.resize(horizon, total);

  TaskSpec ctx_task = task;
  int col = 0;
  for (size_t ei = 0; ei < episodes.size(); ++ei) {
    const Episode& e = episodes[ei];
    ctx_task.task_id = e.task_id;
    const int steps = static_cast<int>(e.actions.size());
    for (int t = 0; t < steps; ++t, ++col) {
      WriteContext(FromObservation(e.observations[t]), ctx_task,
                   set.contexts.col(col).data());
      for (int h = 0; h < horizon; ++h) {
        const StepAction& a = e.actions[std::min(t + h, steps - 1)];
        for (int d = 0; d < kArmWidth; ++d) {
          set.arm_targets(h * kArmWidth + d, col) = a.arm[d];
        }
        set.grip_labels(h, col) = a.grip;
      }
      set.episode_index.push_back(static_cast<int>(ei));
      set.step_index.push_back(t);
    }
  }
  return set;
}

Dataset GenerateDataset(const TaskSpec& task, const GenerateOptions& options) {
  AR_EXPECT(options.n_episodes >= 1, "n_episodes must be >= 1");
  AR_EXPECT(options.jitter_std >= 0.0, "jitter_std must be non-negative");
  task.Validate();

  Dataset ds;
  ds.horizon = options.horizon;
  ds.task = task;
  const int max_attempts = 4 * options.n_episodes;
  int attempts = 0;
  int successes = 0;
  while (successes < options.n_episodes && attempts < max_attempts) {
    Episode e = RunExpert(task, options.seed + static_cast<uint64_t>(attempts),
                          options.jitter_std);
    ++attempts;
    if (e.outcome == OutcomeTag::kSuccess) {
      ds.episodes.push_back(std::move(e));
      ++successes;
    }
  }
  if (successes < options.n_episodes || 2 * successes < attempts) {
    throw ConfigError("expert solved only " + std::to_string(successes) +
                      " of " + std::to_string(attempts) +
                      " attempts; task is not solvable by the expert");
  }
  ds.samples = BuildSamples(ds.episodes, task, options.horizon);
  return ds;
}

std::string SerializeDataset(const Dataset& dataset) {
  std::string out;
  json header{
      {"format_version", kDatasetFormatVersion},
      {"H", dataset.horizon},
      {"D_arm", kArmWidth},
      {"context_dim", ContextDim(dataset.task.num_tasks)},
      {"num_tasks", dataset.task.num_tasks},
      {"normalization",
       {{"position_scale", 2.0},
        {"position_offset", -1.0},
        {"max_step_len", dataset.task.max_step_len},
        {"max_turn", dataset.task.max_turn}}},
      {"config_hash", HashToHex(dataset.config_hash)},
      {"n_episodes", dataset.episodes.size()},
      {"task", TaskToJson(dataset.task)}};
  out += header.dump();
  out += '\n';
  for (const Episode& e : dataset.episodes) {
    json actions = json::array();
    for (const StepAction& a : e.actions) {
      actions.push_back({a.arm[0], a.arm[1], a.arm[2], a.grip});
    }
    json line{{"seed", e.seed},
              {"task_id", e.task_id},
              {"observations", e.observations},
              {"actions", std::move(actions)},
              {"outcome", std::string(OutcomeName(e.outcome))},
              {"gripper_switch_steps", e.gripper_switch_steps}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

void WriteDataset(const std::string& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write dataset " + path);
  out << SerializeDataset(dataset);
  if (!out) throw ConfigError("failed writing dataset " + path);
}

Dataset ParseDataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  try {
    if (!std::getline(in, line)) throw ConfigError("dataset: empty file");
    const json header = json::parse(line);
    if (header.at("format_version").get<int>() != kDatasetFormatVersion) {
      throw ConfigError("dataset: unsupported format version");
    }
    if (header.at("D_arm").get<int>() != kArmWidth) {
      throw ConfigError("dataset: D_arm must be 3");
    }
    ds.horizon = header.at("H").get<int>();
    ds.task = TaskFromJson(header.at("task"));
    ds.config_hash = HexToHash(header.at("config_hash").get<std::string>());
    if (header.at("context_dim").get<int>() != ContextDim(ds.task.num_tasks)) {
      throw ConfigError("dataset: context_dim inconsistent with num_tasks");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      Episode e;
      e.seed = j.at("seed").get<uint64_t>();
      e.task_id = j.at("task_id").get<int>();
      e.observations = j.at("observations").get<std::vector<std::vector<double>>>();
      for (const json& a : j.at("actions")) {
        StepAction sa;
        for (int d = 0; d < kArmWidth; ++d) sa.arm[d] = a.at(d).get<double>();
        sa.grip = a.at(kArmWidth).get<int>();
        e.actions.push_back(sa);
      }
      e.outcome = ParseOutcome(j.at("outcome").get<std::string>());
      e.gripper_switch_steps = j.at("gripper_switch_steps").get<std::vector<int>>();
      if (e.observations.size() != e.actions.size() + 1) {
        throw ConfigError("dataset: observation/action count mismatch");
      }
      ds.episodes.push_back(std::move(e));
    }
    if (header.at("n_episodes").get<size_t>() != ds.episodes.size()) {
      throw ConfigError("dataset: episode count does not match header");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset: malformed record: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("dataset: invalid record: ") + e.what());
  }
  ds.samples = BuildSamples(ds.episodes, ds.task, ds.horizon);
  return ds;
}

Dataset ReadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseDataset(ss.str());
}

}  // namespace anchorrefine::planarsim
