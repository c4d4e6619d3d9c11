#include "anchorrefine/planarsim/planarsim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"

namespace anchorrefine::planarsim {

namespace {

constexpr uint64_t kResetStream = 0x5245534554ULL;   // "RESET"
constexpr uint64_t kJitterStream = 0x4a49545445ULL;  // "JITTE"

bool RectInsideWorkspace(const Rect& r) {
  return r.x0 >= 0.0 && r.y0 >= 0.0 && r.x1 <= 1.0 && r.y1 <= 1.0 &&
         r.x0 <= r.x1 && r.y0 <= r.y1;
}

Vec2 Sample(const Rect& r, CounterRng& rng) {
  const double x = rng.Uniform(r.x0, r.x1);
  const double y = rng.Uniform(r.y0, r.y1);
  return {x, y};
}

double ToUnitRange(double p) { return 2.0 * p - 1.0; }

}  // namespace

double Distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void TaskSpec::Validate() const {
  AR_EXPECT(grasp_radius > 0.0 && goal_radius > 0.0, "radii must be positive");
  AR_EXPECT(max_step_len > 0.0 && max_turn > 0.0,
            "step scales must be positive");
  AR_EXPECT(max_steps >= 1, "max_steps must be >= 1");
  AR_EXPECT(RectInsideWorkspace(obj_spawn) && RectInsideWorkspace(goal_spawn),
            "spawn regions must lie inside the unit workspace");
  AR_EXPECT(num_tasks >= 1 && task_id >= 0 && task_id < num_tasks,
            "task_id out of range");
}

std::string_view OutcomeName(OutcomeTag tag) {
  switch (tag) {
    case OutcomeTag::kSuccess: return "Success";
    case OutcomeTag::kGripCloseMiss: return "GripCloseMiss";
    case OutcomeTag::kGripEarlyRelease: return "GripEarlyRelease";
    case OutcomeTag::kGripNeverClosed: return "GripNeverClosed";
    case OutcomeTag::kArmNeverReached: return "ArmNeverReached";
    case OutcomeTag::kTimeout: return "Timeout";
  }
  return "Timeout";
}

OutcomeTag ParseOutcome(std::string_view name) {
  for (OutcomeTag tag : kAllOutcomes) {
    if (OutcomeName(tag) == name) return tag;
  }
  throw ConfigError("unknown outcome tag '" + std::string(name) + "'");
}

bool IsGripperFailure(OutcomeTag tag) {
  return tag == OutcomeTag::kGripCloseMiss ||
         tag == OutcomeTag::kGripEarlyRelease ||
         tag == OutcomeTag::kGripNeverClosed;
}

std::vector<double> ToObservation(const WorldState& s) {
  return {s.ee.x,  s.ee.y,  s.heading, static_cast<double>(s.gripper),
          s.held ? 1.0 : 0.0,       s.obj.x,  s.obj.y,
          s.goal.x, s.goal.y, static_cast<double>(s.step_index)};
}

WorldState FromObservation(const std::vector<double>& obs) {
  AR_EXPECT(obs.size() == kObservationDim, "observation has wrong length");
  WorldState s;
  s.ee = {obs[0], obs[1]};
  s.heading = obs[2];
  s.gripper = obs[3] != 0.0 ? 1 : 0;
  s.held = obs[4] != 0.0;
  s.obj = {obs[5], obs[6]};
  s.goal = {obs[7], obs[8]};
  s.step_index = static_cast<int>(obs[9]);
  return s;
}

void WriteContext(const WorldState& s, const TaskSpec& task, double* out) {
  out[0] = ToUnitRange(s.ee.x);
  out[1] = ToUnitRange(s.ee.y);
  out[2] = std::sin(s.heading);
  out[3] = std::cos(s.heading);
  out[4] = s.gripper;
  out[5] = s.held ? 1.0 : 0.0;
  out[6] = ToUnitRange(s.obj.x);
  out[7] = ToUnitRange(s.obj.y);
  out[8] = ToUnitRange(s.goal.x);
  out[9] = ToUnitRange(s.goal.y);
  for (int i = 0; i < task.num_tasks; ++i) {
    out[kSceneContextDim + i] = i == task.task_id ? 1.0 : 0.0;
  }
}

std::vector<double> ContextVector(const WorldState& s, const TaskSpec& task) {
  std::vector<double> out(ContextDim(task.num_tasks));
  WriteContext(s, task, out.data());
  return out;
}

double WrapAngle(double a) {
  constexpr double kPi = std::numbers::pi;
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

WorldState Reset(const TaskSpec& task, uint64_t seed) {
  task.Validate();
  CounterRng rng(seed, kResetStream);
  WorldState s;
  s.ee = kHome;
  s.heading = 0.0;
  s.obj = Sample(task.obj_spawn, rng);
  s.goal = Sample(task.goal_spawn, rng);
  return s;
}

WorldState ApplyAction(const TaskSpec& task, const WorldState& state,
                       const StepAction& action, StepEvents* events) {
  for (double a : action.arm) AR_EXPECT(std::isfinite(a), "non-finite action");
  AR_EXPECT(action.grip == 0 || action.grip == 1, "grip command must be 0/1");

  StepEvents ev;
  WorldState next = state;
  const double dx = std::clamp(action.arm[0], -1.0, 1.0) * task.max_step_len;
  const double dy = std::clamp(action.arm[1], -1.0, 1.0) * task.max_step_len;
  const double dth = std::clamp(action.arm[2], -1.0, 1.0) * task.max_turn;
  next.ee.x = std::clamp(state.ee.x + dx, 0.0, 1.0);
  next.ee.y = std::clamp(state.ee.y + dy, 0.0, 1.0);
  next.heading = WrapAngle(state.heading + dth);
  if (next.held) next.obj = next.ee;

  if (action.grip == 1 && state.gripper == 0) {
    next.gripper = 1;
    if (Distance(next.ee, next.obj) <= task.grasp_radius) {
      next.held = true;
      next.obj = next.ee;
      ev.grasped = true;
    } else {
      ev.close_miss = true;
    }
  } else if (action.grip == 0 && state.gripper == 1) {
    next.gripper = 0;
    if (state.held) {
      next.held = false;
      next.obj = next.ee;
      ev.released = true;
      if (Distance(next.obj, next.goal) <= task.goal_radius) {
        ev.success = true;
      } else {
        ev.early_release = true;
      }
    }
  }
  ++next.step_index;
  if (events != nullptr) *events = ev;
  return next;
}

bool IsTerminated(const Episode& episode, const TaskSpec& task) {
  if (episode.observations.empty()) return false;
  if (FromObservation(episode.observations.back()).step_index >=
      task.max_steps) {
    return true;
  }
  for (size_t k = 0; k + 1 < episode.observations.size(); ++k) {
    const WorldState prev = FromObservation(episode.observations[k]);
    const WorldState next = FromObservation(episode.observations[k + 1]);
    if (prev.held && !next.held &&
        Distance(next.obj, next.goal) <= task.goal_radius) {
      return true;
    }
  }
  return false;
}

OutcomeTag ClassifyOutcome(const Episode& episode, const TaskSpec& task) {
  AR_EXPECT(episode.observations.size() == episode.actions.size() + 1,
            "observations must outnumber actions by one");
  AR_EXPECT(IsTerminated(episode, task), "episode has not terminated");

  bool success = false, close_miss = false, early_release = false;
  bool ever_closed = false, ever_reached = false;
  for (size_t k = 0; k < episode.observations.size(); ++k) {
    const WorldState s = FromObservation(episode.observations[k]);
    if (Distance(s.ee, s.obj) <= task.grasp_radius) ever_reached = true;
    if (k == 0) continue;
    const WorldState prev = FromObservation(episode.observations[k - 1]);
    if (s.gripper == 1) ever_closed = true;
    if (prev.gripper == 0 && s.gripper == 1 && !s.held) close_miss = true;
    if (prev.held && !s.held) {
      if (Distance(s.obj, s.goal) <= task.goal_radius) {
        success = true;
      } else {
        early_release = true;
      }
    }
  }
  if (success) return OutcomeTag::kSuccess;
  if (close_miss) return OutcomeTag::kGripCloseMiss;
  if (early_release) return OutcomeTag::kGripEarlyRelease;
  if (!ever_closed && ever_reached) return OutcomeTag::kGripNeverClosed;
  if (!ever_reached) return OutcomeTag::kArmNeverReached;
  return OutcomeTag::kTimeout;
}

Simulator::Simulator(TaskSpec task) : task_(std::move(task)) {
  task_.Validate();
}

const WorldState& Simulator::Reset(uint64_t seed) {
  state_ = planarsim::Reset(task_, seed);
  episode_ = Episode{};
  episode_.seed = seed;
  episode_.task_id = task_.task_id;
  episode_.observations.push_back(ToObservation(state_));
  done_ = false;
  last_grip_cmd_ = state_.gripper;
  return state_;
}

StepResult Simulator::Step(const StepAction& action) {
  AR_EXPECT(!done_, "step called on a finished episode");
  AR_EXPECT(!episode_.observations.empty(), "step called before reset");
  StepResult result;
  state_ = ApplyAction(task_, state_, action, &result.events);
  if (action.grip != last_grip_cmd_) {
    episode_.gripper_switch_steps.push_back(
        static_cast<int>(episode_.actions.size()));
    last_grip_cmd_ = action.grip;
  }
  episode_.actions.push_back(action);
  episode_.observations.push_back(ToObservation(state_));
  done_ = result.events.success || state_.step_index >= task_.max_steps;
  result.state = state_;
  result.done = done_;
  if (done_) {
    episode_.outcome = ClassifyOutcome(episode_, task_);
    result.outcome = episode_.outcome;
  }
  return result;
}

ExpertDecision ExpertAction(const WorldState& state, const TaskSpec& task) {
  ExpertDecision out;
  const Vec2 target = state.held ? state.goal : state.obj;
  const double ddx = target.x - state.ee.x;
  const double ddy = target.y - state.ee.y;
  const double dist = std::hypot(ddx, ddy);

  const double step = std::min(task.max_step_len, kExpertGain * dist);
  out.transport = kExpertGain * dist > task.max_step_len;
  if (dist > 0.0) {
    out.action.arm[0] = step * ddx / dist / task.max_step_len;
    out.action.arm[1] = step * ddy / dist / task.max_step_len;
  }
  if (step > 1e-9) {
    const double err = WrapAngle(std::atan2(ddy, ddx) - state.heading);
    out.action.arm[2] = std::clamp(err / task.max_turn, -1.0, 1.0);
  }

  if (state.held) {
    out.action.grip = dist <= 0.5 * task.goal_radius ? 0 : 1;
  } else if (state.gripper == 1) {
    out.action.grip = 0;  // reopen after a missed close
  } else {
    out.action.grip = dist <= 0.5 * task.grasp_radius ? 1 : 0;
  }
  return out;
}

Episode RunExpert(const TaskSpec& task, uint64_t seed, double jitter_std) {
  AR_EXPECT(jitter_std >= 0.0, "jitter_std must be non-negative");
  Simulator sim(task);
  sim.Reset(seed);
  CounterRng jitter(seed, kJitterStream);
  while (!sim.done()) {
    ExpertDecision d = ExpertAction(sim.state(), task);
    if (d.transport && jitter_std > 0.0) {
      for (double& a : d.action.arm) {
        a = std::clamp(a + jitter_std * jitter.Normal(), -1.0, 1.0);
      }
    }
    sim.Step(d.action);
  }
  return sim.episode();
}

}  // namespace anchorrefine::planarsim
