#ifndef ANCHORREFINE_PLANARSIM_PLANARSIM_H_
#define ANCHORREFINE_PLANARSIM_PLANARSIM_H_

// Deterministic planar pick-and-place world: a point end-effector with a
// heading and a binary gripper, one object, one goal, unit-square
// workspace. Pure kinematics.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anchorrefine::planarsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

double Distance(Vec2 a, Vec2 b);

// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

inline constexpr int kArmWidth = 3;  // dx, dy, dtheta
inline constexpr Vec2 kHome{0.5, 0.1};

struct TaskSpec {
  double grasp_radius = 0.02;
  double goal_radius = 0.03;
  double max_step_len = 0.08;  // meters per unit of normalized dx/dy
  double max_turn = 0.4;       // radians per unit of normalized dtheta
  int max_steps = 120;
  Rect obj_spawn{0.10, 0.40, 0.45, 0.90};
  Rect goal_spawn{0.55, 0.40, 0.90, 0.90};
  int task_id = 0;
  int num_tasks = 1;

  void Validate() const;
};

struct WorldState {
  Vec2 ee = kHome;
  double heading = 0.0;  // (-pi, pi]
  int gripper = 0;       // 0 open, 1 closed
  bool held = false;
  Vec2 obj;
  Vec2 goal;
  int step_index = 0;

  bool operator==(const WorldState&) const = default;
};

struct StepAction {
  std::array<double, kArmWidth> arm{};  // normalized, each in [-1, 1]
  int grip = 0;                         // commanded gripper state

  bool operator==(const StepAction&) const = default;
};

// What happened during a single step.
struct StepEvents {
  bool grasped = false;
  bool close_miss = false;  // closed with the object out of reach
  bool released = false;
  bool early_release = false;  // released outside the goal radius
  bool success = false;        // released within the goal radius
};

enum class OutcomeTag {
  kSuccess,
  kGripCloseMiss,
  kGripEarlyRelease,
  kGripNeverClosed,
  kArmNeverReached,
  kTimeout,
};

inline constexpr std::array<OutcomeTag, 6> kAllOutcomes = {
    OutcomeTag::kSuccess,         OutcomeTag::kGripCloseMiss,
    OutcomeTag::kGripEarlyRelease, OutcomeTag::kGripNeverClosed,
    OutcomeTag::kArmNeverReached, OutcomeTag::kTimeout};

std::string_view OutcomeName(OutcomeTag tag);
OutcomeTag ParseOutcome(std::string_view name);
bool IsGripperFailure(OutcomeTag tag);

// Raw observation layout, enough to reconstruct a WorldState exactly.
inline constexpr int kObservationDim = 10;
std::vector<double> ToObservation(const WorldState& s);
WorldState FromObservation(const std::vector<double>& obs);

// Policy context: [ee_x, ee_y, sin h, cos h, gripper, held, obj_x, obj_y,
// goal_x, goal_y, task one-hot], positions mapped from [0, 1] to [-1, 1].
inline constexpr int kSceneContextDim = 10;
inline int ContextDim(int num_tasks) { return kSceneContextDim + num_tasks; }
std::vector<double> ContextVector(const WorldState& s, const TaskSpec& task);
void WriteContext(const WorldState& s, const TaskSpec& task, double* out);

double WrapAngle(double a);

WorldState Reset(const TaskSpec& task, uint64_t seed);

// Pure kinematic transition. The arm moves first (clamped to the
// workspace), then the gripper command is applied at the new position.
// Throws ContractViolation on a non-finite action or non-binary grip.
WorldState ApplyAction(const TaskSpec& task, const WorldState& state,
                       const StepAction& action, StepEvents* events = nullptr);

struct Episode {
  uint64_t seed = 0;
  int task_id = 0;
  std::vector<std::vector<double>> observations;  // actions.size() + 1
  std::vector<StepAction> actions;
  OutcomeTag outcome = OutcomeTag::kTimeout;
  std::vector<int> gripper_switch_steps;
};

// Whether the recorded trace has terminated (success or step budget used).
bool IsTerminated(const Episode& episode, const TaskSpec& task);

// Derives the outcome from the recorded trace. Precedence:
// Success > GripCloseMiss > GripEarlyRelease > GripNeverClosed >
// ArmNeverReached > Timeout. GripNeverClosed requires that the end-effector
// came within grasp_radius at some point. Throws on a non-terminated trace.
OutcomeTag ClassifyOutcome(const Episode& episode, const TaskSpec& task);

struct StepResult {
  WorldState state;
  StepEvents events;
  bool done = false;
  std::optional<OutcomeTag> outcome;  // set when done
};

// Stateful wrapper that records the episode as it runs.
class Simulator {
 public:
  explicit Simulator(TaskSpec task);

  const WorldState& Reset(uint64_t seed);
  StepResult Step(const StepAction& action);

  const WorldState& state() const { return state_; }
  const TaskSpec& task() const { return task_; }
  const Episode& episode() const { return episode_; }
  bool done() const { return done_; }

 private:
  TaskSpec task_;
  WorldState state_;
  Episode episode_;
  bool done_ = false;
  int last_grip_cmd_ = 0;
};

// Scripted coarse-to-fine expert: proportional reaching with step length
// min(max_step_len, k * distance), close within half the grasp radius,
// release within half the goal radius.
struct ExpertDecision {
  StepAction action;
  bool transport = false;  // arm step saturated at max_step_len
};
inline constexpr double kExpertGain = 1.0;
ExpertDecision ExpertAction(const WorldState& state, const TaskSpec& task);

// Runs the expert from Reset(seed). Gaussian noise with jitter_std is added
// to the normalized arm action on transport steps only.
Episode RunExpert(const TaskSpec& task, uint64_t seed, double jitter_std);

}  // namespace anchorrefine::planarsim

#endif  // ANCHORREFINE_PLANARSIM_PLANARSIM_H_
