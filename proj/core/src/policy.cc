#include <utility>
#include <vector>

#include "anchorrefine/core/errors.h"
#include "anchorrefine/evalanalysis/evalanalysis.h"

namespace anchorrefine::evalanalysis {

ChunkPolicy MakeModelPolicy(const pipeline::Architecture& arch,
                            const diffnet::ParamStore& params,
                            pipeline::InferenceMode mode) {
  return [&arch, &params, mode](const planarsim::WorldState& state,
                                const planarsim::TaskSpec& task) {
    std::vector<double> ctx = planarsim::ContextVector(state, task);
    return pipeline::Predict(arch, params, mode, ctx);
  };
}

ChunkPolicy MakeExpertPolicy(int horizon) {
  AR_EXPECT(horizon >= 1, "horizon must be >= 1");
  return [horizon](const planarsim::WorldState& state,
                   const planarsim::TaskSpec& task) {
    core::ActionChunk chunk;
    chunk.arm.resize(horizon, planarsim::kArmWidth);
    chunk.grip.resize(horizon);
    planarsim::WorldState s = state;
    for (int h = 0; h < horizon; ++h) {
      const planarsim::StepAction a = planarsim::ExpertAction(s, task).action;
      for (int d = 0; d < planarsim::kArmWidth; ++d) chunk.arm(h, d) = a.arm[d];
      chunk.grip[h] = a.grip;
      s = planarsim::ApplyAction(task, s, a);
    }
    return chunk;
  };
}

ChunkPolicy MakeZeroPolicy(int horizon) {
  AR_EXPECT(horizon >= 1, "horizon must be >= 1");
  return [horizon](const planarsim::WorldState&, const planarsim::TaskSpec&) {
    core::ActionChunk chunk;
    chunk.arm = core::ArmChunk::Zero(horizon, planarsim::kArmWidth);
    chunk.grip.assign(horizon, 0);
    return chunk;
  };
}

}  // namespace anchorrefine::evalanalysis
