#include <benchmark/benchmark.h>

#include "anchorrefine/diffnet/approximator.h"
#include "anchorrefine/diffnet/optimizer.h"
#include "anchorrefine/evalanalysis/evalanalysis.h"
#include "anchorrefine/pipeline/pipeline.h"
#include "anchorrefine/planarsim/dataset.h"

namespace ar = anchorrefine;
using Eigen::MatrixXd;

namespace {

struct Net {
  ar::pipeline::Architecture arch;
  ar::diffnet::ParamStore params;
  MatrixXd inputs;

  explicit Net(int batch) {
    ar::pipeline::TrainConfig c;
    arch = ar::pipeline::MakeArchitecture(c);
    params = ar::pipeline::MakeParamStore(arch);
    ar::diffnet::InitParams(arch.anchor, params, 1);
    inputs = MatrixXd::Random(c.context_dim, batch);
  }
};

void BM_AnchorForward(benchmark::State& state) {
  Net net(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto f = ar::diffnet::Forward(net.arch.anchor, net.params, net.inputs);
    benchmark::DoNotOptimize(f.arm.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnchorForward)->Arg(1)->Arg(64);

void BM_AnchorForwardBackward(benchmark::State& state) {
  Net net(static_cast<int>(state.range(0)));
  const MatrixXd d_arm = MatrixXd::Ones(net.arch.arm_dim(), state.range(0));
  const MatrixXd d_grip = MatrixXd::Ones(net.arch.horizon, state.range(0));
  for (auto _ : state) {
    net.params.ZeroGrad();
    auto f = ar::diffnet::Forward(net.arch.anchor, net.params, net.inputs);
    ar::diffnet::Backward(net.arch.anchor, net.params, f.tape, d_arm, d_grip);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnchorForwardBackward)->Arg(64);

const ar::planarsim::Dataset& Data() {
  static const ar::planarsim::Dataset ds = [] {
    ar::planarsim::GenerateOptions o;
    o.n_episodes = 50;
    o.jitter_std = 0.15;
    return ar::planarsim::GenerateDataset(ar::planarsim::TaskSpec{}, o);
  }();
  return ds;
}

// Phase-1 steps per iteration, default widths and batch size.
void BM_Phase1Steps(benchmark::State& state) {
  ar::pipeline::TrainConfig c;
  c.phase1_steps = static_cast<int>(state.range(0));
  const auto arch = ar::pipeline::MakeArchitecture(c);
  for (auto _ : state) {
    ar::diffnet::ParamStore p;
    ar::pipeline::TrainPhase1(c, arch, Data().samples, p);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Phase1Steps)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ExpertRollout(benchmark::State& state) {
  const ar::planarsim::TaskSpec task;
  const auto policy = ar::evalanalysis::MakeExpertPolicy(8);
  uint64_t seed = 0;
  for (auto _ : state) {
    auto r = ar::evalanalysis::Rollout(policy, task, seed++);
    benchmark::DoNotOptimize(r.steps_used);
  }
}
BENCHMARK(BM_ExpertRollout);

void BM_ModelRollout(benchmark::State& state) {
  Net net(1);
  const ar::planarsim::TaskSpec task;
  const auto policy = ar::evalanalysis::MakeModelPolicy(
      net.arch, net.params, ar::pipeline::InferenceMode::kAnchorOnly);
  uint64_t seed = 0;
  for (auto _ : state) {
    auto r = ar::evalanalysis::Rollout(policy, task, seed++);
    benchmark::DoNotOptimize(r.steps_used);
  }
}
BENCHMARK(BM_ModelRollout)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
