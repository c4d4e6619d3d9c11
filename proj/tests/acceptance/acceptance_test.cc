// Acceptance run: one PASS/FAIL line per criterion, exit status nonzero if
// any gating criterion fails. Criterion 9 is reported but never gates.
//
// Trained models are shared across criteria: the Full runs of criterion 6
// also feed the freeze check (4), the decision-accuracy comparison (7) and
// the loss-dynamics comparison (9).

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "anchorrefine/cli/commands.h"
#include "anchorrefine/cli/config.h"
#include "anchorrefine/core/action.h"
#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"
#include "anchorrefine/diffnet/grad_check.h"
#include "anchorrefine/evalanalysis/evalanalysis.h"
#include "anchorrefine/pipeline/pipeline.h"
#include "anchorrefine/planarsim/dataset.h"

namespace ar = anchorrefine;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using ar::pipeline::Architecture;
using ar::pipeline::InferenceMode;
using ar::pipeline::TrainConfig;
using ar::pipeline::Variant;

namespace {

struct Verdict {
  int id = 0;
  bool pass = false;
  bool gating = true;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Verdict> g_verdicts;

void Report(Verdict v) {
  std::printf("criterion %d: %s%s | %s | %.1f s\n", v.id,
              v.pass ? "PASS" : "FAIL", v.gating ? "" : " (report-gated)",
              v.detail.c_str(), v.seconds);
  std::fflush(stdout);
  g_verdicts.push_back(std::move(v));
}

void Log(const std::string& s) {
  std::printf("  %s\n", s.c_str());
  std::fflush(stdout);
}

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

ar::cli::RunConfig DefaultRun() {
  ar::cli::RunConfig c;
  c.Validate();
  return c;
}

MatrixXd Uniform(int rows, int cols, uint64_t seed, double lo = -1.0,
                 double hi = 1.0) {
  ar::CounterRng rng(seed);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.Uniform(lo, hi);
  return m;
}

// ---------------------------------------------------------------------------

void Criterion1() {
  Timer t;
  int cases = 0, decided = 0, fired = 0, exact = 0, bounded = 0;
  const double ulp_half = std::nextafter(0.5, 1.0) - 0.5;
  for (double eps : {1e-6, 0.05, 0.3}) {
    for (int gt = 0; gt <= 1; ++gt) {
      for (int k = 1; k <= 999; ++k) {
        const double q = k / 1000.0;
        const double r = ar::core::GripperCorrectionTarget(gt, q, eps);
        ++cases;
        if (ar::core::GripperDecide(q, r) == gt) ++decided;
        if (ar::core::GripperDirection(gt, q) == ar::core::GripDirection::kNone) {
          continue;
        }
        ++fired;
        const double margin = std::abs(q + r - 0.5);
        if (margin == eps) ++exact;
        if (std::abs(margin - eps) <= 2 * ulp_half) ++bounded;
      }
    }
  }
  const bool pass = cases == 5994 && decided == cases && exact == fired &&
                    t.Seconds() < 1.0;
  Report({1, pass, true,
          fmt::format("decision == gt {}/{}; margin == eps exactly {}/{}; "
                      "margin within 2 ulp(0.5) {}/{}",
                      decided, cases, exact, fired, bounded, fired),
          t.Seconds()});
}

// ---------------------------------------------------------------------------

double MseLoss(const MatrixXd& out, const MatrixXd& target, MatrixXd* d) {
  const double n = static_cast<double>(out.size());
  if (d) *d = 2.0 * (out - target) / n;
  return (out - target).squaredNorm() / n;
}

// Targets sit within 0.1 of the initial outputs, the scale of the residuals
// the refine branches are trained on. With O(1) residuals the loss value
// itself is O(1) and its rounding divided by h swamps gradients below 1e-7.
MatrixXd Near(const MatrixXd& out, uint64_t seed) {
  return out + Uniform(static_cast<int>(out.rows()),
                       static_cast<int>(out.cols()), seed, -0.1, 0.1);
}

void Criterion2() {
  Timer t;
  const ar::cli::RunConfig run = DefaultRun();
  const int batch = 2;
  double worst = 0.0;
  std::string worst_where;
  int64_t checked = 0;
  // Variants share most specs; each distinct spec is checked once.
  std::map<std::string, std::string> seen;
  auto first_time = [&](const ar::diffnet::ApproximatorSpec& spec,
                        const std::string& what) {
    std::string key = fmt::format(
        "{}|{}|{}|{}|{}|{}|{}", spec.prefix, spec.input_dim, spec.arm_dim,
        spec.grip_dim, spec.latent_dim, static_cast<int>(spec.activation),
        static_cast<int>(spec.grip_output));
    for (int w : spec.hidden_widths) key += "," + std::to_string(w);
    const auto [it, inserted] = seen.emplace(key, what);
    if (!inserted) Log(fmt::format("{}: same spec as {}", what, it->second));
    return inserted;
  };
  auto note = [&](const std::string& what,
                  const ar::diffnet::GradCheckReport& rep) {
    checked += rep.checked;
    Log(fmt::format("grad check {}: {} scalars, max rel err {:.3e}", what,
                    rep.checked, rep.max_relative_error));
    if (rep.max_relative_error >= worst) {
      worst = rep.max_relative_error;
      worst_where = what + ":" + rep.worst_parameter;
    }
  };
  auto mse_both = [](const MatrixXd& ta, const MatrixXd& tg) {
    return [&ta, &tg](const ar::diffnet::ForwardResult& f, MatrixXd* da,
                      MatrixXd* dg) {
      double loss = 0.0;
      if (ta.size()) {
        loss += MseLoss(f.arm, ta, da);
      } else if (da) {
        *da = MatrixXd();
      }
      if (tg.size()) {
        loss += MseLoss(f.grip, tg, dg);
      } else if (dg) {
        *dg = MatrixXd();
      }
      return loss;
    };
  };

  for (Variant v : ar::pipeline::kAllVariants) {
    for (auto act : {ar::diffnet::Activation::kTanh,
                     ar::diffnet::Activation::kRelu}) {
      TrainConfig c = run.train;
      c.variant = v;
      c.activation = act;
      const Architecture arch = ar::pipeline::MakeArchitecture(c);
      ar::diffnet::ParamStore p = ar::pipeline::MakeParamStore(arch);
      ar::diffnet::InitParams(arch.anchor, p, 101);
      if (arch.refine_arm) ar::diffnet::InitParams(*arch.refine_arm, p, 102);
      if (arch.refine_grip) ar::diffnet::InitParams(*arch.refine_grip, p, 103);
      const std::string tag =
          fmt::format("{}/{}", ar::pipeline::VariantName(v),
                      act == ar::diffnet::Activation::kTanh ? "tanh" : "relu");
      const MatrixXd x = Uniform(c.context_dim, batch, 7);

      const auto f_anchor = ar::diffnet::Forward(arch.anchor, p, x);
      const MatrixXd anchor_ta = Near(f_anchor.arm, 8);
      const MatrixXd anchor_tg = Near(f_anchor.grip, 9);
      if (first_time(arch.anchor, tag + " anchor")) {
        note(tag + " anchor",
             ar::diffnet::GradCheck(arch.anchor, p, x,
                                    mse_both(anchor_ta, anchor_tg)));
      }
      if (v == Variant::kFull && act == ar::diffnet::Activation::kTanh) {
        // Informational: the phase-1 training loss (arm MSE + mean BCE)
        // against O(1) targets.
        const MatrixXd arm_t = Uniform(arch.arm_dim(), batch, 8);
        const MatrixXd labels =
            Uniform(c.horizon, batch, 9, 0.0, 1.0).unaryExpr([](double u) {
              return u > 0.5 ? 1.0 : 0.0;
            });
        const auto rep = ar::diffnet::GradCheck(
            arch.anchor, p, x,
            [&](const ar::diffnet::ForwardResult& f, MatrixXd* da,
                MatrixXd* dg) {
              double loss = MseLoss(f.arm, arm_t, da);
              const double n = static_cast<double>(f.grip.size());
              for (Eigen::Index i = 0; i < f.grip.size(); ++i) {
                const double z = f.grip(i);
                loss += (ar::core::Softplus(z) - labels(i) * z) / n;
              }
              if (dg) {
                *dg = (f.grip.unaryExpr(
                           [](double z) { return ar::core::Sigmoid(z); }) -
                       labels) /
                      n;
              }
              return loss;
            });
        Log(fmt::format("(info, not gated) {} anchor, phase-1 loss on O(1) "
                        "targets: max rel err {:.3e} at {}[{}]",
                        tag, rep.max_relative_error, rep.worst_parameter,
                        rep.worst_index));
      }
      if (!arch.has_refine()) continue;

      const ar::pipeline::AnchorOutputs anc =
          ar::pipeline::RunAnchor(arch, p, x);
      const MatrixXd rin = ar::pipeline::RefineInputs(arch, x, anc);
      const MatrixXd none;
      const MatrixXd refine_ta =
          Near(ar::diffnet::Forward(*arch.refine_arm, p, rin).arm, 10);
      if (first_time(*arch.refine_arm, tag + " refine.arm")) {
        note(tag + " refine.arm",
             ar::diffnet::GradCheck(*arch.refine_arm, p, rin,
                                    mse_both(refine_ta, none)));
      }
      if (arch.refine_grip && first_time(*arch.refine_grip, tag + " refine.grip")) {
        const MatrixXd refine_tg =
            Near(ar::diffnet::Forward(*arch.refine_grip, p, rin).grip, 11);
        note(tag + " refine.grip",
             ar::diffnet::GradCheck(*arch.refine_grip, p, rin,
                                    mse_both(none, refine_tg)));
      }
      if (v == Variant::kNoDetach) {
        // Joint objective: anchor and refine arm trained through the
        // undetached residual target A - anchor(x).
        ar::diffnet::ParamStore q = p;
        for (const auto& name : q.Names("refine.grip")) q.At(name).frozen = true;
        const MatrixXd joint_t =
            Near(f_anchor.arm + ar::diffnet::Forward(*arch.refine_arm, q, x).arm,
                 12);
        note(tag + " joint",
             ar::diffnet::GradCheck(
                 q, [&](ar::diffnet::ParamStore& s, bool grads) {
                   const auto fa = ar::diffnet::Forward(arch.anchor, s, x);
                   const auto fr =
                       ar::diffnet::Forward(*arch.refine_arm, s, x);
                   MatrixXd d;
                   const double loss =
                       MseLoss(fr.arm, joint_t - fa.arm, grads ? &d : nullptr);
                   if (grads) {
                     ar::diffnet::Backward(*arch.refine_arm, s, fr.tape, d,
                                           MatrixXd());
                     ar::diffnet::Backward(arch.anchor, s, fa.tape, d,
                                           MatrixXd());
                   }
                   return loss;
                 }));
      }
    }
  }
  Report({2, worst < 1e-4 && t.Seconds() < 30.0, true,
          fmt::format("max relative error {:.3e} at {} over {} scalars "
                      "(h = 1e-5)",
                      worst, worst_where, checked),
          t.Seconds()});
}

// ---------------------------------------------------------------------------

void Criterion3(const ar::planarsim::SampleSet& data) {
  Timer t;
  const TrainConfig c = DefaultRun().train;
  const Architecture arch = ar::pipeline::MakeArchitecture(c);
  // Per scalar, with the grad-check denominator max(|a|, |b|, 1e-8).
  double worst = 0.0, worst_unfloored = 0.0, worst_tensor = 0.0;
  int64_t compared = 0;
  for (uint64_t inst = 0; inst < 100; ++inst) {
    ar::diffnet::ParamStore a = ar::pipeline::MakeParamStore(arch);
    ar::diffnet::InitParams(arch.anchor, a, 1000 + inst);
    ar::diffnet::InitParams(*arch.refine_arm, a, 2000 + inst);
    a.Freeze("anchor.");
    ar::CounterRng rng(3000 + inst);
    std::vector<int> idx;
    for (int i = 0; i < 16; ++i) {
      idx.push_back(static_cast<int>(rng.Below(uint64_t(data.size()))));
    }
    const ar::planarsim::SampleSet batch = data.Select(idx);
    const ar::pipeline::ResidualBatch rb =
        ar::pipeline::MakeResidualBatch(c, arch, a, batch);
    ar::diffnet::ParamStore b = a;
    const double n = static_cast<double>(rb.arm_target.size());

    // Residual space: || R - (A - anchor) ||^2.
    const auto fa = ar::diffnet::Forward(*arch.refine_arm, a, rb.refine_inputs);
    ar::diffnet::Backward(*arch.refine_arm, a, fa.tape,
                          2.0 * (fa.arm - rb.arm_target) / n, MatrixXd());
    // Composed action space: || (anchor + R) - A ||^2.
    const auto fb = ar::diffnet::Forward(*arch.refine_arm, b, rb.refine_inputs);
    ar::diffnet::Backward(
        *arch.refine_arm, b, fb.tape,
        2.0 * (rb.anchor.arm + fb.arm - batch.arm_targets) / n, MatrixXd());

    for (const auto& name : a.Names("refine.arm.")) {
      const auto& ga = a.At(name).grad;
      const auto& gb = b.At(name).grad;
      worst_tensor = std::max(worst_tensor,
                              (ga - gb).norm() / std::max(ga.norm(), 1e-300));
      for (Eigen::Index i = 0; i < ga.size(); ++i) {
        const double scale = std::max(std::abs(ga[i]), std::abs(gb[i]));
        const double diff = std::abs(ga[i] - gb[i]);
        worst = std::max(worst, diff / std::max(scale, 1e-8));
        if (scale > 0.0) worst_unfloored = std::max(worst_unfloored, diff / scale);
        ++compared;
      }
    }
  }
  Report({3, worst <= 1e-10 && t.Seconds() < 10.0, true,
          fmt::format("max per-scalar relative difference {:.3e} over {} "
                      "gradients, 100 instances (without the 1e-8 floor "
                      "{:.3e}; per tensor {:.3e})",
                      worst, compared, worst_unfloored, worst_tensor),
          t.Seconds()});
}

// ---------------------------------------------------------------------------

struct SeedRun {
  uint64_t seed = 0;
  ar::diffnet::ParamStore anchor;  // after phase 1
  ar::diffnet::ParamStore full;
  ar::diffnet::ParamStore naive;
  ar::pipeline::LossLog full_phase2;
  double anchor_sr = 0.0;
  double full_sr = 0.0;
  double naive_sr = 0.0;
  ar::evalanalysis::TransitionCounts transitions;
  double full_acc = 0.0;
  double naive_acc = 0.0;
  double anchor_acc = 0.0;
};

struct FreezeAudit {
  int checks = 0;
  int mismatches = 0;
  int steps = 0;
};

void Criterion4(const FreezeAudit& audit, double seconds) {
  const bool pass =
      audit.steps >= 8000 && audit.mismatches == 0 && audit.checks >= 8;
  Report({4, pass, true,
          fmt::format("{} phase-2 steps, {} hash+byte checks, {} mismatches",
                      audit.steps, audit.checks, audit.mismatches),
          seconds});
}

void Criterion5(const Architecture& arch, const ar::diffnet::ParamStore& p,
                const ar::planarsim::SampleSet& data, int n_episodes,
                double seconds) {
  Timer t;
  const auto s = ar::evalanalysis::ResidualStatsFor(arch, p, data);
  const double nr = s.mean_norm_res / s.mean_norm_raw;
  const double cr = s.cov_trace_res / s.cov_trace_raw;
  Report({5, nr < 0.5 && cr < 0.5 && n_episodes >= 200, true,
          fmt::format("norm ratio {:.4f}, cov-trace ratio {:.4f} "
                      "({} episodes, {} samples)",
                      nr, cr, n_episodes, s.n_samples),
          seconds + t.Seconds()});
}

// ---------------------------------------------------------------------------

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Criterion8(const ar::planarsim::TaskSpec& task) {
  Timer t;
  std::vector<std::string> problems;

  int expert_ok = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    const auto ep = ar::planarsim::RunExpert(task, seed, 0.0);
    if (ep.outcome == ar::planarsim::OutcomeTag::kSuccess) ++expert_ok;
  }
  if (expert_ok != 1000) problems.push_back("expert");

  // Open-loop replay of recorded (serialized, then parsed) demonstrations.
  ar::planarsim::GenerateOptions go;
  go.n_episodes = 50;
  go.seed = 0;
  go.jitter_std = 0.15;
  const ar::planarsim::Dataset ds = ar::planarsim::ParseDataset(
      ar::planarsim::SerializeDataset(ar::planarsim::GenerateDataset(task, go)));
  double worst_replay = 0.0;
  for (const auto& ep : ds.episodes) {
    ar::planarsim::WorldState s = ar::planarsim::Reset(task, ep.seed);
    for (size_t i = 0; i < ep.actions.size(); ++i) {
      s = ar::planarsim::ApplyAction(task, s, ep.actions[i]);
      const auto obs = ar::planarsim::ToObservation(s);
      for (size_t j = 0; j < obs.size(); ++j) {
        worst_replay =
            std::max(worst_replay, std::abs(obs[j] - ep.observations[i + 1][j]));
      }
    }
  }
  if (!(worst_replay <= 1e-12)) problems.push_back("replay");

  // Two end-to-end tool runs into separate directories.
  const fs::path root = fs::temp_directory_path() /
                        ("anchorrefine_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "run.cfg";
  std::ofstream(cfg) << "[data]\nn_episodes = 40\n"
                        "[train]\nphase1_steps = 2000\nphase2_steps = 1000\n"
                        "[eval]\neval_seeds = 50\n";
  const std::vector<std::string> files = {
      "dataset.jsonl",   "anchor.ckpt",     "refine.ckpt",
      "phase1_loss.csv", "phase2_loss.csv", "eval_report.json",
      "eval_outcomes.csv", "config.resolved"};
  bool cli_ok = true;
  for (const char* run : {"a", "b"}) {
    const std::string out = (root / run).string();
    const std::string anchor = out + "/anchor.ckpt";
    const std::string refine = out + "/refine.ckpt";
    const std::vector<std::vector<std::string>> steps = {
        {"gen-data"},
        {"train", "--phase", "1"},
        {"train", "--phase", "2", "--anchor", anchor},
        {"eval", "--anchor", anchor, "--refine", refine}};
    for (auto args : steps) {
      args.insert(args.begin(), "anchorrefine");
      args.insert(args.end(), {"--config", cfg.string(), "--output", out});
      std::ostringstream o, e;
      const int rc = ar::cli::RunCli(args, o, e);
      if (rc != 0) {
        Log(fmt::format("run {} '{}' exited {}: {}", run, args[1], rc, e.str()));
        cli_ok = false;
      }
    }
  }
  int identical = 0;
  for (const auto& f : files) {
    const std::string a = Slurp(root / "a" / f), b = Slurp(root / "b" / f);
    if (!a.empty() && a == b) {
      ++identical;
    } else {
      Log("differs or missing: " + f);
    }
  }
  fs::remove_all(root);
  if (!cli_ok || identical != static_cast<int>(files.size())) {
    problems.push_back("determinism");
  }

  Report({8, problems.empty(), true,
          fmt::format("expert {}/1000; replay max |diff| {:.3e} over {} "
                      "episodes; {}/{} artifacts byte-identical across two "
                      "end-to-end runs",
                      expert_ok, worst_replay, ds.episodes.size(), identical,
                      files.size()),
          t.Seconds()});
}

// ---------------------------------------------------------------------------

std::optional<int64_t> Crossing20(const ar::pipeline::LossLog& log, int window) {
  const std::vector<double> v = log.Totals();
  return ar::evalanalysis::AnalyzeCurve(v, window).crossings[1];
}

int Finish(const Timer& total) {
  std::sort(g_verdicts.begin(), g_verdicts.end(),
            [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int gating_failures = 0;
  std::printf("summary:");
  for (const auto& v : g_verdicts) {
    std::printf(" %d=%s", v.id, v.pass ? "PASS" : "FAIL");
    if (v.gating && !v.pass) ++gating_failures;
  }
  std::printf(" | %.0f s total\n", total.Seconds());
  return gating_failures == 0 ? 0 : 1;
}

}  // namespace

// Usage: acceptance_test [criterion ...]; no arguments runs all nine.
int main(int argc, char** argv) {
  Timer total;
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  auto want = [&](std::initializer_list<int> ids) {
    if (wanted.empty()) return true;
    for (int id : ids) {
      if (std::find(wanted.begin(), wanted.end(), id) != wanted.end()) {
        return true;
      }
    }
    return false;
  };
  const ar::cli::RunConfig run = DefaultRun();
  const ar::planarsim::TaskSpec& task = run.task;

  if (want({1})) Criterion1();
  if (want({2})) Criterion2();
  if (want({8})) Criterion8(task);
  if (!want({3, 4, 5, 6, 7, 9})) return Finish(total);

  Timer data_timer;
  ar::planarsim::GenerateOptions go;
  go.n_episodes = run.n_episodes;
  go.seed = run.data_seed;
  go.jitter_std = run.jitter_std;
  const ar::planarsim::Dataset data = ar::planarsim::GenerateDataset(task, go);
  // Held out: demonstrations from a disjoint seed range.
  ar::planarsim::GenerateOptions ho = go;
  ho.seed = run.data_seed + 1'000'000;
  ho.n_episodes = 100;
  const ar::planarsim::Dataset held_out = ar::planarsim::GenerateDataset(task, ho);
  Log(fmt::format("dataset: {} episodes, {} samples; held-out {} samples "
                  "({:.1f} s)",
                  data.episodes.size(), data.samples.size(),
                  held_out.samples.size(), data_timer.Seconds()));

  if (want({3})) Criterion3(data.samples);
  if (!want({4, 5, 6, 7, 9})) return Finish(total);

  // Shared training for criteria 4-7 and 9.
  constexpr int kSeeds = 10;
  constexpr int kLossSeeds = 5;
  const std::vector<uint64_t> eval_seeds = ar::evalanalysis::EvalSeeds(200);
  TrainConfig full_cfg = run.train;
  full_cfg.variant = Variant::kFull;
  TrainConfig naive_cfg = run.train;
  naive_cfg.variant = Variant::kNaiveGripMSE;
  const Architecture full_arch = ar::pipeline::MakeArchitecture(full_cfg);
  const Architecture naive_arch = ar::pipeline::MakeArchitecture(naive_cfg);

  std::vector<SeedRun> runs;
  FreezeAudit audit;
  double freeze_seconds = 0.0, phase1_seed0_seconds = 0.0;
  Timer train_timer;
  for (int i = 0; i < kSeeds; ++i) {
    SeedRun r;
    r.seed = static_cast<uint64_t>(i);
    full_cfg.seed = naive_cfg.seed = r.seed;
    Timer p1;
    ar::pipeline::TrainPhase1(full_cfg, full_arch, data.samples, r.anchor);
    if (i == 0) phase1_seed0_seconds = p1.Seconds();

    r.full = r.anchor;
    ar::pipeline::StepCallback audit_cb;
    std::vector<double> frozen_snapshot;
    const uint64_t anchor_hash = r.anchor.Fingerprint("anchor.");
    for (const auto& name : r.anchor.Names("anchor.")) {
      const auto& v = r.anchor.At(name).value;
      frozen_snapshot.insert(frozen_snapshot.end(), v.data(), v.data() + v.size());
    }
    if (i == 0) {
      audit_cb = [&](int64_t step, const ar::diffnet::ParamStore& p) {
        audit.steps = static_cast<int>(step);
        if (step % 1000 != 0) return;
        ++audit.checks;
        std::vector<double> now;
        for (const auto& name : p.Names("anchor.")) {
          const auto& v = p.At(name).value;
          now.insert(now.end(), v.data(), v.data() + v.size());
        }
        const bool same_bytes =
            now.size() == frozen_snapshot.size() &&
            std::memcmp(now.data(), frozen_snapshot.data(),
                        now.size() * sizeof(double)) == 0;
        if (p.Fingerprint("anchor.") != anchor_hash || !same_bytes) {
          ++audit.mismatches;
        }
      };
    }
    Timer p2;
    r.full_phase2 = ar::pipeline::TrainPhase2(full_cfg, full_arch, data.samples,
                                              r.full, audit_cb);
    if (i == 0) freeze_seconds = p2.Seconds();
    r.naive = r.anchor;
    ar::pipeline::TrainPhase2(naive_cfg, naive_arch, data.samples, r.naive);

    using ar::evalanalysis::MakeModelPolicy;
    const auto anchor_res = ar::evalanalysis::RolloutAll(
        MakeModelPolicy(full_arch, r.full, InferenceMode::kAnchorOnly), task,
        eval_seeds);
    const auto full_res = ar::evalanalysis::RolloutAll(
        MakeModelPolicy(full_arch, r.full, InferenceMode::kFull), task,
        eval_seeds);
    const auto naive_res = ar::evalanalysis::RolloutAll(
        MakeModelPolicy(naive_arch, r.naive, InferenceMode::kFull), task,
        eval_seeds);
    r.anchor_sr = ar::evalanalysis::Summarize(anchor_res).success_rate;
    r.full_sr = ar::evalanalysis::Summarize(full_res).success_rate;
    r.naive_sr = ar::evalanalysis::Summarize(naive_res).success_rate;
    std::vector<ar::planarsim::OutcomeTag> a, f;
    for (const auto& x : anchor_res) a.push_back(x.outcome);
    for (const auto& x : full_res) f.push_back(x.outcome);
    r.transitions = ar::evalanalysis::TallyTransitions(a, f);
    r.full_acc = ar::evalanalysis::GripperDecisionAccuracy(
        full_arch, r.full, InferenceMode::kFull, held_out.samples);
    r.naive_acc = ar::evalanalysis::GripperDecisionAccuracy(
        naive_arch, r.naive, InferenceMode::kFull, held_out.samples);
    r.anchor_acc = ar::evalanalysis::GripperDecisionAccuracy(
        full_arch, r.full, InferenceMode::kAnchorOnly, held_out.samples);
    Log(fmt::format(
        "seed {}: success anchor {:.3f} full {:.3f} naive {:.3f}; fs {} sf {}; "
        "grip acc anchor {:.4f} full {:.4f} naive {:.4f} ({:.0f} s elapsed)",
        i, r.anchor_sr, r.full_sr, r.naive_sr, r.transitions.fs,
        r.transitions.sf, r.anchor_acc, r.full_acc, r.naive_acc,
        train_timer.Seconds()));
    runs.push_back(std::move(r));
    if (i == 0) {
      Criterion4(audit, freeze_seconds);
      Criterion5(full_arch, runs[0].full, data.samples,
                 static_cast<int>(data.episodes.size()), phase1_seed0_seconds);
    }
  }

  {
    ar::evalanalysis::TransitionCounts tc;
    double anchor_sr = 0.0, full_sr = 0.0;
    for (const auto& r : runs) {
      tc += r.transitions;
      anchor_sr += r.anchor_sr / kSeeds;
      full_sr += r.full_sr / kSeeds;
    }
    Report({6, tc.fs > tc.sf && full_sr >= anchor_sr - 0.02, true,
            fmt::format("fs {} vs sf {} (ss {}, ff {}); mean success full "
                        "{:.4f} vs anchor-only {:.4f}",
                        tc.fs, tc.sf, tc.ss, tc.ff, full_sr, anchor_sr),
            train_timer.Seconds()});
  }
  {
    double full_acc = 0.0, naive_acc = 0.0, full_sr = 0.0, naive_sr = 0.0;
    for (const auto& r : runs) {
      full_acc += r.full_acc / kSeeds;
      naive_acc += r.naive_acc / kSeeds;
      full_sr += r.full_sr / kSeeds;
      naive_sr += r.naive_sr / kSeeds;
    }
    Report({7, full_acc >= naive_acc - 0.02, true,
            fmt::format("held-out gripper decision accuracy full {:.4f} vs "
                        "naive {:.4f}; success (not asserted) full {:.4f}, "
                        "naive {:.4f}",
                        full_acc, naive_acc, full_sr, naive_sr),
            0.0});
  }

  {
    Timer t;
    TrainConfig deep_cfg = run.train;
    deep_cfg.variant = Variant::kAnchorOnlyDeep;
    const Architecture deep_arch = ar::pipeline::MakeArchitecture(deep_cfg);
    const int window = run.smoothing_window;
    double refine_sum = 0.0, deep_sum = 0.0;
    int censored = 0;
    for (int i = 0; i < kLossSeeds; ++i) {
      deep_cfg.seed = static_cast<uint64_t>(i);
      ar::diffnet::ParamStore p;
      const auto deep_log =
          ar::pipeline::TrainPhase1(deep_cfg, deep_arch, data.samples, p);
      const auto rc = Crossing20(runs[i].full_phase2, window);
      const auto dc = Crossing20(deep_log, window);
      censored += !rc + !dc;
      const double rs = rc ? double(*rc) : double(runs[i].full_phase2.records.size());
      const double ds = dc ? double(*dc) : double(deep_log.records.size());
      refine_sum += rs / kLossSeeds;
      deep_sum += ds / kLossSeeds;
      Log(fmt::format("seed {}: 20% crossing refine {} deep {}", i,
                      rc ? std::to_string(*rc) : "never",
                      dc ? std::to_string(*dc) : "never"));
    }
    Report({9, refine_sum < deep_sum, false,
            fmt::format("mean steps to 20% of initial: phase-2 refine {:.1f}, "
                        "AnchorOnlyDeep {:.1f} (window {}, {} never crossed, "
                        "counted at run length)",
                        refine_sum, deep_sum, window, censored),
            t.Seconds()});
  }

  return Finish(total);
}
