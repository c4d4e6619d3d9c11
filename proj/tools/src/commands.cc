#include "anchorrefine/cli/commands.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "anchorrefine/cli/config.h"
#include "anchorrefine/cli/reports.h"
#include "anchorrefine/cli/svg.h"
#include "anchorrefine/core/errors.h"
#include "anchorrefine/core/hashing.h"
#include "anchorrefine/diffnet/checkpoint.h"
#include "anchorrefine/evalanalysis/evalanalysis.h"
#include "anchorrefine/pipeline/pipeline.h"
#include "anchorrefine/planarsim/dataset.h"

namespace anchorrefine::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using pipeline::InferenceMode;
using pipeline::Variant;

struct Options {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string output;
  bool emit_svg = false;
  int phase = 0;
  std::string variant;
  std::string anchor;
  std::string refine;
  std::string kind;
  std::vector<std::string> inputs;
  std::string variants;
  int seeds = 1;
  bool force = false;
};

struct Context {
  RunConfig config;
  uint64_t hash = 0;
  std::string hash_hex;
  fs::path out_dir;
  std::ostream* out = nullptr;
};

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << content) || !f.flush()) {
    throw ConfigError("cannot write " + path.string());
  }
}

Context MakeContext(const Options& opt, std::ostream& out) {
  Context ctx;
  ctx.out = &out;
  if (!opt.config_path.empty()) ctx.config = LoadConfigFile(opt.config_path);
  if (opt.seed) ctx.config.train.seed = *opt.seed;
  if (!opt.output.empty()) ctx.config.output_dir = opt.output;
  if (opt.emit_svg) ctx.config.emit_svg = true;
  if (!opt.variant.empty()) {
    ctx.config.train.variant = pipeline::ParseVariant(opt.variant);
  }
  ctx.config.Validate();
  ctx.hash = ConfigHash(ctx.config);
  ctx.hash_hex = HashToHex(ctx.hash);
  ctx.out_dir = ResolveOutputDir(ctx.config);
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec || !fs::is_directory(ctx.out_dir)) {
    throw ConfigError("cannot create output directory " +
                      ctx.out_dir.string());
  }
  WriteFile(ctx.out_dir / "config.resolved", CanonicalText(ctx.config));
  return ctx;
}

fs::path DatasetPath(const Context& ctx) {
  return ctx.config.dataset_path.empty() ? ctx.out_dir / "dataset.jsonl"
                                         : fs::path(ctx.config.dataset_path);
}

planarsim::Dataset LoadDataset(const fs::path& path) {
  if (!fs::exists(path)) {
    throw ConfigError("dataset " + path.string() +
                      " not found (run gen-data first)");
  }
  return planarsim::ReadDataset(path.string());
}

json Manifest(const Context& ctx, const std::string& command) {
  return {{"command", command},
          {"config_hash", ctx.hash_hex},
          {"variant", std::string(pipeline::VariantName(
                          ctx.config.train.variant))}};
}

std::vector<std::string> LogMetadata(const Context& ctx, int phase) {
  std::vector<std::string> m = {
      "config_hash=" + ctx.hash_hex,
      "variant=" + std::string(pipeline::VariantName(ctx.config.train.variant)),
      "phase=" + std::to_string(phase)};
  if (phase == 2) {
    m.push_back(ctx.config.train.variant == Variant::kNaiveGripMSE
                    ? "grip_objective=naive_mse"
                    : "grip_objective=decision_aware");
  }
  return m;
}

void MaybeSvg(const Context& ctx, const std::string& name,
              const std::string& svg) {
  if (ctx.config.emit_svg) WriteFile(ctx.out_dir / name, svg);
}

evalanalysis::RolloutOptions RolloutOpts(const Context& ctx) {
  evalanalysis::RolloutOptions o;
  o.execute_k = ctx.config.execute_k;
  return o;
}

// Anchor-only store with the checkpoint values; shape-validated only.
diffnet::ParamStore LoadAnchorOnly(const pipeline::Architecture& arch,
                                   const std::string& path) {
  diffnet::ParamStore params;
  pipeline::AddAnchorParams(arch, params);
  const diffnet::Checkpoint ckpt = diffnet::ReadCheckpoint(path);
  diffnet::LoadCheckpoint(ckpt, params, pipeline::AnchorCheckpointPrefixes(),
                          std::nullopt);
  return params;
}

pipeline::Model LoadForEval(const Context& ctx, const Options& opt) {
  if (opt.anchor.empty()) throw ConfigError("--anchor is required");
  const std::string& checked = opt.refine.empty() ? opt.anchor : opt.refine;
  const diffnet::Checkpoint header = diffnet::ReadCheckpoint(checked);
  if (header.config_hash != ctx.hash) {
    if (!opt.force) {
      throw ConfigError("checkpoint " + checked + " was produced under config hash " +
                        HashToHex(header.config_hash) + ", current config is " +
                        ctx.hash_hex + " (use --force to override)");
    }
    *ctx.out << "warning: config hash mismatch ignored (--force)\n";
  }
  std::optional<std::string> refine;
  if (!opt.refine.empty()) refine = opt.refine;
  return pipeline::LoadModel(ctx.config.train, opt.anchor, refine,
                             std::nullopt);
}

int CmdGenData(const Options& opt, std::ostream& out) {
  Context ctx = MakeContext(opt, out);
  planarsim::GenerateOptions g;
  g.n_episodes = ctx.config.n_episodes;
  g.seed = ctx.config.data_seed;
  g.jitter_std = ctx.config.jitter_std;
  g.horizon = ctx.config.train.horizon;
  planarsim::Dataset ds = planarsim::GenerateDataset(ctx.config.task, g);
  ds.config_hash = ctx.hash;
  const fs::path path = DatasetPath(ctx);
  WriteFile(path, planarsim::SerializeDataset(ds));

  json m = Manifest(ctx, "gen-data");
  m["dataset"] = path.filename().string();
  m["seed"] = ctx.config.data_seed;
  m["n_episodes"] = ds.episodes.size();
  m["n_samples"] = ds.samples.size();
  m["jitter_std"] = ctx.config.jitter_std;
  m["first_episode_seed"] = ds.episodes.front().seed;
  m["last_episode_seed"] = ds.episodes.back().seed;
  WriteFile(ctx.out_dir / "gen_manifest.json", Dump(m));
  out << "wrote " << path.string() << " (" << ds.episodes.size()
      << " episodes, " << ds.samples.size() << " samples)\n";
  return kExitOk;
}

int CmdTrain(const Options& opt, std::ostream& out) {
  if (opt.phase != 1 && opt.phase != 2) {
    throw ConfigError("--phase must be 1 or 2");
  }
  if (opt.phase == 2 && opt.anchor.empty()) {
    throw ConfigError("phase 2 requires --anchor CKPT");
  }
  Context ctx = MakeContext(opt, out);
  const pipeline::TrainConfig& tc = ctx.config.train;
  const pipeline::Architecture arch = pipeline::MakeArchitecture(tc);
  if (opt.phase == 2 && !arch.has_refine()) {
    throw ConfigError("variant " + std::string(pipeline::VariantName(tc.variant)) +
                      " has no phase 2");
  }
  const planarsim::Dataset ds = LoadDataset(DatasetPath(ctx));

  diffnet::ParamStore params;
  pipeline::LossLog log;
  std::string ckpt_name;
  std::vector<std::string> prefixes;
  if (opt.phase == 1) {
    log = pipeline::TrainPhase1(tc, arch, ds.samples, params);
    ckpt_name = "anchor.ckpt";
    prefixes = pipeline::AnchorCheckpointPrefixes();
  } else {
    params = LoadAnchorOnly(arch, opt.anchor);
    log = pipeline::TrainPhase2(tc, arch, ds.samples, params);
    ckpt_name = "refine.ckpt";
    prefixes = pipeline::RefineCheckpointPrefixes(arch);
  }
  diffnet::SaveCheckpoint((ctx.out_dir / ckpt_name).string(), params, prefixes,
                          ctx.hash);
  const std::string log_name = "phase" + std::to_string(opt.phase) + "_loss.csv";
  pipeline::WriteLossLog((ctx.out_dir / log_name).string(), log,
                         LogMetadata(ctx, opt.phase));

  json m = Manifest(ctx, "train");
  m["phase"] = opt.phase;
  m["checkpoint"] = ckpt_name;
  m["loss_log"] = log_name;
  m["steps"] = log.records.size();
  m["initial_loss"] = log.records.front().total;
  m["final_loss"] = log.records.back().total;
  int64_t count = 0;
  for (const auto& p : prefixes) count += params.ParameterCount(p);
  m["parameters"] = count;
  WriteFile(ctx.out_dir / ("phase" + std::to_string(opt.phase) +
                           "_manifest.json"),
            Dump(m));

  if (ctx.config.emit_svg) {
    LineChart chart;
    chart.title = "phase " + std::to_string(opt.phase) + " loss";
    chart.x_label = "step";
    chart.log_y = true;
    const std::vector<double> totals = log.Totals();
    Series s{"total (smoothed)", {},
             evalanalysis::SmoothTrailing(totals, ctx.config.smoothing_window)};
    for (size_t i = 0; i < totals.size(); ++i) s.x.push_back(double(i));
    chart.series.push_back(std::move(s));
    MaybeSvg(ctx, "phase" + std::to_string(opt.phase) + "_loss.svg",
             RenderSvg(chart));
  }
  out << "phase " << opt.phase << " done: loss " << log.records.front().total
      << " -> " << log.records.back().total << ", wrote "
      << (ctx.out_dir / ckpt_name).string() << "\n";
  return kExitOk;
}

BarChart OutcomeBars(const std::string& title,
                     const evalanalysis::SuccessSummary& s) {
  BarChart chart;
  chart.title = title;
  chart.y_label = "rollouts";
  for (auto tag : planarsim::kAllOutcomes) {
    chart.labels.emplace_back(planarsim::OutcomeName(tag));
    chart.values.push_back(s.count(tag));
  }
  return chart;
}

int CmdEval(const Options& opt, std::ostream& out) {
  Context ctx = MakeContext(opt, out);
  const pipeline::Model model = LoadForEval(ctx, opt);
  const std::vector<uint64_t> seeds =
      evalanalysis::EvalSeeds(ctx.config.eval_seeds);
  const auto anchor = evalanalysis::RolloutAll(
      evalanalysis::MakeModelPolicy(model.arch, model.params,
                                    InferenceMode::kAnchorOnly),
      ctx.config.task, seeds, RolloutOpts(ctx));
  const auto anchor_summary = evalanalysis::Summarize(anchor);

  json report = Manifest(ctx, "eval");
  report["eval_seeds"] = seeds.size();
  report["execute_k"] = ctx.config.execute_k;
  report["anchor_only"] = ToJson(anchor_summary);
  std::optional<std::vector<evalanalysis::RolloutResult>> full;
  if (model.has_refine) {
    full = evalanalysis::RolloutAll(
        evalanalysis::MakeModelPolicy(model.arch, model.params,
                                      InferenceMode::kFull),
        ctx.config.task, seeds, RolloutOpts(ctx));
    const auto full_summary = evalanalysis::Summarize(*full);
    std::vector<planarsim::OutcomeTag> a, f;
    for (const auto& r : anchor) a.push_back(r.outcome);
    for (const auto& r : *full) f.push_back(r.outcome);
    report["full"] = ToJson(full_summary);
    report["transitions"] = ToJson(evalanalysis::TallyTransitions(a, f));
    report["success_rate_delta"] =
        full_summary.success_rate - anchor_summary.success_rate;
    MaybeSvg(ctx, "eval_full_outcomes.svg",
             RenderSvg(OutcomeBars("outcomes (full)", full_summary)));
  }
  WriteFile(ctx.out_dir / "eval_report.json", Dump(report));
  WriteFile(ctx.out_dir / "eval_outcomes.csv",
            OutcomesCsv(anchor, full ? &*full : nullptr));
  MaybeSvg(ctx, "eval_anchor_outcomes.svg",
           RenderSvg(OutcomeBars("outcomes (anchor only)", anchor_summary)));

  out << "anchor-only success " << anchor_summary.success_rate;
  if (full) out << ", full success " << report["full"]["success_rate"];
  out << "\n";
  return kExitOk;
}

int AnalyzeResiduals(const Context& ctx, const Options& opt) {
  if (opt.anchor.empty()) throw ConfigError("residuals needs --anchor");
  if (opt.inputs.size() > 1) {
    throw ConfigError("residuals takes at most one dataset input");
  }
  const planarsim::Dataset ds = LoadDataset(
      opt.inputs.empty() ? DatasetPath(ctx) : fs::path(opt.inputs[0]));
  pipeline::CheckSchema(ctx.config.train, ds.samples);
  const pipeline::Architecture arch =
      pipeline::MakeArchitecture(ctx.config.train);
  const diffnet::ParamStore params = LoadAnchorOnly(arch, opt.anchor);
  const auto stats = evalanalysis::ResidualStatsFor(arch, params, ds.samples);
  json report = Manifest(ctx, "analyze residuals");
  report["residuals"] = ToJson(stats);
  WriteFile(ctx.out_dir / "residuals.json", Dump(report));
  BarChart chart;
  chart.title = "arm target statistics";
  chart.labels = {"norm raw", "norm residual", "cov trace raw",
                  "cov trace residual"};
  chart.values = {stats.mean_norm_raw, stats.mean_norm_res,
                  stats.cov_trace_raw, stats.cov_trace_res};
  MaybeSvg(ctx, "residuals.svg", RenderSvg(chart));
  *ctx.out << "mean norm raw " << stats.mean_norm_raw << " residual "
           << stats.mean_norm_res << "; cov trace raw " << stats.cov_trace_raw
           << " residual " << stats.cov_trace_res << "\n";
  return kExitOk;
}

int AnalyzeTransitions(const Context& ctx, const Options& opt) {
  if (opt.refine.empty()) throw ConfigError("transitions needs --refine");
  if (!opt.inputs.empty()) throw ConfigError("transitions takes no inputs");
  const pipeline::Model model = LoadForEval(ctx, opt);
  const std::vector<uint64_t> seeds =
      evalanalysis::EvalSeeds(ctx.config.eval_seeds);
  const auto anchor = evalanalysis::RolloutAll(
      evalanalysis::MakeModelPolicy(model.arch, model.params,
                                    InferenceMode::kAnchorOnly),
      ctx.config.task, seeds, RolloutOpts(ctx));
  const auto full = evalanalysis::RolloutAll(
      evalanalysis::MakeModelPolicy(model.arch, model.params,
                                    InferenceMode::kFull),
      ctx.config.task, seeds, RolloutOpts(ctx));
  std::vector<planarsim::OutcomeTag> a, f;
  for (const auto& r : anchor) a.push_back(r.outcome);
  for (const auto& r : full) f.push_back(r.outcome);
  const auto counts = evalanalysis::TallyTransitions(a, f);
  json report = Manifest(ctx, "analyze transitions");
  report["transitions"] = ToJson(counts);
  WriteFile(ctx.out_dir / "transitions.json", Dump(report));
  WriteFile(ctx.out_dir / "transitions.csv", OutcomesCsv(anchor, &full));
  BarChart chart;
  chart.title = "paired transitions (anchor -> full)";
  chart.labels = {"fail->success", "success->fail", "success->success",
                  "fail->fail"};
  chart.values = {double(counts.fs), double(counts.sf), double(counts.ss),
                  double(counts.ff)};
  MaybeSvg(ctx, "transitions.svg", RenderSvg(chart));
  *ctx.out << "fs " << counts.fs << " sf " << counts.sf << " ss " << counts.ss
           << " ff " << counts.ff << "\n";
  return kExitOk;
}

int AnalyzeGripProfile(const Context& ctx, const Options& opt) {
  if (!opt.inputs.empty()) throw ConfigError("grip-profile takes no inputs");
  const pipeline::Model model = LoadForEval(ctx, opt);
  const auto results = evalanalysis::RolloutAll(
      evalanalysis::MakeModelPolicy(
          model.arch, model.params,
          model.has_refine ? InferenceMode::kFull : InferenceMode::kAnchorOnly),
      ctx.config.task, evalanalysis::EvalSeeds(ctx.config.eval_seeds),
      RolloutOpts(ctx));
  const auto profile = evalanalysis::BuildGripperErrorProfile(
      results, ctx.config.task, ctx.config.profile_window);
  json report = Manifest(ctx, "analyze grip-profile");
  report["profile"] = ToJson(profile);
  WriteFile(ctx.out_dir / "grip_profile.json", Dump(report));
  WriteFile(ctx.out_dir / "grip_profile.csv", ProfileCsv(profile));
  LineChart chart;
  chart.title = "ee-object distance around the first close command";
  chart.x_label = "offset (steps)";
  chart.y_label = "mean distance";
  Series s{"mean distance", {}, profile.mean_dist};
  for (int o : profile.offsets) s.x.push_back(o);
  chart.series.push_back(std::move(s));
  chart.has_reference = true;
  chart.reference = profile.threshold;
  chart.reference_label = "grasp radius";
  MaybeSvg(ctx, "grip_profile.svg", RenderSvg(chart));
  if (profile.empty) {
    *ctx.out << "empty profile: no rollout commanded a close\n";
  } else {
    *ctx.out << "mean distance at close " << profile.mean_dist[profile.window]
             << " (threshold " << profile.threshold << ")\n";
  }
  return kExitOk;
}

int AnalyzeLossDynamics(const Context& ctx, const Options& opt) {
  if (opt.inputs.size() != 2) {
    throw ConfigError("loss-dynamics needs exactly two loss logs");
  }
  const pipeline::LossLog a = pipeline::ReadLossLog(opt.inputs[0]);
  const pipeline::LossLog b = pipeline::ReadLossLog(opt.inputs[1]);
  if (a.records.empty() || b.records.empty()) {
    throw ConfigError("loss-dynamics inputs must be non-empty");
  }
  const auto cmp = evalanalysis::CompareLossDynamics(
      a.Totals(), b.Totals(), ctx.config.smoothing_window);
  json report = Manifest(ctx, "analyze loss-dynamics");
  report["inputs"] = {fs::path(opt.inputs[0]).filename().string(),
                      fs::path(opt.inputs[1]).filename().string()};
  report["loss_dynamics"] = ToJson(cmp);
  WriteFile(ctx.out_dir / "loss_dynamics.json", Dump(report));
  WriteFile(ctx.out_dir / "loss_dynamics.csv", LossDynamicsCsv(cmp));
  LineChart chart;
  chart.title = "self-normalized loss (smoothed / initial)";
  chart.x_label = "step";
  chart.log_y = true;
  for (int k = 0; k < 2; ++k) {
    const auto& c = k == 0 ? cmp.a : cmp.b;
    Series s{fs::path(opt.inputs[k]).filename().string(), {}, {}};
    for (size_t i = 0; i < c.smoothed.size(); ++i) {
      s.x.push_back(double(i));
      s.y.push_back(c.smoothed[i] / c.initial);
    }
    chart.series.push_back(std::move(s));
  }
  MaybeSvg(ctx, "loss_dynamics.svg", RenderSvg(chart));
  for (size_t i = 0; i < evalanalysis::kCrossingFractions.size(); ++i) {
    auto s = [](const std::optional<int64_t>& v) {
      return v ? std::to_string(*v) : std::string("never");
    };
    *ctx.out << "below " << evalanalysis::kCrossingFractions[i] * 100
             << "%: a " << s(cmp.a.crossings[i]) << ", b "
             << s(cmp.b.crossings[i]) << "\n";
  }
  return kExitOk;
}

int CmdAnalyze(const Options& opt, std::ostream& out) {
  static const std::vector<std::string> kinds = {
      "residuals", "transitions", "grip-profile", "loss-dynamics"};
  if (std::find(kinds.begin(), kinds.end(), opt.kind) == kinds.end()) {
    throw ConfigError("unknown --kind '" + opt.kind + "'");
  }
  Context ctx = MakeContext(opt, out);
  if (opt.kind == "residuals") return AnalyzeResiduals(ctx, opt);
  if (opt.kind == "transitions") return AnalyzeTransitions(ctx, opt);
  if (opt.kind == "grip-profile") return AnalyzeGripProfile(ctx, opt);
  return AnalyzeLossDynamics(ctx, opt);
}

std::vector<Variant> ParseVariantList(const std::string& csv) {
  std::vector<Variant> out;
  if (csv.empty()) return {pipeline::kAllVariants.begin(),
                           pipeline::kAllVariants.end()};
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Variant v = pipeline::ParseVariant(item);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--variants is empty");
  return out;
}

int CmdAblate(const Options& opt, std::ostream& out) {
  const std::vector<Variant> variants = ParseVariantList(opt.variants);
  if (opt.seeds < 1) throw ConfigError("--seeds must be >= 1");
  Context ctx = MakeContext(opt, out);
  const planarsim::Dataset ds = LoadDataset(DatasetPath(ctx));
  const std::vector<uint64_t> eval_seeds =
      evalanalysis::EvalSeeds(ctx.config.eval_seeds);

  std::vector<AblationCell> cells;
  bool numerical = false;
  for (int s = 0; s < opt.seeds; ++s) {
    pipeline::TrainConfig base = ctx.config.train;
    base.seed = ctx.config.train.seed + static_cast<uint64_t>(s);
    // Every variant except AnchorOnlyDeep shares the same anchor.
    std::optional<diffnet::ParamStore> shared_anchor;
    std::string shared_error;
    for (Variant v : variants) {
      AblationCell cell;
      cell.variant = v;
      cell.seed = base.seed;
      try {
        pipeline::TrainConfig tc = base;
        tc.variant = v;
        const pipeline::Architecture arch = pipeline::MakeArchitecture(tc);
        diffnet::ParamStore params;
        InferenceMode mode = InferenceMode::kFull;
        if (v == Variant::kAnchorOnlyDeep) {
          pipeline::TrainPhase1(tc, arch, ds.samples, params);
          mode = InferenceMode::kAnchorOnly;
        } else {
          if (!shared_error.empty()) throw NumericalError(shared_error);
          if (!shared_anchor) {
            diffnet::ParamStore anchor;
            try {
              pipeline::TrainPhase1(tc, arch, ds.samples, anchor);
            } catch (const std::exception& e) {
              shared_error = e.what();
              throw;
            }
            shared_anchor = std::move(anchor);
          }
          pipeline::AddAnchorParams(arch, params);
          params.CopyValuesFrom(*shared_anchor, pipeline::kAnchorPrefix);
          pipeline::TrainPhase2(tc, arch, ds.samples, params);
        }
        const auto results = evalanalysis::RolloutAll(
            evalanalysis::MakeModelPolicy(arch, params, mode), ctx.config.task,
            eval_seeds, RolloutOpts(ctx));
        cell.success_rate = evalanalysis::Summarize(results).success_rate;
      } catch (const NumericalError& e) {
        numerical = true;
        cell.error = e.what();
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      out << pipeline::VariantName(v) << " seed " << cell.seed << ": "
          << (cell.success_rate ? std::to_string(*cell.success_rate)
                                : "failed (" + cell.error + ")")
          << "\n";
      cells.push_back(std::move(cell));
    }
  }

  const std::vector<AblationRow> rows = AblationTable(variants, cells);
  WriteFile(ctx.out_dir / "ablation_cells.csv", AblationCellsCsv(cells));
  WriteFile(ctx.out_dir / "ablation.csv", AblationCsv(rows));
  json report = Manifest(ctx, "ablate");
  report["seeds"] = opt.seeds;
  report["eval_seeds"] = eval_seeds.size();
  json table = json::array();
  for (const auto& r : rows) {
    table.push_back(
        {{"variant", std::string(pipeline::VariantName(r.variant))},
         {"n_ok", r.n_ok},
         {"n_failed", r.n_failed},
         {"mean_success", r.mean_success ? json(*r.mean_success) : json()},
         {"mean_delta_vs_full",
          r.mean_delta_vs_full ? json(*r.mean_delta_vs_full) : json()},
         {"published_annotation",
          {{"success_pct", r.published_success},
           {"delta_pct", r.published_delta}}}});
  }
  report["table"] = table;
  report["note"] =
      "published_annotation columns are the published benchmark values, shown "
      "for reference only; they are not expectations for this environment";
  WriteFile(ctx.out_dir / "ablation.json", Dump(report));
  if (ctx.config.emit_svg) {
    BarChart chart;
    chart.title = "mean success rate per variant";
    chart.y_label = "success rate";
    for (const auto& r : rows) {
      chart.labels.emplace_back(pipeline::VariantName(r.variant));
      chart.values.push_back(r.mean_success.value_or(NAN));
    }
    MaybeSvg(ctx, "ablation.svg", RenderSvg(chart));
  }
  out << AblationCsv(rows);

  bool failed = false;
  for (const auto& c : cells) failed = failed || !c.success_rate;
  if (!failed) return kExitOk;
  return numerical ? kExitNumerical : kExitUsage;
}

void AddCommon(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "Config file (key = value)");
  cmd->add_option("--seed", opt.seed, "Override train.seed");
  cmd->add_option("--output", opt.output, "Output directory");
  cmd->add_flag("--emit-svg", opt.emit_svg, "Also write SVG charts");
  cmd->add_option("--variant", opt.variant, "Override train.variant");
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options opt;
  CLI::App app{"Anchor/refine action-chunk policies on a planar world",
               "anchorrefine"};
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("gen-data", "Generate demonstrations");
  AddCommon(gen, opt);
  CLI::App* train = app.add_subcommand("train", "Train one phase");
  AddCommon(train, opt);
  train->add_option("--phase", opt.phase, "1 (anchor) or 2 (refine)")
      ->required();
  train->add_option("--anchor", opt.anchor, "Anchor checkpoint (phase 2)");
  CLI::App* eval = app.add_subcommand("eval", "Closed-loop evaluation");
  AddCommon(eval, opt);
  eval->add_option("--anchor", opt.anchor, "Anchor checkpoint");
  eval->add_option("--refine", opt.refine, "Refine checkpoint");
  eval->add_flag("--force", opt.force, "Ignore config hash mismatches");
  CLI::App* analyze = app.add_subcommand("analyze", "Run an analysis");
  AddCommon(analyze, opt);
  analyze->add_option("--kind", opt.kind,
                      "residuals|transitions|grip-profile|loss-dynamics")
      ->required();
  analyze->add_option("--anchor", opt.anchor, "Anchor checkpoint");
  analyze->add_option("--refine", opt.refine, "Refine checkpoint");
  analyze->add_flag("--force", opt.force, "Ignore config hash mismatches");
  analyze->add_option("inputs", opt.inputs, "Input files");
  CLI::App* ablate = app.add_subcommand("ablate", "Variant x seed sweep");
  AddCommon(ablate, opt);
  ablate->add_option("--variants", opt.variants, "Comma-separated variants");
  ablate->add_option("--seeds", opt.seeds, "Training seeds per variant");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen) return CmdGenData(opt, out);
    if (*train) return CmdTrain(opt, out);
    if (*eval) return CmdEval(opt, out);
    if (*analyze) return CmdAnalyze(opt, out);
    return CmdAblate(opt, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace anchorrefine::cli
