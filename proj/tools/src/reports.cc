#include "anchorrefine/cli/reports.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace anchorrefine::cli {

namespace {

using nlohmann::json;

std::string Fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Fmt(const std::optional<double>& v) { return v ? Fmt(*v) : ""; }

std::string Fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

json Finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json Crossings(const evalanalysis::CurveDynamics& c) {
  json out = json::object();
  for (size_t i = 0; i < evalanalysis::kCrossingFractions.size(); ++i) {
    const std::string key =
        std::to_string(static_cast<int>(
            std::lround(evalanalysis::kCrossingFractions[i] * 100))) +
        "%";
    out[key] = c.crossings[i] ? json(*c.crossings[i]) : json(nullptr);
  }
  return out;
}

}  // namespace

json ToJson(const evalanalysis::SuccessSummary& s) {
  json hist = json::object();
  for (auto tag : planarsim::kAllOutcomes) {
    hist[std::string(planarsim::OutcomeName(tag))] = s.count(tag);
  }
  return {{"n", s.n},
          {"successes", s.successes},
          {"success_rate", s.success_rate},
          {"outcome_histogram", hist},
          {"gripper_failure_share", s.gripper_failure_share}};
}

json ToJson(const evalanalysis::TransitionCounts& c) {
  return {{"fs", c.fs}, {"sf", c.sf}, {"ss", c.ss}, {"ff", c.ff},
          {"total", c.total()}};
}

json ToJson(const evalanalysis::ResidualStats& s) {
  return {{"mean_norm_raw", s.mean_norm_raw},
          {"mean_norm_res", s.mean_norm_res},
          {"cov_trace_raw", s.cov_trace_raw},
          {"cov_trace_res", s.cov_trace_res},
          {"norm_ratio", Finite(s.mean_norm_res / s.mean_norm_raw)},
          {"cov_ratio", Finite(s.cov_trace_res / s.cov_trace_raw)},
          {"n_samples", s.n_samples}};
}

json ToJson(const evalanalysis::GripperErrorProfile& p) {
  json mean = json::array();
  for (double d : p.mean_dist) mean.push_back(Finite(d));
  return {{"window", p.window},
          {"offsets", p.offsets},
          {"mean_dist", mean},
          {"counts", p.counts},
          {"threshold", p.threshold},
          {"rollouts_used", p.rollouts_used},
          {"rollouts_skipped", p.rollouts_skipped},
          {"empty", p.empty},
          {"below_threshold_at_zero", p.below_threshold_at_zero}};
}

json ToJson(const evalanalysis::LossDynamicsComparison& c) {
  auto curve = [](const evalanalysis::CurveDynamics& d) {
    return json{{"initial", Finite(d.initial)},
                {"records", d.smoothed.size()},
                {"crossings", Crossings(d)}};
  };
  return {{"window", c.window},
          {"a", curve(c.a)},
          {"b", curve(c.b)},
          {"note",
           "crossings are self-normalized; the two losses may be defined over "
           "different targets and are not comparable in absolute value"}};
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

std::string OutcomesCsv(const std::vector<evalanalysis::RolloutResult>& anchor,
                        const std::vector<evalanalysis::RolloutResult>* full) {
  std::string out =
      full ? "seed,anchor_outcome,anchor_steps,full_outcome,full_steps\n"
           : "seed,outcome,steps\n";
  for (size_t i = 0; i < anchor.size(); ++i) {
    out += std::to_string(anchor[i].seed) + "," +
           std::string(planarsim::OutcomeName(anchor[i].outcome)) + "," +
           std::to_string(anchor[i].steps_used);
    if (full) {
      out += "," + std::string(planarsim::OutcomeName((*full)[i].outcome)) +
             "," + std::to_string((*full)[i].steps_used);
    }
    out += "\n";
  }
  return out;
}

std::string ProfileCsv(const evalanalysis::GripperErrorProfile& p) {
  std::string out = "offset,mean_dist,count,threshold\n";
  for (size_t i = 0; i < p.offsets.size(); ++i) {
    out += std::to_string(p.offsets[i]) + "," + Fmt(p.mean_dist[i]) + "," +
           std::to_string(p.counts[i]) + "," + Fmt(p.threshold) + "\n";
  }
  return out;
}

std::string LossDynamicsCsv(const evalanalysis::LossDynamicsComparison& c) {
  auto step = [](const std::optional<int64_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  std::string out = "# crossings: fraction,step_a,step_b\n";
  for (size_t i = 0; i < evalanalysis::kCrossingFractions.size(); ++i) {
    out += "# " + Fmt(evalanalysis::kCrossingFractions[i]) + "," +
           step(c.a.crossings[i]) + "," + step(c.b.crossings[i]) + "\n";
  }
  out += "step,smoothed_a,smoothed_b\n";
  const size_t n = std::max(c.a.smoothed.size(), c.b.smoothed.size());
  for (size_t i = 0; i < n; ++i) {
    out += std::to_string(i) + "," +
           (i < c.a.smoothed.size() ? Fmt(c.a.smoothed[i]) : "") + "," +
           (i < c.b.smoothed.size() ? Fmt(c.b.smoothed[i]) : "") + "\n";
  }
  return out;
}

double PublishedSuccessRate(pipeline::Variant v) {
  using pipeline::Variant;
  switch (v) {
    case Variant::kFull: return 82.3;
    case Variant::kNoGripRefine: return 78.5;
    case Variant::kNaiveGripMSE: return 72.6;
    case Variant::kNoDetach: return 75.7;
    case Variant::kExplicitConcat: return 79.6;
    case Variant::kAnchorOnlyDeep: return 76.4;
    case Variant::kDirectActionPhase2: return 73.6;
  }
  return 0.0;
}

std::vector<AblationRow> AblationTable(
    const std::vector<pipeline::Variant>& variants,
    const std::vector<AblationCell>& cells) {
  std::map<uint64_t, double> full_by_seed;
  for (const auto& c : cells) {
    if (c.variant == pipeline::Variant::kFull && c.success_rate) {
      full_by_seed[c.seed] = *c.success_rate;
    }
  }
  std::vector<AblationRow> rows;
  for (pipeline::Variant v : variants) {
    AblationRow row;
    row.variant = v;
    row.published_success = PublishedSuccessRate(v);
    row.published_delta = std::round((row.published_success -
                                  PublishedSuccessRate(pipeline::Variant::kFull)) *
                                 10.0) /
                      10.0;
    double sum = 0.0, delta_sum = 0.0;
    int n_delta = 0;
    for (const auto& c : cells) {
      if (c.variant != v) continue;
      if (!c.success_rate) {
        ++row.n_failed;
        continue;
      }
      ++row.n_ok;
      sum += *c.success_rate;
      if (auto it = full_by_seed.find(c.seed); it != full_by_seed.end()) {
        delta_sum += *c.success_rate - it->second;
        ++n_delta;
      }
    }
    if (row.n_ok > 0) row.mean_success = sum / row.n_ok;
    if (n_delta > 0) row.mean_delta_vs_full = delta_sum / n_delta;
    rows.push_back(row);
  }
  return rows;
}

std::string AblationCsv(const std::vector<AblationRow>& rows) {
  std::string out =
      "variant,n_ok,n_failed,mean_success,mean_delta_vs_full,"
      "published_success_pct_annotation,published_delta_pct_annotation\n";
  for (const auto& r : rows) {
    out += std::string(pipeline::VariantName(r.variant)) + "," +
           std::to_string(r.n_ok) + "," + std::to_string(r.n_failed) + "," +
           Fmt(r.mean_success) + "," + Fmt(r.mean_delta_vs_full) + "," +
           Fmt1(r.published_success) + "," + Fmt1(r.published_delta) + "\n";
  }
  return out;
}

std::string AblationCellsCsv(const std::vector<AblationCell>& cells) {
  std::string out = "variant,seed,success_rate,error\n";
  for (const auto& c : cells) {
    std::string err = c.error;
    for (char& ch : err) {
      if (ch == ',' || ch == '\n') ch = ' ';
    }
    out += std::string(pipeline::VariantName(c.variant)) + "," +
           std::to_string(c.seed) + "," + Fmt(c.success_rate) + "," + err +
           "\n";
  }
  return out;
}

}  // namespace anchorrefine::cli
