#include "clothbench/manip_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "clothbench/error.hpp"
#include "csv.hpp"

namespace clothbench {
namespace {

constexpr double kTieTolerance = 1e-12;

double mask_area(const BinaryMask& mask, bool calibrated) {
  return calibrated ? area_mm2(mask) : static_cast<double>(area_px(mask));
}

std::string optional_number(const std::optional<double>& value) {
  return value ? fmt::format("{:.4f}", *value) : std::string();
}

}  // namespace

PrimitiveSpec canonical_primitive(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Lift: return {kind, GripSite::Corner, 350.0, 30.0, false};
    case PrimitiveKind::Drag: return {kind, GripSite::Corner, 200.0, 10.0, false};
    case PrimitiveKind::Fold: return {kind, GripSite::Corner, 110.0, 30.0, false};
    case PrimitiveKind::Pull: return {kind, GripSite::MidShortEdge, 50.0, 0.0, true};
    case PrimitiveKind::Push: return {kind, GripSite::MidShortEdge, 100.0, 0.0, false};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown primitive");
}

void validate(const PrimitiveSpec& spec) {
  if (!(std::isfinite(spec.travel_mm) && spec.travel_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} travel must be > 0", to_string(spec.kind)));
  }
  const bool grasped = spec.site == GripSite::Corner;
  if (grasped && !(std::isfinite(spec.grasp_height_mm) && spec.grasp_height_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} grasp height must be > 0", to_string(spec.kind)));
  }
  if (!grasped && spec.grasp_height_mm != 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} is a contact primitive; grasp height must be 0",
                            to_string(spec.kind)));
  }
  if (spec.kind == PrimitiveKind::Fold && spec.travel_mm <= spec.grasp_height_mm) {
    throw Error(ErrorCode::InvalidArgument, "fold apex must be above the grasp height");
  }
}

std::string_view to_string(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::Lift: return "lift";
    case PrimitiveKind::Drag: return "drag";
    case PrimitiveKind::Fold: return "fold";
    case PrimitiveKind::Pull: return "pull";
    case PrimitiveKind::Push: return "push";
  }
  return "?";
}

PrimitiveKind parse_primitive(std::string_view text) {
  for (auto kind : kAllPrimitives) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown primitive '{}'", text));
}

EvalResult make_eval_result(PrimitiveKind kind, std::vector<double> runs) {
  const auto agg = aggregate(runs);
  EvalResult result;
  result.primitive = kind;
  result.repetitions = std::move(runs);
  result.mean = agg.mean;
  result.stddev = agg.stddev;
  result.fr = agg.mean;
  return result;
}

double final_ratio(const BinaryMask& before, const BinaryMask& after) {
  const bool calibrated = before.scale().has_value();
  if (calibrated != after.scale().has_value()) {
    throw Error(ErrorCode::CalibrationMismatch,
                "before and after masks must both carry a scale or neither");
  }
  const double a_i = mask_area(before, calibrated);
  if (a_i <= 0.0) throw Error(ErrorCode::EmptyReference, "before mask is empty");
  return mask_area(after, calibrated) / a_i;
}

double fold_ratio(double area_after, double area_uncovered_bottom) {
  if (!(area_after > 0.0)) throw Error(ErrorCode::EmptyReference, "after-fold area is zero");
  if (area_uncovered_bottom < 0.0 || area_uncovered_bottom > area_after) {
    throw Error(ErrorCode::InconsistentAreas,
                fmt::format("uncovered bottom area {} exceeds final area {}",
                            area_uncovered_bottom, area_after));
  }
  return (area_after - area_uncovered_bottom) / area_after;
}

double fold_ratio(const BinaryMask& after, const BinaryMask& uncovered_bottom) {
  const bool calibrated = after.scale().has_value();
  if (calibrated != uncovered_bottom.scale().has_value()) {
    throw Error(ErrorCode::CalibrationMismatch,
                "fold masks must both carry a scale or neither");
  }
  return fold_ratio(mask_area(after, calibrated), mask_area(uncovered_bottom, calibrated));
}

std::optional<std::string> retention_warning(double fr) {
  if (fr > kRetentionWarningThreshold) {
    return fmt::format("FR {:.4f} exceeds {:.2f}; check the segmentation masks", fr,
                       kRetentionWarningThreshold);
  }
  return std::nullopt;
}

Aggregate aggregate(std::span<const double> runs) {
  if (runs.empty()) throw Error(ErrorCode::EmptyRuns, "no repetitions to aggregate");
  const double n = static_cast<double>(runs.size());
  const double mean = std::accumulate(runs.begin(), runs.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : runs) ss += (r - mean) * (r - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<std::string> PrimitiveTrend::best() const {
  std::vector<std::string> ids;
  for (const auto& e : ranking) {
    if (e.highlight == Highlight::Best) ids.push_back(e.sample_id);
  }
  return ids;
}

std::vector<std::string> PrimitiveTrend::worst() const {
  std::vector<std::string> ids;
  for (const auto& e : ranking) {
    if (e.highlight == Highlight::Worst) ids.push_back(e.sample_id);
  }
  return ids;
}

const PrimitiveTrend& TrendReport::at(PrimitiveKind kind) const {
  for (const auto& p : primitives) {
    if (p.primitive == kind) return p;
  }
  throw Error(ErrorCode::InvalidArgument,
              fmt::format("no results for primitive {}", to_string(kind)));
}

std::string TrendReport::to_csv() const {
  std::string out = detail::csv_row({"primitive", "rank", "sample", "fr_mean", "fr_std",
                                     "stiffness", "elasticity", "friction", "highlight"});
  for (const auto& p : primitives) {
    for (const auto& e : p.ranking) {
      const char* mark = e.highlight == Highlight::Best    ? "best"
                         : e.highlight == Highlight::Worst ? "worst"
                                                           : "";
      out += detail::csv_row({std::string(to_string(p.primitive)), std::to_string(e.rank),
                              e.sample_id, fmt::format("{:.4f}", e.mean_fr),
                              fmt::format("{:.4f}", e.stddev), optional_number(e.stiffness),
                              optional_number(e.elasticity), optional_number(e.friction), mark});
    }
  }
  return out;
}

TrendReport trend_report(const std::vector<SampleOutcome>& samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "trend report needs at least two samples");
  }
  TrendReport report;
  for (auto kind : kAllPrimitives) {
    PrimitiveTrend trend;
    trend.primitive = kind;
    for (const auto& sample : samples) {
      const auto it = std::find_if(sample.results.begin(), sample.results.end(),
                                   [kind](const EvalResult& r) { return r.primitive == kind; });
      if (it == sample.results.end()) continue;
      TrendEntry entry;
      entry.sample_id = sample.sample_id;
      entry.mean_fr = it->mean;
      entry.stddev = it->stddev;
      entry.stiffness = sample.properties.stiffness;
      entry.elasticity = sample.properties.elasticity;
      entry.friction = sample.properties.friction;
      trend.ranking.push_back(std::move(entry));
    }
    if (trend.ranking.empty()) continue;

    std::stable_sort(trend.ranking.begin(), trend.ranking.end(),
                     [](const TrendEntry& a, const TrendEntry& b) { return a.mean_fr > b.mean_fr; });
    const double top = trend.ranking.front().mean_fr;
    const double bottom = trend.ranking.back().mean_fr;
    int best_count = 0;
    int worst_count = 0;
    for (std::size_t i = 0; i < trend.ranking.size(); ++i) {
      auto& e = trend.ranking[i];
      e.rank = (i > 0 && std::abs(e.mean_fr - trend.ranking[i - 1].mean_fr) <= kTieTolerance)
                   ? trend.ranking[i - 1].rank
                   : static_cast<int>(i) + 1;
      if (std::abs(e.mean_fr - top) <= kTieTolerance) {
        e.highlight = Highlight::Best;
        ++best_count;
      } else if (std::abs(e.mean_fr - bottom) <= kTieTolerance) {
        e.highlight = Highlight::Worst;
        ++worst_count;
      }
    }
    trend.tie_at_top = best_count > 1;
    // When every sample ties there is no distinct minimum.
    trend.tie_at_bottom = worst_count > 1 || (worst_count == 0 && best_count > 1);
    report.primitives.push_back(std::move(trend));
  }
  return report;
}

}  // namespace clothbench
