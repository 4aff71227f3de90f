#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "boilerfield/records.hpp"

namespace boilerfield {

/// Block-level confusion counts for one page; positive class = relevant.
/// Ratios are nullopt when their denominator is zero.
struct EvalReport {
  std::string page_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> accuracy;
  std::size_t matched = 0;
  std::size_t unmatched_pred = 0;
  std::size_t unmatched_truth = 0;
  bool seeds_excluded = false;
};

/// Fills the ratio fields of `report` from its counts.
void compute_metrics(EvalReport& report);

/// Matches blocks on (dom_path, text_hash). Throws EvalError::PageMismatch
/// for different page ids and EvalError::NoOverlap when nothing is left to
/// score.
EvalReport compare(const Prediction& pred, const GroundTruthPage& truth, bool exclude_seeds);

enum class Averaging { Macro, Micro };

struct MetricSummary {
  std::optional<double> mean;
  std::size_t pages = 0;     // pages that contributed
  std::size_t excluded = 0;  // pages where the metric was undefined
};

struct EvalSummary {
  Averaging averaging = Averaging::Macro;
  std::size_t pages = 0;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
  MetricSummary accuracy;
  /// Summed counts over all pages.
  EvalReport totals;
};

/// Macro: unweighted mean of each defined per-page metric. Micro: metrics of
/// the summed counts. Throws EvalError::Empty.
EvalSummary aggregate(const std::vector<EvalReport>& reports, Averaging averaging = Averaging::Macro);

}  // namespace boilerfield
