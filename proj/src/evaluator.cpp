#include "boilerfield/evaluator.hpp"

#include <map>
#include <set>

#include "boilerfield/error.hpp"

namespace boilerfield {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void compute_metrics(EvalReport& r) {
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = ratio(2 * r.tp, 2 * r.tp + r.fp + r.fn);
  r.accuracy = ratio(r.tp + r.tn, r.tp + r.fp + r.fn + r.tn);
}

EvalReport compare(const Prediction& pred, const GroundTruthPage& truth, bool exclude_seeds) {
  if (pred.page_id != truth.page_id)
    throw EvalError(EvalError::Kind::PageMismatch,
                    "prediction is for page '" + pred.page_id + "' but ground truth for '" + truth.page_id + "'");
  using Key = std::pair<std::string, std::string>;
  std::map<Key, int> truth_labels;
  for (const auto& b : truth.blocks) truth_labels.emplace(Key{b.dom_path, b.text_hash}, b.label);

  EvalReport r;
  r.page_id = pred.page_id;
  r.seeds_excluded = exclude_seeds;
  std::set<Key> consumed;
  for (const auto& b : pred.blocks) {
    Key key{b.dom_path, b.text_hash};
    const auto it = truth_labels.find(key);
    if (exclude_seeds && b.seed) {
      if (it != truth_labels.end()) consumed.insert(std::move(key));
      continue;
    }
    if (it == truth_labels.end()) {
      ++r.unmatched_pred;
      continue;
    }
    consumed.insert(std::move(key));
    ++r.matched;
    const bool predicted = b.label == 1;
    const bool actual = it->second == 1;
    if (predicted && actual) {
      ++r.tp;
    } else if (predicted) {
      ++r.fp;
    } else if (actual) {
      ++r.fn;
    } else {
      ++r.tn;
    }
  }
  r.unmatched_truth = truth_labels.size() - consumed.size();
  if (r.matched == 0)
    throw EvalError(EvalError::Kind::NoOverlap, "page '" + pred.page_id + "': no prediction matches the ground truth");
  compute_metrics(r);
  return r;
}

EvalSummary aggregate(const std::vector<EvalReport>& reports, Averaging averaging) {
  if (reports.empty()) throw EvalError(EvalError::Kind::Empty, "no reports to aggregate");
  EvalSummary s;
  s.averaging = averaging;
  s.pages = reports.size();
  s.totals.page_id = "*";
  s.totals.seeds_excluded = reports.front().seeds_excluded;
  for (const auto& r : reports) {
    s.totals.tp += r.tp;
    s.totals.fp += r.fp;
    s.totals.fn += r.fn;
    s.totals.tn += r.tn;
    s.totals.matched += r.matched;
    s.totals.unmatched_pred += r.unmatched_pred;
    s.totals.unmatched_truth += r.unmatched_truth;
  }
  compute_metrics(s.totals);

  if (averaging == Averaging::Micro) {
    const auto micro = [&](const std::optional<double>& v) {
      return MetricSummary{v, v ? reports.size() : 0, v ? 0 : reports.size()};
    };
    s.precision = micro(s.totals.precision);
    s.recall = micro(s.totals.recall);
    s.f1 = micro(s.totals.f1);
    s.accuracy = micro(s.totals.accuracy);
    return s;
  }

  const auto macro = [&](std::optional<double> EvalReport::*field) {
    MetricSummary m;
    double sum = 0.0;
    for (const auto& r : reports) {
      if (const auto& v = r.*field) {
        sum += *v;
        ++m.pages;
      } else {
        ++m.excluded;
      }
    }
    if (m.pages > 0) m.mean = sum / static_cast<double>(m.pages);
    return m;
  };
  s.precision = macro(&EvalReport::precision);
  s.recall = macro(&EvalReport::recall);
  s.f1 = macro(&EvalReport::f1);
  s.accuracy = macro(&EvalReport::accuracy);
  return s;
}

}  // namespace boilerfield
