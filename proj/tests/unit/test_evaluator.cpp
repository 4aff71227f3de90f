#include <string>
#include <vector>

#include "boilerfield/error.hpp"
#include "boilerfield/evaluator.hpp"
#include "doctest.h"

using namespace boilerfield;

namespace {

EvalReport counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  compute_metrics(r);
  return r;
}

std::string hash_for(std::size_t i) {
  std::string h = std::to_string(i);
  return std::string(16 - h.size(), '0') + h;
}

// Predicted and true labels for blocks 0..n-1.
std::pair<Prediction, GroundTruthPage> page(const std::vector<int>& predicted, const std::vector<int>& actual,
                                            const std::vector<bool>& seed = {}) {
  Prediction pred;
  GroundTruthPage truth;
  pred.page_id = truth.page_id = "p";
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::string path = "/html[1]/body[1]/p[" + std::to_string(i + 1) + "]/#text[1]";
    pred.blocks.push_back({path, hash_for(i), static_cast<double>(predicted[i]), predicted[i],
                           i < seed.size() && seed[i]});
    truth.blocks.push_back({path, hash_for(i), actual[i]});
  }
  return {pred, truth};
}

}  // namespace

TEST_CASE("metrics: arithmetic") {
  const auto r = counts(3, 1, 1, 5);
  CHECK(*r.precision == 0.75);
  CHECK(*r.recall == 0.75);
  CHECK(*r.accuracy == 0.8);
  CHECK(*r.f1 == 0.75);
}

TEST_CASE("metrics: undefined ratios") {
  const auto r = counts(0, 0, 0, 4);
  CHECK_FALSE(r.precision);
  CHECK_FALSE(r.recall);
  CHECK_FALSE(r.f1);
  CHECK(*r.accuracy == 1.0);
}

TEST_CASE("compare: identity and confusion counts") {
  auto [pred, truth] = page({1, 0, 1, 1, 0, 0, 1, 0, 1, 1}, {1, 0, 1, 1, 0, 0, 1, 0, 1, 1});
  auto r = compare(pred, truth, false);
  CHECK(r.matched == 10);
  CHECK(*r.precision == 1.0);
  CHECK(*r.recall == 1.0);
  CHECK(*r.accuracy == 1.0);

  std::tie(pred, truth) = page({1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, {1, 1, 1, 0, 1, 0, 0, 0, 0, 0});
  r = compare(pred, truth, false);
  CHECK(r.tp == 3);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 5);

  std::tie(pred, truth) = page({0, 0, 0}, {0, 0, 0});
  r = compare(pred, truth, false);
  CHECK_FALSE(r.precision);
  CHECK_FALSE(r.recall);
  CHECK(*r.accuracy == 1.0);
}

TEST_CASE("compare: seeds are excluded on request") {
  auto [pred, truth] = page({1, 0, 1, 0}, {1, 0, 0, 0}, {true, true, false, false});
  auto r = compare(pred, truth, true);
  CHECK(r.matched == 2);
  CHECK(r.fp == 1);
  CHECK(r.tn == 1);
  CHECK(r.unmatched_truth == 0);
  CHECK(r.seeds_excluded);
  r = compare(pred, truth, false);
  CHECK(r.matched == 4);
}

TEST_CASE("compare: unmatched blocks on either side") {
  auto [pred, truth] = page({1, 0, 1}, {1, 0, 1});
  pred.blocks[0].text_hash = hash_for(99);  // text changed since tagging
  truth.blocks.push_back({"/html[1]/body[1]/div[1]/#text[1]", hash_for(7), 1});
  const auto r = compare(pred, truth, false);
  CHECK(r.matched == 2);
  CHECK(r.unmatched_pred == 1);
  CHECK(r.unmatched_truth == 2);
}

TEST_CASE("compare: errors") {
  auto [pred, truth] = page({1}, {1});
  pred.blocks[0].dom_path = "/elsewhere";
  CHECK_THROWS_AS(compare(pred, truth, false), EvalError);
  std::tie(pred, truth) = page({1}, {1});
  truth.page_id = "other";
  CHECK_THROWS_AS(compare(pred, truth, false), EvalError);
  std::tie(pred, truth) = page({1}, {1}, {true});
  CHECK_THROWS_AS(compare(pred, truth, true), EvalError);  // only a seed
}

TEST_CASE("aggregate: macro averaging") {
  auto a = counts(3, 0, 0, 2);
  a.accuracy = 0.6;
  auto b = counts(3, 0, 0, 2);
  b.accuracy = 0.8;
  CHECK(*aggregate({a, b}).accuracy.mean == doctest::Approx(0.7).epsilon(1e-15));

  const auto one = counts(3, 1, 1, 5);
  const auto s = aggregate({one});
  CHECK(*s.precision.mean == *one.precision);
  CHECK(*s.accuracy.mean == *one.accuracy);
  CHECK(s.pages == 1);

  auto p = counts(1, 1, 0, 0);  // precision 0.5
  auto q = counts(0, 0, 0, 3);  // precision undefined
  const auto t = aggregate({p, q});
  CHECK(*t.precision.mean == 0.5);
  CHECK(t.precision.pages == 1);
  CHECK(t.precision.excluded == 1);
  CHECK_THROWS_AS(aggregate({}), EvalError);
}

TEST_CASE("aggregate: micro averaging pools counts") {
  const auto s = aggregate({counts(1, 1, 0, 0), counts(3, 0, 1, 5)}, Averaging::Micro);
  CHECK(s.totals.tp == 4);
  CHECK(*s.precision.mean == 0.8);
  CHECK(*s.recall.mean == 0.8);
  CHECK(*s.accuracy.mean == doctest::Approx(9.0 / 11.0));
}
