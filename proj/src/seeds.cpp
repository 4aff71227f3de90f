#include "boilerfield/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "boilerfield/error.hpp"

namespace boilerfield {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

const std::string* find_attribute(const std::vector<Attribute>& attrs, std::string_view name) {
  for (const auto& a : attrs) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

}  // namespace

bool HeuristicRule::matches(const TextBlock& block) const {
  for (const auto& tag : block.tag_chain) {
    if (std::find(ancestor_tags.begin(), ancestor_tags.end(), tag) != ancestor_tags.end()) return true;
  }
  if (attr_substrings.empty()) return false;
  for (const auto& attrs : block.ancestor_attributes) {
    for (const char* name : {"class", "id"}) {
      const std::string* value = find_attribute(attrs, name);
      if (value == nullptr) continue;
      const std::string v = lower(*value);
      for (const auto& needle : attr_substrings) {
        if (!needle.empty() && v.find(lower(needle)) != std::string::npos) return true;
      }
    }
  }
  return false;
}

std::vector<HeuristicRule> default_rules() {
  return {
      {"article", {"article"}, {}, 1, 1},
      {"chrome-elements", {"nav", "footer", "header", "aside", "form"}, {}, 0, 2},
      {"chrome-attributes", {}, {"comment", "sidebar", "footer", "ad-"}, 0, 3},
  };
}

void validate_rules(const std::vector<HeuristicRule>& rules) {
  if (rules.empty()) throw SeedError(SeedError::Kind::BadRules, "rule set is empty");
  std::set<int> priorities;
  for (const auto& r : rules) {
    if (r.label != 0 && r.label != 1)
      throw SeedError(SeedError::Kind::BadRules, "rule '" + r.name + "' has a non-binary label");
    if (!priorities.insert(r.priority).second)
      throw SeedError(SeedError::Kind::BadRules, "duplicate rule priority " + std::to_string(r.priority));
  }
}

SeedSet apply_heuristics(const std::vector<TextBlock>& blocks, const std::vector<HeuristicRule>& rules) {
  validate_rules(rules);
  std::vector<const HeuristicRule*> ordered;
  for (const auto& r : rules) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->priority < b->priority; });

  SeedSet seeds;
  for (const auto& block : blocks) {
    for (const auto* rule : ordered) {
      if (rule->matches(block)) {
        seeds.labels[block.index] = rule->label;
        break;
      }
    }
  }
  if (seeds.empty()) throw SeedError(SeedError::Kind::Empty, "no block matched any heuristic rule");
  return seeds;
}

std::size_t seed_count(double fraction, std::size_t n) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw SeedError(SeedError::Kind::BadFraction, "seed fraction must lie in (0, 1]");
  const double exact = fraction * static_cast<double>(n);
  const auto l = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
  return std::min(l, n);
}

SeedSet sample_seeds(const GroundTruthPage& truth, const std::vector<TextBlock>& blocks, double fraction,
                     const SampleStrategy& strategy) {
  const std::size_t l = seed_count(fraction, blocks.size());
  std::map<std::pair<std::string, std::string>, int> lookup;
  for (const auto& b : truth.blocks) lookup.emplace(std::pair{b.dom_path, b.text_hash}, b.label);

  std::vector<std::pair<std::size_t, int>> eligible;  // (block index, truth label), document order
  for (const auto& block : blocks) {
    const auto it = lookup.find({block.dom_path, block.text_hash});
    if (it != lookup.end()) eligible.emplace_back(block.index, it->second);
  }
  if (eligible.size() < l)
    throw SeedError(SeedError::Kind::Coverage, "ground truth matches " + std::to_string(eligible.size()) +
                                                   " blocks but " + std::to_string(l) + " seeds are required");

  SeedSet seeds;
  if (std::holds_alternative<FirstL>(strategy)) {
    for (std::size_t k = 0; k < l; ++k) seeds.labels[eligible[k].first] = eligible[k].second;
    return seeds;
  }
  // Partial Fisher-Yates with rejection sampling; mt19937_64 output is fully
  // specified, so the draw is portable across standard libraries.
  std::mt19937_64 rng(std::get<RandomSample>(strategy).seed);
  for (std::size_t k = 0; k < l; ++k) {
    const std::uint64_t range = eligible.size() - k;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    std::swap(eligible[k], eligible[k + draw % range]);
    seeds.labels[eligible[k].first] = eligible[k].second;
  }
  return seeds;
}

}  // namespace boilerfield
