#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "boilerfield/dom.hpp"
#include "boilerfield/records.hpp"
#include "boilerfield/solver.hpp"

namespace boilerfield {

/// A block matches when any ancestor's tag is in `ancestor_tags`, or any
/// ancestor's class or id contains one of `attr_substrings` (ASCII
/// case-insensitive).
struct HeuristicRule {
  std::string name;
  std::vector<std::string> ancestor_tags;
  std::vector<std::string> attr_substrings;
  int label = 0;
  int priority = 0;  // lower wins

  bool matches(const TextBlock& block) const;
};

/// article -> 1; nav/footer/header/aside/form -> 0; class/id hinting at
/// comments, sidebars, footers or ads -> 0.
std::vector<HeuristicRule> default_rules();

/// Throws SeedError::BadRules on empty sets, duplicate priorities or
/// non-binary labels.
void validate_rules(const std::vector<HeuristicRule>& rules);

/// Labels each block with its highest-priority matching rule. Throws
/// SeedError::Empty when no block matches.
SeedSet apply_heuristics(const std::vector<TextBlock>& blocks, const std::vector<HeuristicRule>& rules);

struct FirstL {};
struct RandomSample {
  std::uint64_t seed = 0;
};
using SampleStrategy = std::variant<FirstL, RandomSample>;

/// ceil(fraction * n), guarded against representation error in the product.
std::size_t seed_count(double fraction, std::size_t n);

/// Seeds l = seed_count(fraction, n) blocks with their ground-truth labels.
/// Only blocks whose (dom_path, text_hash) appears in `truth` are eligible;
/// FirstL takes the earliest eligible ones, RandomSample a uniform subset
/// drawn from mt19937_64(seed). Throws SeedError::Coverage / BadFraction.
SeedSet sample_seeds(const GroundTruthPage& truth, const std::vector<TextBlock>& blocks, double fraction,
                     const SampleStrategy& strategy);

}  // namespace boilerfield
