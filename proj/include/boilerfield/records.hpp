#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace boilerfield {

struct GroundTruthBlock {
  std::string dom_path;
  std::string text_hash;
  int label = 0;
};

/// Human labels for one page, as exported by the tagging UI.
struct GroundTruthPage {
  std::string page_id;
  std::vector<GroundTruthBlock> blocks;
};

struct PredictedBlock {
  std::string dom_path;
  std::string text_hash;
  double score = 0.0;
  int label = 0;
  bool seed = false;
};

/// Extraction output for one page.
struct Prediction {
  std::string page_id;
  /// Resolved run configuration, enough to rerun the page.
  nlohmann::json config = nlohmann::json::object();
  std::vector<PredictedBlock> blocks;
  /// Solver diagnostics (iterations, residual, energy, isolated, warnings).
  nlohmann::json stats = nlohmann::json::object();
};

}  // namespace boilerfield
