#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "boilerfield/dom.hpp"
#include "boilerfield/evaluator.hpp"
#include "boilerfield/records.hpp"
#include "boilerfield/seeds.hpp"
#include "json.hpp"

namespace boilerfield {

using Json = nlohmann::json;

/// Keys sorted, two-space indent, trailing newline.
std::string dump_stable(const Json& j);

Json read_json_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Ground truth: {"page_id": str, "blocks": [{"dom_path", "text_hash", "label"}]}.
// Parsing rejects unknown keys, non-binary labels, malformed hashes and
// duplicate dom_paths with SchemaError.
Json to_json(const GroundTruthPage& page);
GroundTruthPage truth_from_json(const Json& j);

Json to_json(const Prediction& pred);
Prediction prediction_from_json(const Json& j);

Json to_json(const EvalReport& report);
Json to_json(const EvalSummary& summary);

/// Rule files: [{"name", "ancestor_tags", "attr_substrings", "label", "priority"}].
Json to_json(const std::vector<HeuristicRule>& rules);
std::vector<HeuristicRule> rules_from_json(const Json& j);

/// Block listing served to the tagging UI for parity checks.
Json blocks_to_json(const std::string& page_id, const std::vector<TextBlock>& blocks);

/// True for 16 lowercase hex digits.
bool is_text_hash(std::string_view s);

}  // namespace boilerfield
