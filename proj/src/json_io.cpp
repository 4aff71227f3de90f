#include "boilerfield/json_io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <system_error>

#include "boilerfield/error.hpp"

namespace boilerfield {

std::string dump_stable(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

bool is_text_hash(std::string_view s) {
  if (s.size() != 16) return false;
  for (const char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

namespace {

void expect(bool ok, const std::string& what) {
  if (!ok) throw SchemaError(what);
}

void expect_keys(const Json& obj, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional, const std::string& where) {
  expect(obj.is_object(), where + " must be an object");
  std::set<std::string> allowed;
  for (const char* k : required) {
    expect(obj.contains(k), where + " is missing \"" + k + "\"");
    allowed.insert(k);
  }
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : obj.items())
    expect(allowed.contains(item.key()), where + " has unexpected key \"" + item.key() + "\"");
}

int binary_label(const Json& v, const std::string& where) {
  expect(v.is_number_integer() && (v.get<long long>() == 0 || v.get<long long>() == 1),
         where + ": label must be 0 or 1");
  return v.get<int>();
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = obj.at(key);
  expect(v.is_string(), where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

Json optional_metric(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const GroundTruthPage& page) {
  Json blocks = Json::array();
  for (const auto& b : page.blocks)
    blocks.push_back({{"dom_path", b.dom_path}, {"text_hash", b.text_hash}, {"label", b.label}});
  return {{"page_id", page.page_id}, {"blocks", blocks}};
}

GroundTruthPage truth_from_json(const Json& j) {
  expect_keys(j, {"page_id", "blocks"}, {}, "ground truth");
  GroundTruthPage page;
  page.page_id = string_field(j, "page_id", "ground truth");
  expect(j.at("blocks").is_array(), "ground truth: \"blocks\" must be an array");
  std::set<std::string> paths;
  std::size_t k = 0;
  for (const auto& b : j.at("blocks")) {
    const std::string where = "ground truth block " + std::to_string(k++);
    expect_keys(b, {"dom_path", "text_hash", "label"}, {}, where);
    GroundTruthBlock block;
    block.dom_path = string_field(b, "dom_path", where);
    block.text_hash = string_field(b, "text_hash", where);
    expect(is_text_hash(block.text_hash), where + ": text_hash must be 16 lowercase hex digits");
    block.label = binary_label(b.at("label"), where);
    expect(paths.insert(block.dom_path).second, where + ": duplicate dom_path " + block.dom_path);
    page.blocks.push_back(std::move(block));
  }
  return page;
}

Json to_json(const Prediction& pred) {
  Json blocks = Json::array();
  for (const auto& b : pred.blocks) {
    blocks.push_back({{"dom_path", b.dom_path},
                      {"text_hash", b.text_hash},
                      {"score", b.score},
                      {"label", b.label},
                      {"seed", b.seed}});
  }
  return {{"page_id", pred.page_id}, {"config", pred.config}, {"blocks", blocks}, {"stats", pred.stats}};
}

Prediction prediction_from_json(const Json& j) {
  expect_keys(j, {"page_id", "blocks"}, {"config", "stats"}, "prediction");
  Prediction pred;
  pred.page_id = string_field(j, "page_id", "prediction");
  if (j.contains("config")) pred.config = j.at("config");
  if (j.contains("stats")) pred.stats = j.at("stats");
  expect(j.at("blocks").is_array(), "prediction: \"blocks\" must be an array");
  std::size_t k = 0;
  for (const auto& b : j.at("blocks")) {
    const std::string where = "prediction block " + std::to_string(k++);
    expect_keys(b, {"dom_path", "text_hash", "score", "label", "seed"}, {}, where);
    PredictedBlock block;
    block.dom_path = string_field(b, "dom_path", where);
    block.text_hash = string_field(b, "text_hash", where);
    expect(is_text_hash(block.text_hash), where + ": text_hash must be 16 lowercase hex digits");
    expect(b.at("score").is_number(), where + ": score must be a number");
    block.score = b.at("score").get<double>();
    block.label = binary_label(b.at("label"), where);
    expect(b.at("seed").is_boolean(), where + ": seed must be a boolean");
    block.seed = b.at("seed").get<bool>();
    pred.blocks.push_back(std::move(block));
  }
  return pred;
}

Json to_json(const EvalReport& r) {
  return {{"page_id", r.page_id},
          {"tp", r.tp},
          {"fp", r.fp},
          {"fn", r.fn},
          {"tn", r.tn},
          {"precision", optional_metric(r.precision)},
          {"recall", optional_metric(r.recall)},
          {"f1", optional_metric(r.f1)},
          {"accuracy", optional_metric(r.accuracy)},
          {"matched", r.matched},
          {"unmatched_pred", r.unmatched_pred},
          {"unmatched_truth", r.unmatched_truth},
          {"seeds_excluded", r.seeds_excluded}};
}

Json to_json(const EvalSummary& s) {
  const auto metric = [](const MetricSummary& m) {
    return Json{{"mean", optional_metric(m.mean)}, {"pages", m.pages}, {"excluded", m.excluded}};
  };
  return {{"averaging", s.averaging == Averaging::Macro ? "macro" : "micro"},
          {"pages", s.pages},
          {"precision", metric(s.precision)},
          {"recall", metric(s.recall)},
          {"f1", metric(s.f1)},
          {"accuracy", metric(s.accuracy)},
          {"totals", to_json(s.totals)}};
}

Json to_json(const std::vector<HeuristicRule>& rules) {
  Json out = Json::array();
  for (const auto& r : rules) {
    out.push_back({{"name", r.name},
                   {"ancestor_tags", r.ancestor_tags},
                   {"attr_substrings", r.attr_substrings},
                   {"label", r.label},
                   {"priority", r.priority}});
  }
  return out;
}

std::vector<HeuristicRule> rules_from_json(const Json& j) {
  expect(j.is_array(), "rule file must be a JSON array");
  std::vector<HeuristicRule> rules;
  std::size_t k = 0;
  for (const auto& item : j) {
    const std::string where = "rule " + std::to_string(k++);
    expect_keys(item, {"name", "label", "priority"}, {"ancestor_tags", "attr_substrings"}, where);
    HeuristicRule r;
    r.name = string_field(item, "name", where);
    r.label = binary_label(item.at("label"), where);
    expect(item.at("priority").is_number_integer(), where + ": priority must be an integer");
    r.priority = item.at("priority").get<int>();
    for (const char* key : {"ancestor_tags", "attr_substrings"}) {
      if (!item.contains(key)) continue;
      const Json& list = item.at(key);
      expect(list.is_array(), where + ": \"" + key + "\" must be an array of strings");
      for (const auto& s : list) {
        expect(s.is_string(), where + ": \"" + key + "\" must be an array of strings");
        (std::string(key) == "ancestor_tags" ? r.ancestor_tags : r.attr_substrings).push_back(s.get<std::string>());
      }
    }
    rules.push_back(std::move(r));
  }
  validate_rules(rules);
  return rules;
}

Json blocks_to_json(const std::string& page_id, const std::vector<TextBlock>& blocks) {
  Json list = Json::array();
  for (const auto& b : blocks) {
    list.push_back({{"index", b.index}, {"dom_path", b.dom_path}, {"text_hash", b.text_hash}, {"text", b.text}});
  }
  return {{"page_id", page_id}, {"blocks", list}};
}

}  // namespace boilerfield
