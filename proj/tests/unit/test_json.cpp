#include <string>

#include "boilerfield/error.hpp"
#include "boilerfield/json_io.hpp"
#include "doctest.h"

using namespace boilerfield;

TEST_CASE("truth JSON round trip and validation") {
  const std::string text =
      R"({"page_id":"p1","blocks":[{"dom_path":"/html[1]/body[1]/p[1]/#text[1]","text_hash":"0123456789abcdef","label":1}]})";
  const auto page = truth_from_json(Json::parse(text));
  CHECK(page.page_id == "p1");
  REQUIRE(page.blocks.size() == 1);
  CHECK(page.blocks[0].label == 1);
  CHECK(truth_from_json(to_json(page)).blocks[0].text_hash == "0123456789abcdef");

  const auto rejects = [](const std::string& s) {
    try {
      truth_from_json(Json::parse(s));
    } catch (const SchemaError&) {
      return true;
    }
    return false;
  };
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","text_hash":"0123456789abcdef","label":2}]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","text_hash":"0123456789abcdef","label":true}]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","text_hash":"0123","label":1}]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","text_hash":"0123456789ABCDEF","label":1}]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","label":1}]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":{}})"));
  CHECK(rejects(R"({"blocks":[]})"));
  CHECK(rejects(R"({"page_id":"p","blocks":[],"extra":1})"));
  CHECK(rejects(R"([1,2])"));
  CHECK(rejects(R"({"page_id":"p","blocks":[{"dom_path":"/a","text_hash":"0123456789abcdef","label":1},
                                          {"dom_path":"/a","text_hash":"0123456789abcdef","label":0}]})"));
}

TEST_CASE("prediction JSON round trip") {
  Prediction p;
  p.page_id = "p";
  p.config = {{"kernel", "rbf"}};
  p.blocks.push_back({"/html[1]/body[1]/p[1]/#text[1]", "0123456789abcdef", 0.1 + 0.2, 0, false});
  const std::string text = dump_stable(to_json(p));
  CHECK(text.back() == '\n');
  const auto back = prediction_from_json(Json::parse(text));
  CHECK(back.blocks[0].score == 0.1 + 0.2);  // shortest round-trip formatting is exact
  CHECK(back.config == p.config);
  CHECK(dump_stable(to_json(back)) == text);
  // Keys are sorted.
  CHECK(text.find("\"blocks\"") < text.find("\"config\""));
  CHECK(text.find("\"config\"") < text.find("\"page_id\""));
}

TEST_CASE("rule files") {
  const auto rules = rules_from_json(to_json(default_rules()));
  CHECK(rules.size() == default_rules().size());
  CHECK(rules[0].ancestor_tags == std::vector<std::string>{"article"});
  CHECK(rules_from_json(Json::parse(R"([{"name":"x","label":0,"priority":1,"ancestor_tags":["nav"]}])")).size() == 1);
  CHECK_THROWS_AS(rules_from_json(Json::parse(R"([{"name":"x","label":0}])")), SchemaError);
  CHECK_THROWS_AS(rules_from_json(Json::parse(R"([])")), SeedError);
}
