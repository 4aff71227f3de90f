#include "boilerfield/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "boilerfield/error.hpp"

namespace boilerfield {

namespace {

bool is_field_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_field_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_field_space(line[i])) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::Io, 0, "cannot open embeddings file " + path.string());
  return parse(in);
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::vector<float> values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (table.dim_ == 0) {
      if (fields.size() < 2)
        throw LoadError(LoadError::Kind::DimMismatch, line_no,
                        "line " + std::to_string(line_no) + ": token without components");
      table.dim_ = fields.size() - 1;
    }
    if (fields.size() - 1 != table.dim_)
      throw LoadError(LoadError::Kind::DimMismatch, line_no,
                      "line " + std::to_string(line_no) + ": expected " + std::to_string(table.dim_) +
                          " components, found " + std::to_string(fields.size() - 1));
    values.clear();
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const auto field = fields[f];
      float v = 0.0F;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
        throw LoadError(LoadError::Kind::BadFloat, line_no,
                        "line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
      values.push_back(v);
    }
    table.insert(lowercase(fields[0]), values);
  }
  if (table.dim_ == 0) throw LoadError(LoadError::Kind::Empty, 0, "embeddings file is empty");
  return table;
}

bool EmbeddingTable::insert(std::string token, std::span<const float> values) {
  if (dim_ == 0) dim_ = values.size();
  if (values.size() != dim_)
    throw LoadError(LoadError::Kind::DimMismatch, 0, "vector for '" + token + "' has wrong dimension");
  if (index_.contains(token)) return false;
  index_.emplace(std::move(token), storage_.size());
  storage_.insert(storage_.end(), values.begin(), values.end());
  return true;
}

std::optional<std::span<const float>> EmbeddingTable::lookup(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(storage_).subspan(it->second, dim_);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char c : text) {
    const auto u = static_cast<unsigned char>(c);
    const bool word = u >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (word) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

FeatureVector embed_block(std::string_view text, const EmbeddingTable& table) {
  FeatureVector fv;
  fv.values.assign(table.dim(), 0.0);
  auto tokens = tokenize(text);
  // Summation in sorted token order makes the mean exactly order-independent.
  std::sort(tokens.begin(), tokens.end());
  for (const auto& token : tokens) {
    const auto vec = table.lookup(token);
    if (!vec) continue;
    for (std::size_t k = 0; k < fv.values.size(); ++k) fv.values[k] += (*vec)[k];
    ++fv.in_vocab_count;
  }
  if (fv.in_vocab_count > 0) {
    const auto count = static_cast<double>(fv.in_vocab_count);
    for (double& v : fv.values) v /= count;
  }
  return fv;
}

}  // namespace boilerfield
