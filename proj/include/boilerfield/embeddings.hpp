#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace boilerfield {

/// Immutable word-vector table in GloVe text format.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::istream& in);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }

  /// Vector for `token` (already lowercase), or nullopt if out of vocabulary.
  std::optional<std::span<const float>> lookup(std::string_view token) const;

  /// Adds an entry; returns false (and leaves the table unchanged) if the
  /// token is already present. Throws LoadError::DimMismatch on bad length.
  bool insert(std::string token, std::span<const float> values);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::size_t dim_ = 0;
  std::vector<float> storage_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

struct FeatureVector {
  std::vector<double> values;
  std::size_t in_vocab_count = 0;

  bool is_zero() const noexcept { return in_vocab_count == 0; }
};

/// Lowercased tokens split on runs of non-alphanumeric ASCII characters.
/// Bytes >= 0x80 count as alphanumeric so non-ASCII words stay intact.
std::vector<std::string> tokenize(std::string_view text);

/// Mean of the in-vocabulary token vectors; the zero vector if none match.
FeatureVector embed_block(std::string_view text, const EmbeddingTable& table);

}  // namespace boilerfield
