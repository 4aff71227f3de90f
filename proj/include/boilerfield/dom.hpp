#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace boilerfield {

using NodeId = std::size_t;

enum class NodeKind { Document, Element, Text, Comment };

struct Attribute {
  std::string name;   // lowercase
  std::string value;  // entity-decoded
};

struct DomNode {
  NodeKind kind = NodeKind::Element;
  std::string tag;                    // lowercase element name; empty otherwise
  std::vector<Attribute> attributes;  // elements only, source order
  std::string text;                   // text and comment data
  std::size_t source_offset = 0;      // byte offset of the originating token
  std::optional<NodeId> parent;
  std::vector<NodeId> children;

  const std::string* attribute(std::string_view name) const;
};

/// Element tree produced by `parse_document`. Node 0 is the document node;
/// its only element child is `html`, which always has `head` and `body`.
class DomTree {
 public:
  DomTree();

  const DomNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId document() const noexcept { return 0; }
  std::optional<NodeId> html() const;
  std::optional<NodeId> body() const;

  /// All text nodes in document (pre-order) order.
  std::vector<NodeId> text_nodes() const;

  /// Canonical path for an element or text node, e.g.
  /// `/html[1]/body[1]/p[1]/#text[1]`.
  std::string path_of(NodeId id) const;

  /// Inverse of `path_of`; nullopt when the path does not name a node.
  std::optional<NodeId> resolve(std::string_view path) const;

  // Mutation interface used by the tree builder.
  NodeId create(NodeKind kind, std::string tag = {}, std::size_t offset = 0);
  void append_child(NodeId parent, NodeId child);
  void insert_before(NodeId parent, NodeId child, NodeId reference);
  DomNode& mutable_node(NodeId id) { return nodes_.at(id); }

 private:
  std::vector<DomNode> nodes_;
};

/// Error-recovering HTML parse following the HTML5 tree-construction rules
/// that shape element nesting (implied html/head/body, auto-closing p/li/dd/dt
/// and table sections, implied tbody/tr, foster parenting, raw-text elements).
/// Throws IngestError::Encoding when the bytes are not decodable.
DomTree parse_document(std::string_view html);

/// Converts raw bytes to UTF-8, honoring a BOM or a `<meta charset>` found in
/// the first 1024 bytes. Throws IngestError::Encoding.
std::string decode_document_bytes(std::string_view bytes);

/// Collapses runs of Unicode whitespace to one ASCII space and trims.
std::string normalize_text(std::string_view raw);

bool is_valid_utf8(std::string_view s);

/// 64-bit FNV-1a over the UTF-8 bytes.
std::uint64_t fnv1a64(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);
inline std::string text_hash(std::string_view normalized) { return hash_hex(fnv1a64(normalized)); }

struct TextBlock {
  std::size_t index = 0;
  std::string dom_path;
  std::vector<std::string> tag_chain;  // html ... parent
  /// Attributes of each ancestor, aligned with `tag_chain`.
  std::vector<std::vector<Attribute>> ancestor_attributes;
  std::string text;
  std::string text_hash;
  /// An ancestor carries `hidden` or an inline `display:none`.
  bool hidden = false;
  std::size_t source_offset = 0;
  NodeId node = 0;
};

/// Elements whose text never becomes a block.
bool is_excluded_tag(std::string_view tag);

std::vector<TextBlock> extract_text_blocks(const DomTree& tree);

inline std::vector<TextBlock> extract_text_blocks(std::string_view html) {
  return extract_text_blocks(parse_document(html));
}

}  // namespace boilerfield
