#include <algorithm>
#include <charconv>

#include "boilerfield/dom.hpp"
#include "internal.hpp"

namespace boilerfield {

const std::string* DomNode::attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

DomTree::DomTree() { nodes_.push_back(DomNode{NodeKind::Document, {}, {}, {}, 0, std::nullopt, {}}); }

NodeId DomTree::create(NodeKind kind, std::string tag, std::size_t offset) {
  DomNode n;
  n.kind = kind;
  n.tag = std::move(tag);
  n.source_offset = offset;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

void DomTree::append_child(NodeId parent, NodeId child) {
  nodes_.at(child).parent = parent;
  nodes_.at(parent).children.push_back(child);
}

void DomTree::insert_before(NodeId parent, NodeId child, NodeId reference) {
  auto& children = nodes_.at(parent).children;
  const auto it = std::find(children.begin(), children.end(), reference);
  nodes_.at(child).parent = parent;
  children.insert(it, child);
}

namespace {

std::optional<NodeId> child_element(const DomTree& tree, NodeId parent, std::string_view tag) {
  for (const NodeId c : tree.node(parent).children) {
    const auto& n = tree.node(c);
    if (n.kind == NodeKind::Element && n.tag == tag) return c;
  }
  return std::nullopt;
}

}  // namespace

std::optional<NodeId> DomTree::html() const { return child_element(*this, document(), "html"); }

std::optional<NodeId> DomTree::body() const {
  const auto h = html();
  return h ? child_element(*this, *h, "body") : std::nullopt;
}

std::vector<NodeId> DomTree::text_nodes() const {
  std::vector<NodeId> out;
  std::vector<NodeId> pending{document()};
  while (!pending.empty()) {
    const NodeId id = pending.back();
    pending.pop_back();
    const auto& n = node(id);
    if (n.kind == NodeKind::Text) out.push_back(id);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) pending.push_back(*it);
  }
  return out;
}

std::string DomTree::path_of(NodeId id) const {
  std::vector<std::string> segments;
  NodeId cur = id;
  while (node(cur).parent) {
    const auto& n = node(cur);
    const auto& siblings = node(*n.parent).children;
    std::size_t k = 1;
    for (const NodeId s : siblings) {
      if (s == cur) break;
      const auto& sn = node(s);
      if (n.kind == NodeKind::Text ? sn.kind == NodeKind::Text
                                   : (sn.kind == NodeKind::Element && sn.tag == n.tag))
        ++k;
    }
    const std::string name = n.kind == NodeKind::Text ? "#text" : n.tag;
    segments.push_back("/" + name + "[" + std::to_string(k) + "]");
    cur = *n.parent;
  }
  std::string path;
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) path += *it;
  return path;
}

std::optional<NodeId> DomTree::resolve(std::string_view path) const {
  NodeId cur = document();
  while (!path.empty()) {
    if (path[0] != '/') return std::nullopt;
    const std::size_t open = path.find('[');
    const std::size_t close = path.find(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    const std::string_view name = path.substr(1, open - 1);
    std::size_t k = 0;
    const auto digits = path.substr(open + 1, close - open - 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0 || name.empty())
      return std::nullopt;
    const bool text = name == "#text";
    std::optional<NodeId> found;
    for (const NodeId c : node(cur).children) {
      const auto& n = node(c);
      const bool match = text ? n.kind == NodeKind::Text : (n.kind == NodeKind::Element && n.tag == name);
      if (match && --k == 0) {
        found = c;
        break;
      }
    }
    if (!found) return std::nullopt;
    cur = *found;
    path.remove_prefix(close + 1);
    if (text && !path.empty()) return std::nullopt;
  }
  return cur == document() ? std::nullopt : std::optional<NodeId>(cur);
}

bool is_excluded_tag(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "noscript" || tag == "template" || tag == "iframe";
}

namespace {

bool hides_content(const DomNode& n) {
  if (n.attribute("hidden") != nullptr) return true;
  const std::string* style = n.attribute("style");
  if (style == nullptr) return false;
  std::string compact;
  for (const char c : *style) {
    if (!detail::is_html_space(c)) compact.push_back(detail::ascii_lower(c));
  }
  return compact.find("display:none") != std::string::npos;
}

}  // namespace

std::vector<TextBlock> extract_text_blocks(const DomTree& tree) {
  std::vector<TextBlock> blocks;
  for (const NodeId id : tree.text_nodes()) {
    const auto& node = tree.node(id);
    std::vector<NodeId> ancestors;
    for (auto p = node.parent; p && tree.node(*p).kind == NodeKind::Element; p = tree.node(*p).parent)
      ancestors.push_back(*p);
    std::reverse(ancestors.begin(), ancestors.end());
    const bool excluded = std::any_of(ancestors.begin(), ancestors.end(),
                                      [&](NodeId a) { return is_excluded_tag(tree.node(a).tag); });
    if (excluded) continue;
    std::string text = normalize_text(node.text);
    if (text.empty()) continue;

    TextBlock block;
    block.index = blocks.size();
    block.dom_path = tree.path_of(id);
    for (const NodeId a : ancestors) {
      const auto& an = tree.node(a);
      block.tag_chain.push_back(an.tag);
      block.ancestor_attributes.push_back(an.attributes);
      block.hidden = block.hidden || hides_content(an);
    }
    block.text_hash = text_hash(text);
    block.text = std::move(text);
    block.source_offset = node.source_offset;
    block.node = id;
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace boilerfield
