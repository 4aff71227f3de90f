// HTML tokenizer and tree builder.
//
// Follows the HTML5 tree-construction algorithm for everything that decides
// where a node ends up: implied html/head/body, head-element relocation,
// p/li/dd/dt/heading auto-closing, the table section and row insertion rules,
// foster parenting and raw-text/RCDATA content. The adoption agency algorithm
// for misnested formatting elements is approximated by a plain pop.

#include <algorithm>
#include <initializer_list>

#include "boilerfield/dom.hpp"
#include "internal.hpp"

namespace boilerfield {
namespace {

using detail::ascii_lower;
using detail::is_ascii_alnum;
using detail::is_ascii_alpha;
using detail::is_ascii_digit;
using detail::is_html_space;

bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_void(std::string_view tag) {
  return one_of(tag, {"area", "base", "basefont", "bgsound", "br", "col", "embed", "hr", "img", "input",
                      "keygen", "link", "meta", "param", "source", "track", "wbr", "frame"});
}

bool is_special(std::string_view tag) {
  return one_of(tag, {"address", "applet", "area", "article", "aside", "base", "basefont", "bgsound",
                      "blockquote", "body", "br", "button", "caption", "center", "col", "colgroup",
                      "dd", "details", "dir", "div", "dl", "dt", "embed", "fieldset", "figcaption",
                      "figure", "footer", "form", "frame", "frameset", "h1", "h2", "h3", "h4", "h5",
                      "h6", "head", "header", "hgroup", "hr", "html", "iframe", "img", "input",
                      "keygen", "li", "link", "listing", "main", "marquee", "menu", "meta", "nav",
                      "noembed", "noframes", "noscript", "object", "ol", "p", "param", "plaintext",
                      "pre", "script", "search", "section", "select", "source", "style", "summary",
                      "table", "tbody", "td", "template", "textarea", "tfoot", "th", "thead",
                      "title", "tr", "track", "ul", "wbr", "xmp"});
}

bool is_heading(std::string_view tag) { return one_of(tag, {"h1", "h2", "h3", "h4", "h5", "h6"}); }

bool is_scope_boundary(std::string_view tag) {
  return one_of(tag, {"applet", "caption", "html", "table", "td", "th", "marquee", "object", "template",
                      "foreignobject", "desc", "mi", "mo", "mn", "ms", "mtext", "annotation-xml"});
}

bool is_table_context(std::string_view tag) { return one_of(tag, {"table", "tbody", "tfoot", "thead", "tr"}); }

bool closes_open_p(std::string_view tag) {
  return one_of(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
                      "div", "dl", "fieldset", "figcaption", "figure", "footer", "header", "hgroup",
                      "main", "menu", "nav", "ol", "p", "search", "section", "summary", "ul", "h1",
                      "h2", "h3", "h4", "h5", "h6", "pre", "listing", "form", "hr", "xmp",
                      "plaintext", "table"});
}

bool is_head_element(std::string_view tag) {
  return one_of(tag, {"base", "basefont", "bgsound", "link", "meta", "noframes", "noscript", "script",
                      "style", "template", "title"});
}

bool all_space(std::string_view s) { return std::all_of(s.begin(), s.end(), is_html_space); }

// ---------------------------------------------------------------------------
// Character references

char32_t numeric_reference_value(unsigned long long value) {
  if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return 0xFFFD;
  if (value >= 0x80 && value <= 0x9F) return detail::windows1252(static_cast<unsigned char>(value));
  return static_cast<char32_t>(value);
}

std::string decode_references(std::string_view in, bool in_attribute) {
  if (in.find('&') == std::string_view::npos) return std::string(in);
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '&') {
      out.push_back(in[i++]);
      continue;
    }
    const std::string_view rest = in.substr(i + 1);
    if (!rest.empty() && rest[0] == '#') {
      const bool hex = rest.size() > 1 && (rest[1] == 'x' || rest[1] == 'X');
      std::size_t j = hex ? 2 : 1;
      unsigned long long value = 0;
      const std::size_t digits_start = j;
      while (j < rest.size()) {
        const char c = rest[j];
        int digit = -1;
        if (is_ascii_digit(c)) {
          digit = c - '0';
        } else if (hex && c >= 'a' && c <= 'f') {
          digit = c - 'a' + 10;
        } else if (hex && c >= 'A' && c <= 'F') {
          digit = c - 'A' + 10;
        }
        if (digit < 0) break;
        value = std::min<unsigned long long>(value * (hex ? 16 : 10) + digit, 0x110000);
        ++j;
      }
      if (j == digits_start) {
        out.push_back('&');
        ++i;
        continue;
      }
      if (j < rest.size() && rest[j] == ';') ++j;
      detail::append_utf8(out, numeric_reference_value(value));
      i += 1 + j;
      continue;
    }
    std::size_t length = 0;
    const auto match = detail::match_named_reference(rest, length);
    if (match) {
      const bool terminated = rest[length - 1] == ';';
      const bool blocked = in_attribute && !terminated && length < rest.size() &&
                           (is_ascii_alnum(rest[length]) || rest[length] == '=');
      if (!blocked) {
        for (const char32_t cp : *match) detail::append_utf8(out, cp);
        i += 1 + length;
        continue;
      }
    }
    out.push_back('&');
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tokenizer

struct Token {
  enum class Type { StartTag, EndTag, Text, Comment, Doctype, Eof };
  Type type = Type::Eof;
  std::string name;
  std::vector<Attribute> attributes;
  bool self_closing = false;
  std::string data;
  std::size_t offset = 0;
};

enum class ContentMode { Data, RawText, RcData, Plaintext };

class Tokenizer {
 public:
  explicit Tokenizer(std::string input) : input_(std::move(input)) {}

  void switch_to(ContentMode mode, std::string end_tag) {
    mode_ = mode;
    raw_end_tag_ = std::move(end_tag);
  }

  Token next() {
    while (true) {
      if (pos_ >= input_.size()) return Token{};
      if (mode_ == ContentMode::Plaintext) return text_token(input_.size(), false);
      if (mode_ == ContentMode::RawText || mode_ == ContentMode::RcData) {
        const std::size_t end = find_raw_end();
        const bool decode = mode_ == ContentMode::RcData;
        mode_ = ContentMode::Data;
        if (end > pos_) return text_token(end, decode);
        continue;
      }
      if (input_[pos_] == '<' && starts_markup(pos_)) {
        if (auto token = markup()) return std::move(*token);
        continue;  // consumed something that yields no token, e.g. "</>"
      }
      return text_token(find_text_end(), true);
    }
  }

 private:
  std::string_view view() const { return input_; }

  bool starts_markup(std::size_t i) const {
    if (i + 1 >= input_.size()) return false;
    const char c = input_[i + 1];
    if (is_ascii_alpha(c) || c == '!' || c == '?') return true;
    return c == '/' && i + 2 < input_.size();
  }

  std::size_t find_text_end() const {
    std::size_t from = pos_ + 1;
    while (true) {
      const std::size_t i = input_.find('<', from);
      if (i == std::string::npos) return input_.size();
      if (starts_markup(i)) return i;
      from = i + 1;
    }
  }

  std::size_t find_raw_end() const {
    std::size_t i = pos_;
    while ((i = input_.find("</", i)) != std::string::npos) {
      const std::size_t name_end = i + 2 + raw_end_tag_.size();
      if (name_end <= input_.size()) {
        bool same = true;
        for (std::size_t k = 0; k < raw_end_tag_.size(); ++k) {
          if (ascii_lower(input_[i + 2 + k]) != raw_end_tag_[k]) {
            same = false;
            break;
          }
        }
        if (same && (name_end == input_.size() || is_html_space(input_[name_end]) ||
                     input_[name_end] == '/' || input_[name_end] == '>'))
          return i;
      }
      i += 2;
    }
    return input_.size();
  }

  Token text_token(std::size_t end, bool decode) {
    Token t;
    t.type = Token::Type::Text;
    t.offset = pos_;
    const std::string_view raw = view().substr(pos_, end - pos_);
    t.data = decode ? decode_references(raw, false) : std::string(raw);
    pos_ = end;
    return t;
  }

  Token comment_until(std::size_t start, std::string_view terminator, std::size_t body_start) {
    Token t;
    t.type = Token::Type::Comment;
    t.offset = start;
    std::size_t end = input_.find(terminator, body_start);
    if (end == std::string::npos) {
      t.data = input_.substr(body_start);
      pos_ = input_.size();
    } else {
      t.data = input_.substr(body_start, end - body_start);
      pos_ = end + terminator.size();
    }
    return t;
  }

  std::optional<Token> markup() {
    const std::size_t start = pos_;
    const std::string_view rest = view().substr(pos_);
    if (rest.substr(0, 4) == "<!--") {
      const std::size_t body = pos_ + 4;
      if (view().substr(body, 1) == ">" || view().substr(body, 2) == "->") {
        Token t;
        t.type = Token::Type::Comment;
        t.offset = start;
        pos_ = body + (input_[body] == '>' ? 1 : 2);
        return t;
      }
      // "--!>" also closes a comment.
      std::size_t end = input_.find("--", body);
      while (end != std::string::npos) {
        if (view().substr(end, 3) == "-->" || view().substr(end, 4) == "--!>") break;
        end = input_.find("--", end + 1);
      }
      Token t;
      t.type = Token::Type::Comment;
      t.offset = start;
      if (end == std::string::npos) {
        t.data = input_.substr(body);
        pos_ = input_.size();
      } else {
        t.data = input_.substr(body, end - body);
        pos_ = end + (input_[end + 2] == '!' ? 4 : 3);
      }
      return t;
    }
    if (rest[1] == '!') {
      if (detail::ascii_lowercase(rest.substr(0, 9)) == "<!doctype") {
        Token t = comment_until(start, ">", pos_ + 9);
        t.type = Token::Type::Doctype;
        return t;
      }
      return comment_until(start, ">", pos_ + 2);
    }
    if (rest[1] == '?') return comment_until(start, ">", pos_ + 1);
    if (rest[1] == '/') {
      if (rest[2] == '>') {
        pos_ += 3;
        return std::nullopt;
      }
      if (!is_ascii_alpha(rest[2])) return comment_until(start, ">", pos_ + 2);
      return tag(Token::Type::EndTag, pos_ + 2);
    }
    return tag(Token::Type::StartTag, pos_ + 1);
  }

  // Returns nullopt (and consumes the rest) if the input ends inside the tag.
  std::optional<Token> tag(Token::Type type, std::size_t i) {
    Token t;
    t.type = type;
    t.offset = pos_;
    const std::size_t n = input_.size();
    while (i < n && !is_html_space(input_[i]) && input_[i] != '/' && input_[i] != '>')
      t.name.push_back(ascii_lower(input_[i++]));
    while (true) {
      while (i < n && (is_html_space(input_[i]) || input_[i] == '/')) {
        if (input_[i] == '/' && i + 1 < n && input_[i + 1] == '>') t.self_closing = true;
        ++i;
      }
      if (i >= n) {
        pos_ = n;
        return std::nullopt;
      }
      if (input_[i] == '>') {
        pos_ = i + 1;
        if (type == Token::Type::EndTag) t.attributes.clear();
        return t;
      }
      std::string name;
      name.push_back(ascii_lower(input_[i++]));
      while (i < n && !is_html_space(input_[i]) && input_[i] != '/' && input_[i] != '>' && input_[i] != '=')
        name.push_back(ascii_lower(input_[i++]));
      std::size_t j = i;
      while (j < n && is_html_space(input_[j])) ++j;
      std::string value;
      if (j < n && input_[j] == '=') {
        i = j + 1;
        while (i < n && is_html_space(input_[i])) ++i;
        if (i < n && (input_[i] == '"' || input_[i] == '\'')) {
          const char quote = input_[i++];
          const std::size_t close = input_.find(quote, i);
          if (close == std::string::npos) {
            pos_ = n;
            return std::nullopt;
          }
          value = decode_references(view().substr(i, close - i), true);
          i = close + 1;
        } else {
          const std::size_t vstart = i;
          while (i < n && !is_html_space(input_[i]) && input_[i] != '>') ++i;
          value = decode_references(view().substr(vstart, i - vstart), true);
        }
      }
      const bool duplicate = std::any_of(t.attributes.begin(), t.attributes.end(),
                                         [&](const Attribute& a) { return a.name == name; });
      if (!duplicate) t.attributes.push_back({std::move(name), std::move(value)});
    }
  }

  std::string input_;
  std::size_t pos_ = 0;
  ContentMode mode_ = ContentMode::Data;
  std::string raw_end_tag_;
};

std::string preprocess(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '\0') continue;
    if (c == '\r') {
      out.push_back('\n');
      if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree builder

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string input) : tokenizer_(std::move(input)) {}

  DomTree run() {
    while (true) {
      Token token = tokenizer_.next();
      if (skip_newline_) {
        skip_newline_ = false;
        if (token.type == Token::Type::Text && !token.data.empty() && token.data[0] == '\n') {
          token.data.erase(0, 1);
          ++token.offset;
          if (token.data.empty()) continue;
        }
      }
      if (token.type == Token::Type::Eof) break;
      process(token);
    }
    finish();
    return std::move(tree_);
  }

 private:
  enum class Mode { BeforeHtml, BeforeHead, InHead, AfterHead, InBody };

  const std::string& tag_of(NodeId id) const { return tree_.node(id).tag; }
  NodeId current() const { return stack_.back(); }
  const std::string& current_tag() const { return tag_of(current()); }

  bool in_foreign_content() const {
    return std::any_of(stack_.begin(), stack_.end(),
                       [&](NodeId id) { return tag_of(id) == "svg" || tag_of(id) == "math"; });
  }

  bool in_scope(std::string_view target, std::initializer_list<std::string_view> extra = {}) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const std::string& t = tag_of(*it);
      if (t == target) return true;
      if (is_scope_boundary(t) || one_of(t, extra)) return false;
    }
    return false;
  }

  bool in_table_scope(std::string_view target) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const std::string& t = tag_of(*it);
      if (t == target) return true;
      if (one_of(t, {"html", "table", "template"})) return false;
    }
    return false;
  }

  void pop_until(std::string_view tag) {
    while (stack_.size() > 1) {
      const bool hit = current_tag() == tag;
      stack_.pop_back();
      if (hit) return;
    }
  }

  void pop_while_not(std::initializer_list<std::string_view> stop) {
    while (stack_.size() > 1 && !one_of(current_tag(), stop)) stack_.pop_back();
  }

  void generate_implied_end_tags(std::string_view except = {}) {
    while (stack_.size() > 1) {
      const std::string& t = current_tag();
      if (t == except || !one_of(t, {"dd", "dt", "li", "optgroup", "option", "p", "rb", "rp", "rt", "rtc"}))
        return;
      stack_.pop_back();
    }
  }

  void close_p_if_open() {
    if (!in_scope("p", {"button"})) return;
    generate_implied_end_tags("p");
    pop_until("p");
  }

  // Where a new node goes: (parent, insert-before reference or nullopt).
  std::pair<NodeId, std::optional<NodeId>> insertion_point(bool foster) const {
    if (!foster || !is_table_context(current_tag())) return {current(), std::nullopt};
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (tag_of(*it) != "table") continue;
      const auto& table = tree_.node(*it);
      if (table.parent) return {*table.parent, *it};
      return {*std::next(it), std::nullopt};
    }
    return {current(), std::nullopt};
  }

  void place(NodeId node, std::pair<NodeId, std::optional<NodeId>> where) {
    if (where.second) {
      tree_.insert_before(where.first, node, *where.second);
    } else {
      tree_.append_child(where.first, node);
    }
  }

  void insert_text(const std::string& data, std::size_t offset) {
    const bool foster = !all_space(data);
    const auto where = insertion_point(foster);
    const auto& siblings = tree_.node(where.first).children;
    std::optional<NodeId> previous;
    if (where.second) {
      const auto it = std::find(siblings.begin(), siblings.end(), *where.second);
      if (it != siblings.begin()) previous = *std::prev(it);
    } else if (!siblings.empty()) {
      previous = siblings.back();
    }
    if (previous && tree_.node(*previous).kind == NodeKind::Text) {
      tree_.mutable_node(*previous).text += data;
      return;
    }
    const NodeId text = tree_.create(NodeKind::Text, {}, offset);
    tree_.mutable_node(text).text = data;
    place(text, where);
  }

  void insert_text_here(const Token& token) {
    auto& siblings = tree_.node(current()).children;
    if (!siblings.empty() && tree_.node(siblings.back()).kind == NodeKind::Text) {
      tree_.mutable_node(siblings.back()).text += token.data;
      return;
    }
    const NodeId text = tree_.create(NodeKind::Text, {}, token.offset);
    tree_.mutable_node(text).text = token.data;
    tree_.append_child(current(), text);
  }

  void insert_comment(const Token& token, std::optional<NodeId> parent = std::nullopt) {
    const NodeId comment = tree_.create(NodeKind::Comment, {}, token.offset);
    tree_.mutable_node(comment).text = token.data;
    if (parent) {
      tree_.append_child(*parent, comment);
    } else {
      place(comment, insertion_point(false));
    }
  }

  NodeId insert_element(std::string tag, std::vector<Attribute> attributes, std::size_t offset,
                        bool push, bool foster = false) {
    const NodeId element = tree_.create(NodeKind::Element, std::move(tag), offset);
    tree_.mutable_node(element).attributes = std::move(attributes);
    place(element, insertion_point(foster));
    if (push) stack_.push_back(element);
    return element;
  }

  NodeId insert_element(const Token& token, bool foster = false) {
    const bool push = !is_void(token.name) && !(token.self_closing && in_foreign_content());
    return insert_element(token.name, token.attributes, token.offset, push, foster);
  }

  void merge_attributes(NodeId target, const std::vector<Attribute>& attributes) {
    auto& existing = tree_.mutable_node(target).attributes;
    for (const auto& a : attributes) {
      const bool present = std::any_of(existing.begin(), existing.end(),
                                       [&](const Attribute& e) { return e.name == a.name; });
      if (!present) existing.push_back(a);
    }
  }

  void start_raw_content(const std::string& tag) {
    if (in_foreign_content() || current_tag() != tag) return;
    if (tag == "title" || tag == "textarea") {
      tokenizer_.switch_to(ContentMode::RcData, tag);
      raw_open_ = true;
    } else if (tag == "plaintext") {
      tokenizer_.switch_to(ContentMode::Plaintext, tag);
    } else if (one_of(tag, {"script", "style", "noscript", "noframes", "xmp", "iframe", "noembed", "template"})) {
      // Template contents are inert; keeping them as raw text leaves them
      // inside the (excluded) template element.
      tokenizer_.switch_to(ContentMode::RawText, tag);
      raw_open_ = true;
    }
  }

  void create_html(const std::vector<Attribute>& attributes, std::size_t offset) {
    html_ = tree_.create(NodeKind::Element, "html", offset);
    tree_.mutable_node(*html_).attributes = attributes;
    tree_.append_child(tree_.document(), *html_);
    stack_ = {*html_};
    mode_ = Mode::BeforeHead;
  }

  void create_head(const std::vector<Attribute>& attributes, std::size_t offset) {
    head_ = insert_element("head", attributes, offset, true);
    mode_ = Mode::InHead;
  }

  void create_body(const std::vector<Attribute>& attributes, std::size_t offset) {
    body_ = insert_element("body", attributes, offset, true);
    mode_ = Mode::InBody;
  }

  void process(const Token& token) {
    if (raw_open_) {
      // Content of a raw-text/RCDATA element, then its end tag.
      if (token.type == Token::Type::Text) return insert_text_here(token);
      raw_open_ = false;
      if (token.type == Token::Type::EndTag && token.name == current_tag()) {
        stack_.pop_back();
        if (relocated_head_ && current() == *head_) stack_.pop_back();
        relocated_head_ = false;
        return;
      }
    }
    switch (mode_) {
      case Mode::BeforeHtml: return before_html(token);
      case Mode::BeforeHead: return before_head(token);
      case Mode::InHead: return in_head(token);
      case Mode::AfterHead: return after_head(token);
      case Mode::InBody: return in_body(token);
    }
  }

  void before_html(const Token& token) {
    using T = Token::Type;
    if (token.type == T::Doctype) return;
    if (token.type == T::Comment) return insert_comment(token, tree_.document());
    if (token.type == T::Text && all_space(token.data)) return;
    if (token.type == T::StartTag && token.name == "html") return create_html(token.attributes, token.offset);
    if (token.type == T::EndTag && !one_of(token.name, {"head", "body", "html", "br"})) return;
    create_html({}, token.offset);
    process(token);
  }

  void before_head(const Token& token) {
    using T = Token::Type;
    if (token.type == T::Doctype) return;
    if (token.type == T::Comment) return insert_comment(token);
    if (token.type == T::Text && all_space(token.data)) return;
    if (token.type == T::StartTag && token.name == "html") return merge_attributes(*html_, token.attributes);
    if (token.type == T::StartTag && token.name == "head") return create_head(token.attributes, token.offset);
    if (token.type == T::EndTag && !one_of(token.name, {"head", "body", "html", "br"})) return;
    create_head({}, token.offset);
    process(token);
  }

  // Handles a token that belongs in <head>; returns false if it does not.
  bool head_content(const Token& token) {
    using T = Token::Type;
    if (token.type == T::Comment) {
      insert_comment(token);
      return true;
    }
    if (token.type == T::Text && all_space(token.data)) {
      insert_text(token.data, token.offset);
      return true;
    }
    if (token.type == T::StartTag && is_head_element(token.name)) {
      insert_element(token);
      start_raw_content(token.name);
      return true;
    }
    if (token.type == T::EndTag && token.name == "template" && current_tag() == "template") {
      stack_.pop_back();
      return true;
    }
    return false;
  }

  void in_head(const Token& token) {
    using T = Token::Type;
    if (token.type == T::Doctype) return;
    if (token.type == T::StartTag && token.name == "html") return merge_attributes(*html_, token.attributes);
    if (token.type == T::StartTag && token.name == "head") return;
    if (head_content(token)) return;
    if (token.type == T::EndTag && token.name == "head") {
      pop_until("head");
      mode_ = Mode::AfterHead;
      return;
    }
    if (token.type == T::EndTag && !one_of(token.name, {"body", "html", "br"})) return;
    pop_until("head");
    mode_ = Mode::AfterHead;
    process(token);
  }

  void after_head(const Token& token) {
    using T = Token::Type;
    if (token.type == T::Doctype) return;
    if (token.type == T::Comment || (token.type == T::Text && all_space(token.data))) {
      head_content(token);
      return;
    }
    if (token.type == T::StartTag && token.name == "html") return merge_attributes(*html_, token.attributes);
    if (token.type == T::StartTag && token.name == "body") return create_body(token.attributes, token.offset);
    if (token.type == T::StartTag && is_head_element(token.name)) {
      stack_.push_back(*head_);
      const std::size_t depth = stack_.size();
      head_content(token);
      // Raw-text elements keep head on the stack until their end tag.
      if (raw_open_) {
        relocated_head_ = true;
      } else {
        stack_.resize(depth - 1);
      }
      return;
    }
    if (token.type == T::StartTag && token.name == "head") return;
    if (token.type == T::EndTag && !one_of(token.name, {"body", "html", "br"})) return;
    create_body({}, token.offset);
    process(token);
  }

  void in_body(const Token& token) {
    using T = Token::Type;
    switch (token.type) {
      case T::Doctype:
        return;
      case T::Comment:
        if (after_body_) return insert_comment(token, *html_);
        return insert_comment(token);
      case T::Text:
        if (!all_space(token.data)) after_body_ = false;
        return insert_text(token.data, token.offset);
      case T::StartTag:
        after_body_ = false;
        return body_start_tag(token);
      case T::EndTag:
        if (token.name == "body" || token.name == "html") {
          after_body_ = true;
          return;
        }
        after_body_ = false;
        return body_end_tag(token);
      case T::Eof:
        return;
    }
  }

  void body_start_tag(const Token& original) {
    Token token = original;
    const std::string& name = token.name;
    if (name == "image") token.name = "img";

    if (name == "html") return merge_attributes(*html_, token.attributes);
    if (name == "body") {
      if (body_) merge_attributes(*body_, token.attributes);
      return;
    }
    if (one_of(name, {"head", "frameset", "frame"})) return;

    if (one_of(name, {"caption", "col", "colgroup", "tbody", "td", "tfoot", "th", "thead", "tr"})) {
      if (!in_table_scope("table")) return;
      return table_structure(token);
    }

    const bool table_ctx = is_table_context(current_tag());
    if (name == "table") {
      if (table_ctx) {
        pop_until("table");
      } else {
        close_p_if_open();
      }
      insert_element(token);
      return;
    }
    if (table_ctx) {
      if (one_of(name, {"script", "style", "template"})) {
        insert_element(token);
        start_raw_content(name);
        return;
      }
      if (name == "input" || name == "form") {
        insert_element(token.name, token.attributes, token.offset, false);
        return;
      }
      // Everything else is foster-parented in front of the table.
      if (closes_open_p(name)) close_p_if_open();
      insert_element(token, true);
      start_raw_content(name);
      return;
    }

    if (is_head_element(name)) {
      insert_element(token);
      start_raw_content(name);
      return;
    }
    if (name == "li" || name == "dd" || name == "dt") {
      for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        const std::string& t = tag_of(*it);
        const bool match = name == "li" ? t == "li" : (t == "dd" || t == "dt");
        if (match) {
          const std::string target = t;
          generate_implied_end_tags(target);
          pop_until(target);
          break;
        }
        if (is_special(t) && !one_of(t, {"address", "div", "p"})) break;
      }
      close_p_if_open();
      insert_element(token);
      return;
    }
    if (closes_open_p(name)) {
      close_p_if_open();
      if (is_heading(name) && is_heading(current_tag())) stack_.pop_back();
      insert_element(token);
      if (one_of(name, {"pre", "listing"})) skip_newline_ = true;
      start_raw_content(name);
      return;
    }
    if (name == "button" && in_scope("button")) {
      generate_implied_end_tags();
      pop_until("button");
    } else if (name == "a" && in_scope("a")) {
      pop_until("a");
    } else if (name == "nobr" && in_scope("nobr")) {
      pop_until("nobr");
    } else if (name == "option" && current_tag() == "option") {
      stack_.pop_back();
    } else if (name == "optgroup") {
      if (current_tag() == "option") stack_.pop_back();
      if (current_tag() == "optgroup") stack_.pop_back();
    } else if (one_of(name, {"rb", "rtc"}) && in_scope("ruby")) {
      generate_implied_end_tags();
    } else if (one_of(name, {"rp", "rt"}) && in_scope("ruby")) {
      generate_implied_end_tags("rtc");
    }
    insert_element(token);
    if (name == "textarea") skip_newline_ = true;
    start_raw_content(name);
  }

  NodeId insert_implied(std::string tag, std::size_t offset) {
    return insert_element(std::move(tag), {}, offset, true);
  }

  void table_structure(const Token& token) {
    const std::string& name = token.name;
    if (name == "caption" || name == "colgroup") {
      pop_while_not({"table", "template", "html"});
      insert_element(token);
    } else if (name == "col") {
      if (current_tag() != "colgroup") {
        pop_while_not({"table", "template", "html"});
        insert_implied("colgroup", token.offset);
      }
      insert_element(token);
    } else if (one_of(name, {"tbody", "thead", "tfoot"})) {
      pop_while_not({"table", "template", "html"});
      insert_element(token);
    } else if (name == "tr") {
      pop_while_not({"tbody", "thead", "tfoot", "table", "template", "html"});
      if (current_tag() == "table") insert_implied("tbody", token.offset);
      insert_element(token);
    } else {  // td, th
      if (in_table_scope("tr")) {
        pop_while_not({"tr", "template", "html"});
      } else {
        pop_while_not({"tbody", "thead", "tfoot", "table", "template", "html"});
        if (current_tag() == "table") insert_implied("tbody", token.offset);
        insert_implied("tr", token.offset);
      }
      insert_element(token);
    }
  }

  void body_end_tag(const Token& token) {
    const std::string& name = token.name;
    if (name == "p") {
      if (!in_scope("p", {"button"})) {
        insert_element("p", {}, token.offset, false);
        return;
      }
      generate_implied_end_tags("p");
      pop_until("p");
      return;
    }
    if (name == "br") {
      insert_element("br", {}, token.offset, false, true);
      return;
    }
    if (name == "li") {
      if (!in_scope("li", {"ol", "ul"})) return;
      generate_implied_end_tags("li");
      pop_until("li");
      return;
    }
    if (name == "dd" || name == "dt") {
      if (!in_scope(name)) return;
      generate_implied_end_tags(name);
      pop_until(name);
      return;
    }
    if (is_heading(name)) {
      const bool any = in_scope("h1") || in_scope("h2") || in_scope("h3") || in_scope("h4") ||
                       in_scope("h5") || in_scope("h6");
      if (!any) return;
      generate_implied_end_tags();
      while (stack_.size() > 1) {
        const bool heading = is_heading(current_tag());
        stack_.pop_back();
        if (heading) break;
      }
      return;
    }
    if (one_of(name, {"table", "tbody", "thead", "tfoot", "tr", "td", "th", "caption", "colgroup"})) {
      if (!in_table_scope(name)) return;
      pop_until(name);
      return;
    }
    if (name == "template" || name == "head") {
      if (name == "template" && in_table_scope("template")) pop_until("template");
      return;
    }
    // Generic end tag: pop to the nearest matching element unless a special
    // element intervenes.
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      const std::string& t = tag_of(*it);
      if (t == name) {
        generate_implied_end_tags(name);
        pop_until(name);
        return;
      }
      if (is_special(t)) return;
    }
  }

  void finish() {
    if (!html_) create_html({}, 0);
    if (!head_) create_head({}, 0);
    if (!body_) {
      stack_ = {*html_};
      create_body({}, 0);
    }
  }

  Tokenizer tokenizer_;
  DomTree tree_;
  std::vector<NodeId> stack_;
  std::optional<NodeId> html_;
  std::optional<NodeId> head_;
  std::optional<NodeId> body_;
  Mode mode_ = Mode::BeforeHtml;
  bool skip_newline_ = false;
  bool after_body_ = false;
  bool relocated_head_ = false;
  bool raw_open_ = false;
};

}  // namespace

DomTree parse_document(std::string_view html) {
  return TreeBuilder(preprocess(decode_document_bytes(html))).run();
}

}  // namespace boilerfield
