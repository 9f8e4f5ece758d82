#include "digestweaver/html.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"

namespace digestweaver {

namespace {

using Attributes = std::vector<std::pair<std::string, std::string>>;

const std::unordered_set<std::string_view> kVoidTags = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "keygen",
    "link", "meta", "param", "source", "track", "wbr",
};

// Elements whose content is not markup. RCDATA elements still decode entities.
const std::unordered_set<std::string_view> kRawTextTags = {
    "script", "style", "xmp", "iframe", "noembed", "noframes", "noscript",
};
const std::unordered_set<std::string_view> kRcdataTags = {"textarea", "title"};

// A start tag of one of these closes an open <p>.
const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "center", "details", "dialog",
    "dir", "div", "dl", "fieldset", "figcaption", "figure", "footer", "form",
    "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "main",
    "menu", "nav", "ol", "p", "pre", "section", "summary", "table", "ul",
    "li", "dd", "dt", "listing", "plaintext",
};

// Stack entries an end tag may not pop through unless it names them.
const std::unordered_set<std::string_view> kScopeBarriers = {
    "applet", "caption", "html", "table", "td", "th", "marquee", "object",
    "template", "svg", "math",
};

const std::unordered_set<std::string_view> kTableParts = {
    "table", "caption", "colgroup", "tbody", "thead", "tfoot", "tr", "td", "th",
};

bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

// Windows-1252 remapping for numeric references in 0x80..0x9F.
constexpr std::array<char32_t, 32> kC1Replacements = {
    0x20AC, 0x81,   0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0x8D,   0x017D, 0x8F,
    0x90,   0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0x9D,   0x017E, 0x0178,
};

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''},
      {"nbsp", 0xA0}, {"copy", 0xA9}, {"reg", 0xAE}, {"trade", 0x2122},
      {"hellip", 0x2026}, {"mdash", 0x2014}, {"ndash", 0x2013},
      {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"sbquo", 0x201A},
      {"ldquo", 0x201C}, {"rdquo", 0x201D}, {"bdquo", 0x201E},
      {"laquo", 0xAB}, {"raquo", 0xBB}, {"lsaquo", 0x2039}, {"rsaquo", 0x203A},
      {"bull", 0x2022}, {"middot", 0xB7}, {"deg", 0xB0}, {"plusmn", 0xB1},
      {"times", 0xD7}, {"divide", 0xF7}, {"sect", 0xA7}, {"para", 0xB6},
      {"cent", 0xA2}, {"pound", 0xA3}, {"euro", 0x20AC}, {"yen", 0xA5},
      {"iexcl", 0xA1}, {"iquest", 0xBF}, {"shy", 0xAD}, {"ensp", 0x2002},
      {"emsp", 0x2003}, {"thinsp", 0x2009}, {"zwnj", 0x200C}, {"zwj", 0x200D},
      {"dagger", 0x2020}, {"Dagger", 0x2021}, {"permil", 0x2030},
      {"larr", 0x2190}, {"rarr", 0x2192}, {"uarr", 0x2191}, {"darr", 0x2193},
      {"frac12", 0xBD}, {"frac14", 0xBC}, {"frac34", 0xBE}, {"sup2", 0xB2},
      {"sup3", 0xB3}, {"micro", 0xB5}, {"ordf", 0xAA}, {"ordm", 0xBA},
      {"Agrave", 0xC0}, {"Aacute", 0xC1}, {"Acirc", 0xC2}, {"Atilde", 0xC3},
      {"Auml", 0xC4}, {"Aring", 0xC5}, {"AElig", 0xC6}, {"Ccedil", 0xC7},
      {"Egrave", 0xC8}, {"Eacute", 0xC9}, {"Ecirc", 0xCA}, {"Euml", 0xCB},
      {"Igrave", 0xCC}, {"Iacute", 0xCD}, {"Icirc", 0xCE}, {"Iuml", 0xCF},
      {"Ntilde", 0xD1}, {"Ograve", 0xD2}, {"Oacute", 0xD3}, {"Ocirc", 0xD4},
      {"Otilde", 0xD5}, {"Ouml", 0xD6}, {"Oslash", 0xD8}, {"Ugrave", 0xD9},
      {"Uacute", 0xDA}, {"Ucirc", 0xDB}, {"Uuml", 0xDC}, {"Yacute", 0xDD},
      {"szlig", 0xDF}, {"agrave", 0xE0}, {"aacute", 0xE1}, {"acirc", 0xE2},
      {"atilde", 0xE3}, {"auml", 0xE4}, {"aring", 0xE5}, {"aelig", 0xE6},
      {"ccedil", 0xE7}, {"egrave", 0xE8}, {"eacute", 0xE9}, {"ecirc", 0xEA},
      {"euml", 0xEB}, {"igrave", 0xEC}, {"iacute", 0xED}, {"icirc", 0xEE},
      {"iuml", 0xEF}, {"ntilde", 0xF1}, {"ograve", 0xF2}, {"oacute", 0xF3},
      {"ocirc", 0xF4}, {"otilde", 0xF5}, {"ouml", 0xF6}, {"oslash", 0xF8},
      {"ugrave", 0xF9}, {"uacute", 0xFA}, {"ucirc", 0xFB}, {"uuml", 0xFC},
      {"yacute", 0xFD}, {"yuml", 0xFF},
  };
  return table;
}

// Legacy references recognised without a trailing semicolon.
const std::unordered_set<std::string_view> kLegacyEntities = {
    "amp", "lt", "gt", "quot", "nbsp", "copy", "reg",
};

char32_t sanitize_numeric_reference(std::uint64_t value) {
  if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) return 0xFFFD;
  if (value >= 0x80 && value <= 0x9F) return kC1Replacements[value - 0x80];
  return static_cast<char32_t>(value);
}

// Tries to decode one character reference starting at s[pos] == '&'.
// On success appends to `out`, advances `pos` and returns true.
bool decode_reference(std::string_view s, std::size_t& pos, std::string& out) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '#') {
    ++i;
    const bool hex = i < s.size() && (s[i] == 'x' || s[i] == 'X');
    if (hex) ++i;
    const std::size_t digits_start = i;
    std::uint64_t value = 0;
    while (i < s.size()) {
      const char c = s[i];
      int d = -1;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
      if (d < 0) break;
      value = std::min<std::uint64_t>(value * (hex ? 16 : 10) + static_cast<unsigned>(d), 0x110000);
      ++i;
    }
    if (i == digits_start) return false;
    if (i < s.size() && s[i] == ';') ++i;
    text::append_utf8(out, sanitize_numeric_reference(value));
    pos = i;
    return true;
  }

  const std::size_t name_start = i;
  while (i < s.size() && i - name_start < 32 &&
         (is_ascii_alpha(s[i]) || (s[i] >= '0' && s[i] <= '9'))) {
    ++i;
  }
  if (i == name_start) return false;
  const auto name = s.substr(name_start, i - name_start);
  const auto& table = named_entities();
  if (i < s.size() && s[i] == ';') {
    if (auto it = table.find(name); it != table.end()) {
      text::append_utf8(out, it->second);
      pos = i + 1;
      return true;
    }
  }
  // Longest legacy prefix without semicolon, e.g. "&ampfoo" or "&copy 2020".
  for (std::size_t len = std::min<std::size_t>(name.size(), 4); len >= 2; --len) {
    const auto candidate = name.substr(0, len);
    if (kLegacyEntities.count(candidate)) {
      text::append_utf8(out, table.at(candidate));
      pos = name_start + len;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto amp = s.find('&', pos);
    if (amp == std::string_view::npos) {
      out.append(s.substr(pos));
      break;
    }
    out.append(s.substr(pos, amp - pos));
    pos = amp;
    if (!decode_reference(s, pos, out)) {
      out.push_back('&');
      ++pos;
    }
  }
  return out;
}

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [key, value] : attributes) {
    if (key == name) return &value;
  }
  return nullptr;
}

ContentTree::ContentTree() {
  Node root;
  root.tag = "#document";
  nodes_.push_back(std::move(root));
}

std::string ContentTree::text_content(NodeId id) const {
  std::string out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const auto& n = nodes_[stack.back()];
    stack.pop_back();
    if (n.is_text()) {
      out += n.text;
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::string ContentTree::text() const { return text::collapse_whitespace(text_content(0)); }

bool ContentTree::contains_tag(const std::set<std::string>& tags) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const Node& n) { return n.is_element() && tags.count(n.tag) > 0; });
}

const std::set<std::string>& default_strip_tags() {
  static const std::set<std::string> tags = {"script", "style", "noscript", "iframe", "svg"};
  return tags;
}

// Builds the node tree from the token stream, applying a subset of the HTML
// tree-construction recovery rules: implied end tags for p, li, dt/dd,
// headings and table cells, and scoped end-tag matching.
class TreeBuilder {
 public:
  explicit TreeBuilder(ContentTree& tree) : tree_(tree) { open_.push_back(0); }

  void start_tag(std::string name, Attributes attrs, bool self_closing) {
    if (name == "html" || name == "body" || name == "head") {
      if (find_open(name)) return;
      if (name == "body") close_if_open("head");
    }
    if (in_foreign()) {
      const auto id = append_element(std::move(name), std::move(attrs));
      if (!self_closing) open_.push_back(id);
      return;
    }

    if (kClosesParagraph.count(name) && has_in_button_scope("p")) pop_until("p");

    if (name == "li") {
      close_list_item({"li"}, {"ul", "ol", "menu"});
    } else if (name == "dt" || name == "dd") {
      close_list_item({"dt", "dd"}, {"dl"});
    } else if (is_heading(name) && is_heading(current().tag)) {
      open_.pop_back();
    } else if (name == "td" || name == "th") {
      close_in_table({"td", "th"});
    } else if (name == "tr") {
      close_in_table({"td", "th", "tr"});
    } else if (name == "tbody" || name == "thead" || name == "tfoot") {
      close_in_table({"td", "th", "tr", "tbody", "thead", "tfoot"});
    } else if (name == "option") {
      if (current().tag == "option") open_.pop_back();
    } else if (name == "a") {
      if (has_in_scope("a")) pop_until("a");
    }

    const bool is_void = kVoidTags.count(name) > 0;
    const auto id = append_element(std::move(name), std::move(attrs));
    if (!is_void) open_.push_back(id);
  }

  void end_tag(const std::string& name) {
    if (name == "body" || name == "html") return;
    if (name == "br") {
      append_element("br", {});
      return;
    }
    if (name == "p" && !has_in_button_scope("p")) return;
    if (is_heading(name)) {
      for (std::size_t k = open_.size(); k-- > 1;) {
        const auto& tag = tree_.nodes_[open_[k]].tag;
        if (is_heading(tag)) {
          open_.resize(k);
          return;
        }
        if (kScopeBarriers.count(tag)) return;
      }
      return;
    }
    const bool table_tag = kTableParts.count(name) > 0;
    for (std::size_t k = open_.size(); k-- > 1;) {
      const auto& tag = tree_.nodes_[open_[k]].tag;
      if (tag == name) {
        open_.resize(k);
        return;
      }
      if (table_tag ? tag == "table" : kScopeBarriers.count(tag) > 0) return;
    }
  }

  void text(std::string_view data) {
    if (data.empty()) return;
    auto& parent = tree_.nodes_[open_.back()];
    if (!parent.children.empty()) {
      auto& last = tree_.nodes_[parent.children.back()];
      if (last.is_text()) {
        last.text.append(data);
        return;
      }
    }
    Node n;
    n.kind = Node::Kind::Text;
    n.text = std::string(data);
    append(std::move(n));
  }

  const std::string& current_tag() const { return tree_.nodes_[open_.back()].tag; }

 private:
  const Node& current() const { return tree_.nodes_[open_.back()]; }

  bool in_foreign() const {
    return std::any_of(open_.begin(), open_.end(), [&](NodeId id) {
      const auto& t = tree_.nodes_[id].tag;
      return t == "svg" || t == "math";
    });
  }

  NodeId append(Node n) {
    const NodeId parent = open_.back();
    n.parent = parent;
    const NodeId id = tree_.nodes_.size();
    tree_.nodes_.push_back(std::move(n));
    tree_.nodes_[parent].children.push_back(id);
    return id;
  }

  NodeId append_element(std::string name, Attributes attrs) {
    Node n;
    n.tag = std::move(name);
    n.attributes = std::move(attrs);
    return append(std::move(n));
  }

  bool find_open(std::string_view name) const {
    return std::any_of(open_.begin(), open_.end(),
                       [&](NodeId id) { return tree_.nodes_[id].tag == name; });
  }

  void close_if_open(std::string_view name) {
    for (std::size_t k = open_.size(); k-- > 1;) {
      if (tree_.nodes_[open_[k]].tag == name) {
        open_.resize(k);
        return;
      }
    }
  }

  bool has_in_scope(std::string_view name) const {
    for (std::size_t k = open_.size(); k-- > 1;) {
      const auto& tag = tree_.nodes_[open_[k]].tag;
      if (tag == name) return true;
      if (kScopeBarriers.count(tag)) return false;
    }
    return false;
  }

  bool has_in_button_scope(std::string_view name) const {
    for (std::size_t k = open_.size(); k-- > 1;) {
      const auto& tag = tree_.nodes_[open_[k]].tag;
      if (tag == name) return true;
      if (kScopeBarriers.count(tag) || tag == "button") return false;
    }
    return false;
  }

  void pop_until(std::string_view name) {
    for (std::size_t k = open_.size(); k-- > 1;) {
      if (tree_.nodes_[open_[k]].tag == name) {
        open_.resize(k);
        return;
      }
    }
  }

  // Closes an open item (li, dt, dd) unless a list container intervenes.
  void close_list_item(std::initializer_list<std::string_view> items,
                       std::initializer_list<std::string_view> containers) {
    for (std::size_t k = open_.size(); k-- > 1;) {
      const auto& tag = tree_.nodes_[open_[k]].tag;
      if (std::find(items.begin(), items.end(), tag) != items.end()) {
        open_.resize(k);
        return;
      }
      if (std::find(containers.begin(), containers.end(), tag) != containers.end() ||
          kScopeBarriers.count(tag)) {
        return;
      }
    }
  }

  void close_in_table(std::initializer_list<std::string_view> closable) {
    for (std::size_t k = open_.size(); k-- > 1;) {
      const auto& tag = tree_.nodes_[open_[k]].tag;
      if (tag == "table") return;
      if (std::find(closable.begin(), closable.end(), tag) != closable.end()) {
        // Keep walking: a <tr> also closes the cell it contains.
        open_.resize(k);
        continue;
      }
      if (kScopeBarriers.count(tag)) return;
    }
  }

  ContentTree& tree_;
  std::vector<NodeId> open_;
};

namespace {

class Tokenizer {
 public:
  Tokenizer(std::string_view input, TreeBuilder& builder) : in_(input), builder_(builder) {}

  void run() {
    while (pos_ < in_.size()) {
      const auto lt = in_.find('<', pos_);
      if (lt == std::string_view::npos) {
        emit_text(in_.substr(pos_));
        pos_ = in_.size();
        break;
      }
      if (lt > pos_) emit_text(in_.substr(pos_, lt - pos_));
      pos_ = lt;
      markup();
    }
  }

 private:
  void emit_text(std::string_view raw) { builder_.text(decode_entities(raw)); }

  bool starts_with(std::string_view prefix) const {
    return in_.substr(pos_, prefix.size()) == prefix;
  }

  void skip_past(std::string_view terminator) {
    const auto end = in_.find(terminator, pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + terminator.size();
  }

  void markup() {
    const char next = pos_ + 1 < in_.size() ? in_[pos_ + 1] : '\0';
    if (starts_with("<!--")) {
      pos_ += 4;
      if (starts_with(">")) { ++pos_; return; }
      if (starts_with("->")) { pos_ += 2; return; }
      skip_past("-->");
      return;
    }
    if (next == '!' || next == '?') {
      skip_past(">");
      return;
    }
    if (next == '/') {
      const char after = pos_ + 2 < in_.size() ? in_[pos_ + 2] : '\0';
      if (is_ascii_alpha(after)) {
        pos_ += 2;
        end_tag();
      } else if (after == '>') {
        pos_ += 3;
      } else {
        skip_past(">");
      }
      return;
    }
    if (is_ascii_alpha(next)) {
      ++pos_;
      start_tag();
      return;
    }
    builder_.text("<");
    ++pos_;
  }

  std::string read_tag_name() {
    std::string name;
    while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '/' && in_[pos_] != '>') {
      name.push_back(in_[pos_]);
      ++pos_;
    }
    return text::ascii_lower(name);
  }

  void skip_spaces() {
    while (pos_ < in_.size() && is_html_space(in_[pos_])) ++pos_;
  }

  // Returns false when the input ends inside the tag.
  bool read_attributes(Attributes& attrs, bool& self_closing) {
    while (true) {
      skip_spaces();
      if (pos_ >= in_.size()) return false;
      const char c = in_[pos_];
      if (c == '>') {
        ++pos_;
        return true;
      }
      if (c == '/') {
        ++pos_;
        if (pos_ < in_.size() && in_[pos_] == '>') {
          self_closing = true;
          ++pos_;
          return true;
        }
        continue;
      }
      std::string name;
      while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '/' &&
             in_[pos_] != '>' && (in_[pos_] != '=' || name.empty())) {
        name.push_back(in_[pos_]);
        ++pos_;
      }
      name = text::ascii_lower(name);
      skip_spaces();
      std::string value;
      if (pos_ < in_.size() && in_[pos_] == '=') {
        ++pos_;
        skip_spaces();
        if (pos_ >= in_.size()) return false;
        const char quote = in_[pos_];
        if (quote == '"' || quote == '\'') {
          const auto end = in_.find(quote, pos_ + 1);
          if (end == std::string_view::npos) return false;
          value = decode_entities(in_.substr(pos_ + 1, end - pos_ - 1));
          pos_ = end + 1;
        } else {
          const auto start = pos_;
          while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
          value = decode_entities(in_.substr(start, pos_ - start));
        }
      }
      const bool duplicate = std::any_of(attrs.begin(), attrs.end(),
                                         [&](const auto& a) { return a.first == name; });
      if (!duplicate && !name.empty()) attrs.emplace_back(std::move(name), std::move(value));
    }
  }

  void start_tag() {
    auto name = read_tag_name();
    Attributes attrs;
    bool self_closing = false;
    if (!read_attributes(attrs, self_closing)) {
      pos_ = in_.size();  // EOF inside a tag: the tag is dropped
      return;
    }
    const bool raw = kRawTextTags.count(name) > 0;
    const bool rcdata = kRcdataTags.count(name) > 0;
    const bool plaintext = name == "plaintext";
    const std::string tag = name;
    builder_.start_tag(std::move(name), std::move(attrs), self_closing);
    if (builder_.current_tag() != tag) return;  // void, foreign self-closing
    if (plaintext) {
      builder_.text(in_.substr(pos_));
      pos_ = in_.size();
    } else if (raw || rcdata) {
      raw_text_until_end(tag, rcdata);
    }
  }

  void raw_text_until_end(const std::string& tag, bool decode) {
    std::size_t search = pos_;
    while (true) {
      const auto candidate = in_.find("</", search);
      if (candidate == std::string_view::npos) {
        const auto body = in_.substr(pos_);
        builder_.text(decode ? decode_entities(body) : std::string(body));
        pos_ = in_.size();
        builder_.end_tag(tag);
        return;
      }
      const auto name = text::ascii_lower(in_.substr(candidate + 2, tag.size()));
      const auto after = candidate + 2 + tag.size();
      const bool terminated = after >= in_.size() || is_html_space(in_[after]) ||
                              in_[after] == '/' || in_[after] == '>';
      if (name == tag && terminated) {
        const auto body = in_.substr(pos_, candidate - pos_);
        builder_.text(decode ? decode_entities(body) : std::string(body));
        pos_ = candidate + 2;
        end_tag();
        return;
      }
      search = candidate + 2;
    }
  }

  void end_tag() {
    auto name = read_tag_name();
    Attributes ignored;
    bool self_closing = false;
    if (!read_attributes(ignored, self_closing)) {
      pos_ = in_.size();
      return;
    }
    builder_.end_tag(name);
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  TreeBuilder& builder_;
};

}  // namespace

ContentTree parse_html_text(std::string_view html, const std::set<std::string>& strip_tags) {
  const auto utf8 = text::to_valid_utf8(html);
  ContentTree full;
  TreeBuilder builder(full);
  Tokenizer(utf8, builder).run();

  if (strip_tags.empty()) return full;
  ContentTree pruned;
  struct Frame {
    NodeId src;
    NodeId dst;
  };
  std::vector<Frame> stack{{0, 0}};
  std::vector<Node>& nodes = pruned.nodes_;
  while (!stack.empty()) {
    const auto [src, dst] = stack.back();
    stack.pop_back();
    const auto& children = full.node(src).children;
    std::vector<Frame> pending;
    for (NodeId child : children) {
      const auto& n = full.node(child);
      if (n.is_element() && strip_tags.count(n.tag)) continue;
      Node copy;
      copy.kind = n.kind;
      copy.tag = n.tag;
      copy.attributes = n.attributes;
      copy.text = n.text;
      copy.parent = dst;
      const NodeId id = nodes.size();
      nodes.push_back(std::move(copy));
      // A removed element between two text nodes leaves them adjacent.
      auto& siblings = nodes[dst].children;
      if (nodes[id].is_text() && !siblings.empty() && nodes[siblings.back()].is_text()) {
        nodes[siblings.back()].text += nodes[id].text;
        nodes.pop_back();
        continue;
      }
      siblings.push_back(id);
      if (n.is_element()) pending.push_back({child, id});
    }
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) stack.push_back(*it);
  }
  return pruned;
}

ContentTree parse_html(const RawPage& page, const std::set<std::string>& strip_tags) {
  if (!page.ok()) {
    throw Error(ErrorCode::NotOk, "cannot parse skipped page " + page.source.url);
  }
  return parse_html_text(page.body, strip_tags);
}

namespace {

struct UrlParts {
  std::string_view scheme, authority, path, query, fragment;
  bool has_authority = false, has_query = false, has_fragment = false;
};

UrlParts split_url(std::string_view u) {
  UrlParts p;
  const auto colon = u.find(':');
  const auto delim = u.find_first_of("/?#");
  if (colon != std::string_view::npos && colon > 0 && (delim == std::string_view::npos || colon < delim)) {
    p.scheme = u.substr(0, colon);
    u.remove_prefix(colon + 1);
  }
  if (const auto hash = u.find('#'); hash != std::string_view::npos) {
    p.has_fragment = true;
    p.fragment = u.substr(hash + 1);
    u = u.substr(0, hash);
  }
  if (const auto q = u.find('?'); q != std::string_view::npos) {
    p.has_query = true;
    p.query = u.substr(q + 1);
    u = u.substr(0, q);
  }
  if (u.substr(0, 2) == "//") {
    p.has_authority = true;
    u.remove_prefix(2);
    const auto slash = u.find('/');
    p.authority = u.substr(0, slash);
    u = slash == std::string_view::npos ? std::string_view{} : u.substr(slash);
  }
  p.path = u;
  return p;
}

std::string remove_dot_segments(std::string_view in) {
  std::string out;
  while (!in.empty()) {
    if (in.substr(0, 3) == "../") {
      in.remove_prefix(3);
    } else if (in.substr(0, 2) == "./") {
      in.remove_prefix(2);
    } else if (in.substr(0, 3) == "/./") {
      in.remove_prefix(2);
    } else if (in == "/.") {
      in = "/";
    } else if (in.substr(0, 4) == "/../" || in == "/..") {
      in = in.size() == 3 ? std::string_view("/") : in.substr(3);
      const auto cut = out.rfind('/');
      out.erase(cut == std::string::npos ? 0 : cut);
    } else if (in == "." || in == "..") {
      in = {};
    } else {
      const auto next = in.find('/', 1);
      out.append(in.substr(0, next));
      in = next == std::string_view::npos ? std::string_view{} : in.substr(next);
    }
  }
  return out;
}

}  // namespace

std::string resolve_url(std::string_view base, std::string_view ref) {
  const auto r = split_url(ref);
  const auto b = split_url(base);
  if (b.scheme.empty()) return std::string(ref);

  std::string scheme(r.scheme.empty() ? b.scheme : r.scheme), authority, path, query;
  bool has_authority, has_query;
  if (!r.scheme.empty()) {
    has_authority = r.has_authority;
    authority = r.authority;
    path = remove_dot_segments(r.path);
    has_query = r.has_query;
    query = r.query;
  } else if (r.has_authority) {
    has_authority = true;
    authority = r.authority;
    path = remove_dot_segments(r.path);
    has_query = r.has_query;
    query = r.query;
  } else {
    has_authority = b.has_authority;
    authority = b.authority;
    if (r.path.empty()) {
      path = b.path;
      has_query = r.has_query || b.has_query;
      query = r.has_query ? r.query : b.query;
    } else {
      if (r.path.front() == '/') {
        path = remove_dot_segments(r.path);
      } else if (b.has_authority && b.path.empty()) {
        path = remove_dot_segments("/" + std::string(r.path));
      } else {
        const auto dir = b.path.substr(0, b.path.rfind('/') + 1);
        path = remove_dot_segments(std::string(dir) + std::string(r.path));
      }
      has_query = r.has_query;
      query = r.query;
    }
  }

  std::string out = scheme + ":";
  if (has_authority) out += "//" + authority;
  out += path;
  if (has_query) out += "?" + query;
  if (r.has_fragment) out += "#" + std::string(r.fragment);
  return out;
}

namespace {

const std::unordered_set<std::string_view> kAllowedTags = {
    "p", "li", "td", "th", "h1", "h2", "h3", "h4", "h5", "h6", "pre",
    "blockquote", "dt", "dd", "figcaption", "figure", "div", "span", "a", "b",
    "strong", "i", "em", "u", "s", "small", "sub", "sup", "code", "kbd",
    "samp", "var", "mark", "q", "cite", "abbr", "br", "ul", "ol", "dl",
    "table", "thead", "tbody", "tfoot", "tr", "caption", "img", "hr", "time",
};

bool safe_url(std::string_view url) {
  const auto lower = text::ascii_lower(text::trim(url));
  const auto colon = lower.find(':');
  if (colon == std::string::npos) return true;
  const auto scheme = lower.substr(0, colon);
  return scheme == "http" || scheme == "https" || scheme == "mailto";
}

bool allowed_attribute(std::string_view tag, std::string_view name) {
  if (name == "title") return true;
  if (tag == "a") return name == "href";
  if (tag == "img") return name == "src" || name == "alt" || name == "width" || name == "height";
  if (tag == "td" || tag == "th") return name == "colspan" || name == "rowspan";
  return false;
}

void serialize(const ContentTree& tree, NodeId id, std::string_view base_url,
               std::string_view root_as, bool is_root, std::string& out) {
  const auto& n = tree.node(id);
  if (n.is_text()) {
    for (char c : n.text) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
      }
    }
    return;
  }
  std::string_view tag = n.tag;
  if (is_root && !root_as.empty()) tag = root_as;
  const bool keep = kAllowedTags.count(tag) > 0;
  if (keep) {
    out += '<';
    out += tag;
    for (const auto& [name, value] : n.attributes) {
      if (!allowed_attribute(tag, name)) continue;
      std::string v = value;
      if (name == "href" || name == "src") {
        if (!safe_url(v)) continue;
        v = resolve_url(base_url, text::trim(v));
      }
      out += ' ';
      out += name;
      out += "=\"";
      out += text::html_escape(v);
      out += '"';
    }
    out += '>';
    if (kVoidTags.count(tag)) return;
  }
  for (NodeId child : n.children) serialize(tree, child, base_url, root_as, false, out);
  if (keep) {
    out += "</";
    out += tag;
    out += '>';
  }
}

}  // namespace

std::string sanitized_markup(const ContentTree& tree, NodeId id, std::string_view base_url,
                             std::string_view root_as) {
  std::string out;
  serialize(tree, id, base_url, root_as, true, out);
  return out;
}

}  // namespace digestweaver
