#pragma once

// Error-recovering HTML parser producing a ContentTree: an element/text tree
// with script, style, noscript, iframe, svg and comment nodes removed.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "digestweaver/ingest.hpp"

namespace digestweaver {

using NodeId = std::size_t;

struct Node {
  enum class Kind { Element, Text };

  Kind kind = Kind::Element;
  std::string tag;  // lowercase; empty for text nodes
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // decoded character data; text nodes only
  std::vector<NodeId> children;
  NodeId parent = 0;

  bool is_element() const noexcept { return kind == Kind::Element; }
  bool is_text() const noexcept { return kind == Kind::Text; }
  const std::string* attribute(std::string_view name) const;
};

/// Arena-backed node tree. Node 0 is the synthetic "#document" root.
class ContentTree {
 public:
  ContentTree();

  const Node& root() const { return nodes_.front(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Concatenated character data in document order, whitespace collapsed.
  std::string text() const;

  /// Raw concatenation of the character data below `id` (no collapsing).
  std::string text_content(NodeId id) const;

  /// True when any element in the tree has one of the given tag names.
  bool contains_tag(const std::set<std::string>& tags) const;

 private:
  friend class TreeBuilder;
  friend ContentTree parse_html_text(std::string_view, const std::set<std::string>&);
  std::vector<Node> nodes_;
};

const std::set<std::string>& default_strip_tags();

/// Parses HTML text (any bytes; invalid UTF-8 is replaced). Never fails.
ContentTree parse_html_text(std::string_view html,
                            const std::set<std::string>& strip_tags = default_strip_tags());

/// Parses a fetched page. Throws Error(NotOk) for skipped pages.
ContentTree parse_html(const RawPage& page,
                       const std::set<std::string>& strip_tags = default_strip_tags());

/// Decodes character references (&amp; &#39; &#x27; ...) in `s`.
std::string decode_entities(std::string_view s);

/// Serializes the subtree at `id` as sanitized markup: only an allowlist of
/// presentational tags and safe attributes is kept, other elements are
/// unwrapped, URLs are resolved against `base_url`. When `root_as` is
/// non-empty the root element is emitted under that tag name instead.
std::string sanitized_markup(const ContentTree& tree, NodeId id, std::string_view base_url,
                             std::string_view root_as = {});

/// Resolves `ref` against an absolute `base` URL.
std::string resolve_url(std::string_view base, std::string_view ref);

}  // namespace digestweaver
