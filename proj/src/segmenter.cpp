#include "digestweaver/segmenter.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_set>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"

namespace digestweaver {

namespace {

// Elements that take part in block layout. A div or list item containing
// any of these is a container, not an atomic block.
const std::unordered_set<std::string_view> kBlockLevel = {
    "address", "article", "aside", "blockquote", "center", "details", "dialog",
    "dd", "dir", "div", "dl", "dt", "fieldset", "figcaption", "figure",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hgroup",
    "hr", "li", "main", "menu", "nav", "ol", "p", "pre", "section", "summary",
    "table", "tbody", "thead", "tfoot", "tr", "td", "th", "caption", "ul",
    "body", "html",
};

// Atomic when they hold no block-level descendants.
const std::unordered_set<std::string_view> kAtomicCandidates = {
    "p", "li", "td", "th", "blockquote", "dt", "dd", "figcaption", "div",
};

const std::unordered_set<std::string_view> kNotRendered = {
    "head", "title", "template", "select", "datalist", "textarea",
};

// Emitted as <div> so fragments stay valid outside their original parent.
const std::unordered_set<std::string_view> kRewrapAsDiv = {"li", "td", "th", "dt", "dd"};

bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

class BlockCollector {
 public:
  BlockCollector(const ContentTree& tree, const SegConfig& cfg, std::string_view base_url)
      : tree_(tree), cfg_(cfg), base_url_(base_url), has_block_(tree.size(), false) {
    // Children always have larger ids than their parent.
    for (NodeId id = tree.size(); id-- > 1;) {
      const auto& n = tree.node(id);
      if (!n.is_element()) continue;
      if (has_block_[id] || kBlockLevel.count(n.tag)) has_block_[n.parent] = true;
    }
  }

  std::vector<Block> run() {
    walk(0);
    return std::move(blocks_);
  }

 private:
  bool skipped(const Node& n) const {
    return kNotRendered.count(n.tag) || cfg_.boilerplate_tags.count(n.tag);
  }

  void walk(NodeId id) {
    std::vector<NodeId> run;
    for (NodeId child : tree_.node(id).children) {
      const auto& n = tree_.node(child);
      if (n.is_text()) {
        run.push_back(child);
        continue;
      }
      if (skipped(n)) {
        flush(run);
        continue;
      }
      if (kBlockLevel.count(n.tag) || has_block_[child]) {
        flush(run);
        visit(child);
      } else {
        run.push_back(child);
      }
    }
    flush(run);
  }

  void visit(NodeId id) {
    const auto& tag = tree_.node(id).tag;
    if (is_heading(tag) || tag == "pre" || (kAtomicCandidates.count(tag) && !has_block_[id])) {
      emit(block_text({id}), atomic_markup(id), is_heading(tag));
      return;
    }
    walk(id);
  }

  std::string atomic_markup(NodeId id) const {
    const auto& tag = tree_.node(id).tag;
    return sanitized_markup(tree_, id, base_url_, kRewrapAsDiv.count(tag) ? "div" : "");
  }

  // Loose inline content between blocks forms an anonymous block.
  void flush(std::vector<NodeId>& run) {
    if (run.empty()) return;
    auto text = block_text(run);
    if (!text.empty()) {
      std::string html = "<div>";
      for (NodeId id : run) html += sanitized_markup(tree_, id, base_url_);
      html += "</div>";
      emit(std::move(text), std::move(html), false);
    }
    run.clear();
  }

  void emit(std::string text, std::string html, bool heading) {
    if (text.empty()) return;
    Block b;
    b.char_len = text::length(text);
    b.text = std::move(text);
    b.html = std::move(html);
    b.is_heading = heading;
    blocks_.push_back(std::move(b));
  }

  // Collapsed text content; <br> counts as whitespace.
  std::string block_text(const std::vector<NodeId>& roots) const {
    std::string raw;
    std::vector<NodeId> stack(roots.rbegin(), roots.rend());
    while (!stack.empty()) {
      const auto& n = tree_.node(stack.back());
      stack.pop_back();
      if (n.is_text()) {
        raw += n.text;
      } else if (n.tag == "br") {
        raw += ' ';
      } else if (!skipped(n)) {
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
      }
    }
    return text::collapse_whitespace(raw);
  }

  const ContentTree& tree_;
  const SegConfig& cfg_;
  std::string_view base_url_;
  std::vector<bool> has_block_;
  std::vector<Block> blocks_;
};

struct Draft {
  std::vector<std::size_t> blocks;
  std::size_t len = 0;
  std::optional<std::string> heading;

  void add(std::size_t index, std::size_t block_len) {
    len += blocks.empty() ? block_len : block_len + 1;
    blocks.push_back(index);
  }
};

Draft merged(const Draft& first, const Draft& second) {
  Draft out = first;
  out.blocks.insert(out.blocks.end(), second.blocks.begin(), second.blocks.end());
  out.len = first.len + 1 + second.len;
  return out;
}

}  // namespace

void SegConfig::validate() const {
  if (min_chars < 1 || min_chars >= max_chars) {
    throw Error(ErrorCode::InvalidConfig, "segmenter requires 1 <= min_chars < max_chars");
  }
}

std::size_t SegmentMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.size();
  return n;
}

std::vector<Block> collect_blocks(const ContentTree& tree, const SegConfig& cfg,
                                  std::string_view base_url) {
  return BlockCollector(tree, cfg, base_url).run();
}

std::vector<Segment> pack_blocks(const std::vector<Block>& blocks, std::size_t page_index,
                                 const std::string& url, const SegConfig& cfg) {
  cfg.validate();
  std::vector<Draft> drafts;
  Draft current;
  std::optional<std::string> last_heading;

  auto close = [&] {
    if (!current.blocks.empty()) drafts.push_back(std::move(current));
    current = Draft{};
  };

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.is_heading) {
      close();
      last_heading = b.text;
      current.heading = b.text;
    } else if (!current.blocks.empty() && current.len + 1 + b.char_len > cfg.max_chars) {
      close();
      current.heading = last_heading;
    } else if (current.blocks.empty()) {
      current.heading = last_heading;
    }
    current.add(k, b.char_len);
  }
  close();

  // Undersized segments join their successor, or their predecessor when
  // the successor has no room. A merge never creates a multi-block segment
  // longer than max_chars; when neither neighbour fits the segment stays.
  std::size_t i = 0;
  while (i < drafts.size() && drafts.size() > 1) {
    if (drafts[i].len >= cfg.min_chars) {
      ++i;
      continue;
    }
    if (i + 1 < drafts.size() && drafts[i].len + 1 + drafts[i + 1].len <= cfg.max_chars) {
      drafts[i] = merged(drafts[i], drafts[i + 1]);
      drafts.erase(drafts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      continue;
    }
    if (i > 0 && drafts[i - 1].len + 1 + drafts[i].len <= cfg.max_chars) {
      drafts[i - 1] = merged(drafts[i - 1], drafts[i]);
      drafts.erase(drafts.begin() + static_cast<std::ptrdiff_t>(i));
      continue;
    }
    ++i;
  }

  std::vector<Segment> segments;
  segments.reserve(drafts.size());
  for (auto& d : drafts) {
    Segment s;
    s.page_index = page_index;
    s.seg_index = segments.size();
    s.source_url = url;
    s.heading = std::move(d.heading);
    s.block_count = d.blocks.size();
    for (std::size_t k : d.blocks) {
      if (!s.text.empty()) s.text += ' ';
      s.text += blocks[k].text;
      s.html_fragment += blocks[k].html;
    }
    s.char_len = text::length(s.text);
    segments.push_back(std::move(s));
  }
  return segments;
}

std::vector<Segment> segment_page(const ContentTree& tree, std::size_t page_index,
                                  const std::string& url, const SegConfig& cfg) {
  return pack_blocks(collect_blocks(tree, cfg, url), page_index, url, cfg);
}

SegmentMatrix build_segment_matrix(const std::vector<RawPage>& pages, const SegConfig& cfg,
                                   int parallelism) {
  cfg.validate();
  SegmentMatrix matrix;
  matrix.rows.resize(pages.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto k = next.fetch_add(1); k < pages.size(); k = next.fetch_add(1)) {
      const auto& page = pages[k];
      if (!page.ok()) continue;
      matrix.rows[k] = segment_page(parse_html(page, cfg.strip_tags), k, page.source.url, cfg);
    }
  };
  const auto threads = std::min<std::size_t>(pages.size(), static_cast<std::size_t>(std::max(parallelism, 1)));
  if (threads <= 1) {
    worker();
    return matrix;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return matrix;
}

}  // namespace digestweaver
