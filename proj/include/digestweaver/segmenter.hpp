#pragma once

// DOM-heuristic page segmentation. A page is reduced to an ordered list of
// atomic blocks (paragraphs, list items, cells, headings, leaf divs, and
// runs of loose inline content), which are then packed into segments:
// every heading opens a new segment, consecutive blocks are appended until
// max_chars would be exceeded, and undersized segments are merged into a
// neighbour afterwards.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "digestweaver/html.hpp"
#include "digestweaver/ingest.hpp"

namespace digestweaver {

struct SegConfig {
  std::size_t min_chars = 80;
  std::size_t max_chars = 2000;
  std::set<std::string> strip_tags = default_strip_tags();
  std::set<std::string> boilerplate_tags = {"nav", "footer", "aside"};

  void validate() const;
};

struct Block {
  std::string text;  // collapsed, trimmed, non-empty
  std::string html;  // sanitized markup
  bool is_heading = false;
  std::size_t char_len = 0;
};

struct Segment {
  std::size_t page_index = 0;  // i
  std::size_t seg_index = 0;   // j
  std::string text;
  std::string html_fragment;
  std::string source_url;
  std::optional<std::string> heading;  // nearest preceding h1-h6 text
  std::size_t char_len = 0;            // code points in text
  std::size_t block_count = 0;

  bool operator==(const Segment&) const = default;
};

struct SegmentMatrix {
  std::vector<std::vector<Segment>> rows;

  std::size_t total() const noexcept;
  bool operator==(const SegmentMatrix&) const = default;
};

/// Atomic blocks of a page in document order. Boilerplate subtrees and
/// non-rendered elements (head, title, template, form widgets) are skipped.
std::vector<Block> collect_blocks(const ContentTree& tree, const SegConfig& cfg,
                                  std::string_view base_url = {});

/// Packs blocks into segments. Pure; exposed for property tests.
std::vector<Segment> pack_blocks(const std::vector<Block>& blocks, std::size_t page_index,
                                 const std::string& url, const SegConfig& cfg);

std::vector<Segment> segment_page(const ContentTree& tree, std::size_t page_index,
                                  const std::string& url, const SegConfig& cfg);

/// Row k holds the segments of pages[k]; skipped pages give empty rows.
/// Pages are segmented on up to `parallelism` threads.
SegmentMatrix build_segment_matrix(const std::vector<RawPage>& pages, const SegConfig& cfg,
                                   int parallelism = 1);

}  // namespace digestweaver
