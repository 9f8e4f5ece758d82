#pragma once

// Template token replacement. A template is HTML containing the literal
// tokens {{SEGMENT}}, {{QUERY}} and {{GENERATED_AT}}. Candidates fill the
// {{SEGMENT}} slots in candidate order; when there are more candidates than
// slots, the surplus is appended to the last slot, separated by
// <hr class="dps-sep"/>.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "digestweaver/scorer.hpp"

namespace digestweaver {

inline constexpr std::string_view kSegmentToken = "{{SEGMENT}}";
inline constexpr std::string_view kQueryToken = "{{QUERY}}";
inline constexpr std::string_view kGeneratedAtToken = "{{GENERATED_AT}}";
inline constexpr std::string_view kSegmentSeparator = "<hr class=\"dps-sep\"/>";

enum class TokenKind { Segment, Query, GeneratedAt };

struct TokenPosition {
  TokenKind kind;
  std::size_t offset;  // byte offset into Template::raw
};

struct Template {
  std::string raw;
  std::vector<std::size_t> segment_slots;    // offsets of {{SEGMENT}}, ascending
  std::vector<TokenPosition> meta_tokens;    // {{QUERY}} / {{GENERATED_AT}}, ascending

  std::size_t slot_count() const noexcept { return segment_slots.size(); }
};

/// Locates tokens by exact byte match. Throws Error(NoTokens) when there is
/// no {{SEGMENT}} slot.
Template parse_template(std::string text);

/// Throws Error(Io) when unreadable, Error(NoTokens) as parse_template.
Template load_template(const std::filesystem::path& path);

/// Built-in single-column template with one slot.
const std::string& default_template_html();

struct CandidateId {
  std::size_t page_index = 0;
  std::size_t seg_index = 0;

  bool operator==(const CandidateId&) const = default;
};

struct Placement {
  std::size_t slot_index = 0;  // 0-based
  std::vector<CandidateId> candidates;

  bool operator==(const Placement&) const = default;
};

struct ComposedPage {
  std::string html;
  std::vector<Placement> placements;  // one per slot, in slot order
  std::string query;
  std::string generated_at;
};

/// `<section class="dps-segment" data-source="URL" data-score="S" data-rank="I">FRAGMENT</section>`
std::string wrap_segment(const WeightedSegment& candidate);

std::string iso8601_utc(std::chrono::system_clock::time_point t);

/// True for timestamps shaped like 2024-01-31T12:00:00Z.
bool is_iso8601_utc(std::string_view s);

ComposedPage build_page(const CandidateSet& cs, const Template& tpl, std::string_view query,
                        std::string generated_at);

ComposedPage build_page(const CandidateSet& cs, const Template& tpl, std::string_view query);

}  // namespace digestweaver
