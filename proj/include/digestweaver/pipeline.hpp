#pragma once

// End-to-end entry points. segment_select runs fetch -> segment -> weigh ->
// select; compose additionally builds the page from a template.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "digestweaver/ingest.hpp"
#include "digestweaver/page_builder.hpp"
#include "digestweaver/profile.hpp"
#include "digestweaver/scorer.hpp"
#include "digestweaver/segmenter.hpp"

namespace digestweaver {

struct PipelineConfig {
  FetchPolicy fetch;
  SegConfig seg;
  ScoreConfig score;
  std::optional<std::filesystem::path> template_path;
  std::string profile_id = "default";

  void validate() const;
};

struct StageDurations {
  double fetch_ms = 0;
  double segment_ms = 0;
  double score_ms = 0;
  double select_ms = 0;
  double build_ms = 0;
};

struct PipelineReport {
  std::size_t pages_fetched = 0;
  std::size_t pages_skipped = 0;
  std::size_t segments_total = 0;
  std::size_t candidates_selected = 0;
  StageDurations durations;
};

/// Every intermediate of a segment_select run.
struct SelectionTrace {
  std::vector<RawPage> pages;
  SegmentMatrix omega;
  WeightedMatrix phi;
  CandidateSet candidates;
  PipelineReport report;
};

SelectionTrace trace_selection(const ResultList& list, const Profile& m, const PipelineConfig& cfg);

struct SelectResult {
  CandidateSet candidates;
  PipelineReport report;
};

SelectResult segment_select(const ResultList& list, const Profile& m, const PipelineConfig& cfg);

struct ComposeResult {
  ComposedPage page;
  CandidateSet candidates;
  PipelineReport report;
};

/// The configured template, or the built-in default when none is set.
Template resolve_template(const PipelineConfig& cfg);

/// `generated_at` pins the {{GENERATED_AT}} value; the current UTC time is
/// used otherwise.
ComposeResult compose(const ResultList& list, const Profile& m, const PipelineConfig& cfg,
                      const std::optional<std::string>& generated_at = std::nullopt);

/// One-line human-readable summary.
std::string format_report(const PipelineReport& report);

}  // namespace digestweaver
