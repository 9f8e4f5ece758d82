#pragma once

// Segment weighting and candidate selection.
//
// Each segment is scored from two token densities over its own tokens:
//   query_density   = sum over distinct query terms t of count(t) / |tokens|
//   profile_density = min(1, sum over profile terms e of weight(e) * count(e) / |tokens|)
//   score           = alpha * query_density + beta * profile_density
// Candidates are the segments scoring strictly above delta, ordered by
// (score desc, page_index asc, seg_index asc), with near-duplicates
// (token-set Jaccard > 0.9) removed and the list capped at max_candidates.

#include <cstddef>
#include <string>
#include <vector>

#include "digestweaver/profile.hpp"
#include "digestweaver/segmenter.hpp"
#include "digestweaver/tokenizer.hpp"

namespace digestweaver {

struct ScoreConfig {
  double alpha = 0.5;
  double beta = 0.5;
  double delta = 0.05;
  std::size_t max_candidates = 12;
  Stopwords stopwords = Stopwords::english();

  /// alpha, beta in [0, 1] with 0 < alpha + beta <= 1; delta finite and
  /// >= 0; max_candidates >= 1. Throws Error(InvalidConfig).
  void validate() const;
};

inline constexpr double kDuplicateJaccard = 0.9;

struct WeightedSegment {
  Segment segment;
  double query_density = 0;
  double profile_density = 0;
  double score = 0;
};

struct WeightedMatrix {
  std::vector<std::vector<WeightedSegment>> rows;
};

struct CandidateSet {
  std::vector<WeightedSegment> candidates;

  std::size_t size() const noexcept { return candidates.size(); }
  bool empty() const noexcept { return candidates.empty(); }
};

/// Strict total order used for candidates: higher score first, then lower
/// page index, then lower segment index.
bool candidate_before(const WeightedSegment& a, const WeightedSegment& b);

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

WeightedSegment weigh_segment(const Segment& seg, const std::vector<std::string>& query_terms,
                              const Profile& m, const ScoreConfig& cfg);

WeightedMatrix weigh_matrix(const SegmentMatrix& omega, const std::string& query, const Profile& m,
                            const ScoreConfig& cfg);

CandidateSet select_candidates(const WeightedMatrix& phi, const ScoreConfig& cfg);

}  // namespace digestweaver
