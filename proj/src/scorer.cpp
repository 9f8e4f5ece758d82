#include "digestweaver/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "digestweaver/error.hpp"

namespace digestweaver {

void ScoreConfig::validate() const {
  auto unit = [](double v) { return std::isfinite(v) && v >= 0 && v <= 1; };
  if (!unit(alpha) || !unit(beta)) {
    throw Error(ErrorCode::InvalidConfig, "alpha and beta must lie in [0, 1]");
  }
  if (!(alpha + beta > 0) || alpha + beta > 1 + 1e-12) {
    throw Error(ErrorCode::InvalidConfig, "alpha + beta must lie in (0, 1]");
  }
  if (!std::isfinite(delta) || delta < 0) {
    throw Error(ErrorCode::InvalidConfig, "delta must be finite and >= 0");
  }
  if (max_candidates < 1) throw Error(ErrorCode::InvalidConfig, "max_candidates must be >= 1");
}

bool candidate_before(const WeightedSegment& a, const WeightedSegment& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.segment.page_index != b.segment.page_index) {
    return a.segment.page_index < b.segment.page_index;
  }
  return a.segment.seg_index < b.segment.seg_index;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

WeightedSegment weigh_segment(const Segment& seg, const std::vector<std::string>& query_terms,
                              const Profile& m, const ScoreConfig& cfg) {
  WeightedSegment out;
  out.segment = seg;
  const auto toks = tokenize(seg.text, cfg.stopwords);
  if (toks.empty()) return out;

  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : toks) ++counts[t];
  auto count = [&](const std::string& t) -> double {
    auto it = counts.find(t);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second);
  };
  const auto n = static_cast<double>(toks.size());

  const std::set<std::string> distinct(query_terms.begin(), query_terms.end());
  double q = 0;
  for (const auto& t : distinct) q += count(t);
  out.query_density = q / n;

  double p = 0;
  for (const auto& [term, weight] : m.terms) p += weight * count(term);
  out.profile_density = std::min(1.0, p / n);

  out.score = cfg.alpha * out.query_density + cfg.beta * out.profile_density;
  return out;
}

WeightedMatrix weigh_matrix(const SegmentMatrix& omega, const std::string& query, const Profile& m,
                            const ScoreConfig& cfg) {
  cfg.validate();
  const auto query_terms = tokenize(query, cfg.stopwords);
  WeightedMatrix phi;
  phi.rows.reserve(omega.rows.size());
  for (const auto& row : omega.rows) {
    auto& out = phi.rows.emplace_back();
    out.reserve(row.size());
    for (const auto& seg : row) out.push_back(weigh_segment(seg, query_terms, m, cfg));
  }
  return phi;
}

CandidateSet select_candidates(const WeightedMatrix& phi, const ScoreConfig& cfg) {
  cfg.validate();
  std::vector<const WeightedSegment*> above;
  for (const auto& row : phi.rows) {
    for (const auto& cell : row) {
      if (cell.score > cfg.delta) above.push_back(&cell);
    }
  }
  std::sort(above.begin(), above.end(),
            [](const auto* a, const auto* b) { return candidate_before(*a, *b); });

  CandidateSet cs;
  std::vector<std::vector<std::string>> kept_tokens;
  for (const auto* cell : above) {
    if (cs.candidates.size() == cfg.max_candidates) break;
    auto toks = tokenize(cell->segment.text, cfg.stopwords);
    const bool duplicate = std::any_of(kept_tokens.begin(), kept_tokens.end(), [&](const auto& k) {
      return jaccard(k, toks) > kDuplicateJaccard;
    });
    if (duplicate) continue;
    kept_tokens.push_back(std::move(toks));
    cs.candidates.push_back(*cell);
  }
  return cs;
}

}  // namespace digestweaver
