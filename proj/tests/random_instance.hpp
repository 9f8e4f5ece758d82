#pragma once

// Random small scoring instances shared by the scorer unit tests and the
// acceptance binary. Segment texts are built from words that the tokenizer
// keeps unchanged, so the oracle can work from the word bags directly.

#include <random>
#include <string>
#include <vector>

#include "digestweaver/scorer.hpp"
#include "digestweaver/text.hpp"
#include "scoring_oracle.hpp"

namespace dwtest {

struct ScoringInstance {
  digestweaver::SegmentMatrix omega;
  std::vector<OracleCell> cells;
  std::string query;
  std::vector<std::string> query_terms;
  digestweaver::Profile profile;
  digestweaver::ScoreConfig cfg;
};

inline const std::vector<std::string>& instance_vocab() {
  static const std::vector<std::string> v = {"tourism", "beach", "temple", "food",  "heritage",
                                             "yoga",    "music", "river",  "market", "pondicherry",
                                             "caf\xC3\xA9", "2024"};
  return v;
}

inline ScoringInstance random_instance(std::mt19937& rng) {
  const auto& vocab = instance_vocab();
  auto pick = [&] { return vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]; };
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto upto = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };

  ScoringInstance inst;
  const int pages = 1 + upto(4);
  for (int i = 0; i < pages; ++i) {
    auto& row = inst.omega.rows.emplace_back();
    const int segs = upto(10);
    for (int j = 0; j < segs; ++j) {
      OracleCell cell{static_cast<std::size_t>(i), static_cast<std::size_t>(j), {}};
      std::string text;
      const int len = upto(12);
      for (int w = 0; w < len; ++w) {
        // Small vocabulary plus occasional stopwords and punctuation so that
        // ties, duplicates and empty token bags all occur.
        if (upto(6) == 0) {
          text += upto(1) ? "the " : "- ";
          continue;
        }
        const auto word = pick();
        cell.tokens.push_back(word);
        auto shown = word;
        if (upto(3) == 0 && shown[0] >= 'a' && shown[0] <= 'z') shown[0] = static_cast<char>(shown[0] - 'a' + 'A');
        text += shown + (upto(4) ? " " : ", ");
      }
      if (text.empty()) text = "of";
      digestweaver::Segment s;
      s.page_index = cell.page;
      s.seg_index = cell.seg;
      s.text = text;
      s.source_url = "https://example.com/" + std::to_string(i);
      s.char_len = digestweaver::text::length(text);
      row.push_back(std::move(s));
      inst.cells.push_back(std::move(cell));
    }
  }
  for (int q = 1 + upto(2); q > 0; --q) {
    const auto w = pick();
    inst.query += (inst.query.empty() ? "" : " ") + w;
    inst.query_terms.push_back(w);
  }
  std::vector<digestweaver::ProfileTerm> terms;
  for (const auto& w : vocab) {
    if (upto(3) == 0) terms.push_back({w, upto(5) == 0 ? uniform(1, 3) : uniform(0, 1)});
  }
  inst.profile = digestweaver::make_profile("r", terms);
  inst.cfg.alpha = uniform(0, 1);
  inst.cfg.beta = uniform(0, 1 - inst.cfg.alpha);
  if (upto(4) == 0) inst.cfg.alpha = inst.cfg.beta = 0.5;
  if (inst.cfg.alpha + inst.cfg.beta <= 0) inst.cfg.alpha = 0.5;
  inst.cfg.delta = upto(3) == 0 ? 0.0 : uniform(0, 0.3);
  inst.cfg.max_candidates = static_cast<std::size_t>(1 + upto(11));
  return inst;
}

inline std::vector<OracleResult> oracle_for(const ScoringInstance& inst) {
  return oracle_select(inst.cells, inst.query_terms, inst.profile.terms, inst.cfg.alpha, inst.cfg.beta,
                       inst.cfg.delta, inst.cfg.max_candidates);
}

/// Empty string when `cs` matches `expected` exactly (scores within 1e-9).
inline std::string compare_with_oracle(const digestweaver::CandidateSet& cs,
                                       const std::vector<OracleResult>& expected) {
  if (cs.size() != expected.size()) {
    return "size " + std::to_string(cs.size()) + " != " + std::to_string(expected.size());
  }
  auto near = [](double a, double b) { return (a > b ? a - b : b - a) <= 1e-9; };
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto& got = cs.candidates[k];
    const auto& want = expected[k];
    if (got.segment.page_index != want.page || got.segment.seg_index != want.seg) {
      return "order differs at " + std::to_string(k);
    }
    if (!near(got.score, want.score) || !near(got.query_density, want.query_density) ||
        !near(got.profile_density, want.profile_density)) {
      return "score differs at " + std::to_string(k);
    }
  }
  return {};
}

/// Empty string when every candidate of `small` appears in `large`.
inline std::string check_subset(const digestweaver::CandidateSet& small,
                                const digestweaver::CandidateSet& large) {
  for (const auto& c : small.candidates) {
    bool found = false;
    for (const auto& d : large.candidates) {
      found |= d.segment.page_index == c.segment.page_index && d.segment.seg_index == c.segment.seg_index;
    }
    if (!found) {
      return "(" + std::to_string(c.segment.page_index) + "," + std::to_string(c.segment.seg_index) +
             ") missing at lower delta";
    }
  }
  return {};
}

}  // namespace dwtest
