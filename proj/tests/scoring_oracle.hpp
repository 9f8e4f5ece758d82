#pragma once

// Brute-force reference for candidate selection. Works from raw token bags
// (never calls the tokenizer or the scorer) and orders candidates by
// counting, for each one, how many others must precede it.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace dwtest {

struct OracleCell {
  std::size_t page = 0;
  std::size_t seg = 0;
  std::vector<std::string> tokens;
};

struct OracleResult {
  std::size_t page = 0;
  std::size_t seg = 0;
  double query_density = 0;
  double profile_density = 0;
  double score = 0;
};

inline std::size_t count_of(const std::vector<std::string>& bag, const std::string& t) {
  std::size_t n = 0;
  for (const auto& x : bag) n += (x == t);
  return n;
}

inline OracleResult oracle_weigh(const OracleCell& cell, const std::vector<std::string>& query,
                                 const std::map<std::string, double>& profile, double alpha,
                                 double beta) {
  OracleResult r{cell.page, cell.seg, 0, 0, 0};
  if (cell.tokens.empty()) return r;
  const double n = static_cast<double>(cell.tokens.size());
  std::set<std::string> distinct(query.begin(), query.end());
  double q = 0;
  for (const auto& t : distinct) q += static_cast<double>(count_of(cell.tokens, t));
  double p = 0;
  for (const auto& [term, w] : profile) p += w * static_cast<double>(count_of(cell.tokens, term));
  r.query_density = q / n;
  r.profile_density = p / n > 1.0 ? 1.0 : p / n;
  r.score = alpha * r.query_density + beta * r.profile_density;
  return r;
}

inline double oracle_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end()), uni = sa;
  uni.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return uni.empty() ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni.size());
}

inline bool oracle_precedes(const OracleResult& a, const OracleResult& b) {
  if (a.score > b.score) return true;
  if (a.score < b.score) return false;
  if (a.page != b.page) return a.page < b.page;
  return a.seg < b.seg;
}

inline std::vector<OracleResult> oracle_select(const std::vector<OracleCell>& cells,
                                               const std::vector<std::string>& query,
                                               const std::map<std::string, double>& profile,
                                               double alpha, double beta, double delta,
                                               std::size_t max_candidates) {
  std::vector<OracleResult> above;
  std::vector<const OracleCell*> above_cells;
  for (const auto& c : cells) {
    auto r = oracle_weigh(c, query, profile, alpha, beta);
    if (r.score > delta) {
      above.push_back(r);
      above_cells.push_back(&c);
    }
  }
  // Exhaustive ranking: position = number of elements that precede it.
  std::vector<std::size_t> order(above.size());
  for (std::size_t i = 0; i < above.size(); ++i) {
    std::size_t rank = 0;
    for (std::size_t j = 0; j < above.size(); ++j) rank += (j != i && oracle_precedes(above[j], above[i]));
    order[rank] = i;
  }
  std::vector<OracleResult> out;
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool dup = false;
    for (std::size_t k : kept) {
      if (oracle_jaccard(above_cells[k]->tokens, above_cells[idx]->tokens) > 0.9) dup = true;
    }
    if (dup) continue;
    kept.push_back(idx);
    out.push_back(above[idx]);
    if (out.size() == max_candidates) break;
  }
  return out;
}

}  // namespace dwtest
