#include "digestweaver/dump.hpp"

#include <cstdio>

#include <json.hpp>

namespace digestweaver {

using json = nlohmann::ordered_json;

std::string segment_matrix_json(const SegmentMatrix& omega) {
  json rows = json::array();
  for (const auto& row : omega.rows) {
    json out = json::array();
    for (const auto& s : row) {
      out.push_back({
          {"i", s.page_index},
          {"j", s.seg_index},
          {"heading", s.heading ? json(*s.heading) : json(nullptr)},
          {"char_len", s.char_len},
          {"text", s.text},
      });
    }
    rows.push_back(std::move(out));
  }
  return rows.dump(2);
}

std::string scored_matrix_json(const WeightedMatrix& phi) {
  std::string out = "[";
  char buf[160];
  for (std::size_t r = 0; r < phi.rows.size(); ++r) {
    out += r ? ",\n  [" : "\n  [";
    const auto& row = phi.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& w = row[c];
      std::snprintf(buf, sizeof buf,
                    "%s\n    {\"i\": %zu, \"j\": %zu, \"query_density\": %.6f, "
                    "\"profile_density\": %.6f, \"score\": %.6f}",
                    c ? "," : "", w.segment.page_index, w.segment.seg_index, w.query_density,
                    w.profile_density, w.score);
      out += buf;
    }
    out += row.empty() ? "]" : "\n  ]";
  }
  out += phi.rows.empty() ? "]" : "\n]";
  return out;
}

}  // namespace digestweaver
