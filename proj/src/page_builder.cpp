#include "digestweaver/page_builder.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"

namespace digestweaver {

Template parse_template(std::string text) {
  Template tpl;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string::npos) {
    const std::string_view rest = std::string_view(text).substr(pos);
    if (rest.starts_with(kSegmentToken)) {
      tpl.segment_slots.push_back(pos);
      pos += kSegmentToken.size();
    } else if (rest.starts_with(kQueryToken)) {
      tpl.meta_tokens.push_back({TokenKind::Query, pos});
      pos += kQueryToken.size();
    } else if (rest.starts_with(kGeneratedAtToken)) {
      tpl.meta_tokens.push_back({TokenKind::GeneratedAt, pos});
      pos += kGeneratedAtToken.size();
    } else {
      ++pos;
    }
  }
  if (tpl.segment_slots.empty()) {
    throw Error(ErrorCode::NoTokens, "template has no {{SEGMENT}} token");
  }
  tpl.raw = std::move(text);
  return tpl;
}

Template load_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_template(std::move(ss).str());
}

const std::string& default_template_html() {
  static const std::string html = R"(<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{{QUERY}} - digest</title>
<style>
body { font-family: sans-serif; max-width: 48rem; margin: 2rem auto; padding: 0 1rem; line-height: 1.5; }
.dps-segment { border-left: 3px solid #4a6fa5; padding: 0.25rem 1rem; margin: 1.5rem 0; }
.dps-sep { border: 0; border-top: 1px solid #ddd; }
footer { color: #777; font-size: 0.85rem; }
</style>
</head>
<body>
<h1>{{QUERY}}</h1>
<main>
{{SEGMENT}}
</main>
<footer>Generated {{GENERATED_AT}}</footer>
</body>
</html>
)";
  return html;
}

std::string wrap_segment(const WeightedSegment& candidate) {
  char score[32];
  std::snprintf(score, sizeof score, "%.4f", candidate.score);
  std::string out = "<section class=\"dps-segment\" data-source=\"";
  out += text::html_escape(candidate.segment.source_url);
  out += "\" data-score=\"";
  out += score;
  out += "\" data-rank=\"";
  out += std::to_string(candidate.segment.page_index + 1);
  out += "\">";
  out += candidate.segment.html_fragment;
  out += "</section>";
  return out;
}

std::string iso8601_utc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm utc{};
  gmtime_r(&secs, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

bool is_iso8601_utc(std::string_view s) {
  static const std::regex re(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z$)");
  return std::regex_match(s.begin(), s.end(), re);
}

namespace {

// Inserted content must not reintroduce a token; "{{" becomes "&#123;{",
// which renders identically.
std::string defuse_tokens(std::string s) {
  std::size_t pos = 0;
  while ((pos = s.find("{{", pos)) != std::string::npos) {
    s.replace(pos, 1, "&#123;");
    pos += 6;
  }
  return s;
}

constexpr std::string_view kAllTokens[] = {kSegmentToken, kQueryToken, kGeneratedAtToken};

// Appends `piece`, first inserting an empty comment at the join when the
// join would spell a token across the boundary.
void append_piece(std::string& out, std::string_view piece) {
  if (piece.empty()) return;
  constexpr std::size_t span = 16;
  const std::size_t tail_len = std::min(out.size(), span);
  std::string window = out.substr(out.size() - tail_len);
  window.append(piece.substr(0, span));
  for (auto token : kAllTokens) {
    for (auto at = window.find(token); at != std::string::npos; at = window.find(token, at + 1)) {
      if (at < tail_len && at + token.size() > tail_len) {
        out += "<!---->";
        out.append(piece);
        return;
      }
    }
  }
  out.append(piece);
}

}  // namespace

ComposedPage build_page(const CandidateSet& cs, const Template& tpl, std::string_view query,
                        std::string generated_at) {
  const std::size_t k = tpl.slot_count();
  const std::size_t m = cs.size();

  ComposedPage page;
  page.query = std::string(query);
  page.generated_at = defuse_tokens(std::move(generated_at));

  std::vector<std::string> slot_html(k);
  page.placements.resize(k);
  for (std::size_t s = 0; s < k; ++s) page.placements[s].slot_index = s;
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t slot = std::min(c, k - 1);
    const auto& cand = cs.candidates[c];
    if (!page.placements[slot].candidates.empty()) slot_html[slot] += kSegmentSeparator;
    slot_html[slot] += defuse_tokens(wrap_segment(cand));
    page.placements[slot].candidates.push_back({cand.segment.page_index, cand.segment.seg_index});
  }

  struct Replacement {
    std::size_t offset;
    std::size_t length;
    const std::string* with;
  };
  const std::string escaped_query = defuse_tokens(text::html_escape(query));
  std::vector<Replacement> edits;
  for (std::size_t s = 0; s < k; ++s) {
    edits.push_back({tpl.segment_slots[s], kSegmentToken.size(), &slot_html[s]});
  }
  for (const auto& t : tpl.meta_tokens) {
    if (t.kind == TokenKind::Query) {
      edits.push_back({t.offset, kQueryToken.size(), &escaped_query});
    } else {
      edits.push_back({t.offset, kGeneratedAtToken.size(), &page.generated_at});
    }
  }
  std::sort(edits.begin(), edits.end(),
            [](const auto& a, const auto& b) { return a.offset < b.offset; });

  std::size_t pos = 0;
  for (const auto& e : edits) {
    append_piece(page.html, std::string_view(tpl.raw).substr(pos, e.offset - pos));
    append_piece(page.html, *e.with);
    pos = e.offset + e.length;
  }
  append_piece(page.html, std::string_view(tpl.raw).substr(pos));
  return page;
}

ComposedPage build_page(const CandidateSet& cs, const Template& tpl, std::string_view query) {
  return build_page(cs, tpl, query, iso8601_utc(std::chrono::system_clock::now()));
}

}  // namespace digestweaver
