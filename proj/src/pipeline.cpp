#include "digestweaver/pipeline.hpp"

#include <chrono>
#include <cstdio>

namespace digestweaver {

namespace {

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

void PipelineConfig::validate() const {
  fetch.validate();
  seg.validate();
  score.validate();
}

SelectionTrace trace_selection(const ResultList& list, const Profile& m, const PipelineConfig& cfg) {
  cfg.validate();
  SelectionTrace t;
  Stopwatch clock;

  t.pages = fetch_all(list, cfg.fetch);
  t.report.durations.fetch_ms = clock.lap_ms();
  for (const auto& p : t.pages) ++(p.ok() ? t.report.pages_fetched : t.report.pages_skipped);

  t.omega = build_segment_matrix(t.pages, cfg.seg, cfg.fetch.parallelism);
  t.report.durations.segment_ms = clock.lap_ms();
  t.report.segments_total = t.omega.total();

  t.phi = weigh_matrix(t.omega, list.query, m, cfg.score);
  t.report.durations.score_ms = clock.lap_ms();

  t.candidates = select_candidates(t.phi, cfg.score);
  t.report.durations.select_ms = clock.lap_ms();
  t.report.candidates_selected = t.candidates.size();
  return t;
}

SelectResult segment_select(const ResultList& list, const Profile& m, const PipelineConfig& cfg) {
  auto t = trace_selection(list, m, cfg);
  return {std::move(t.candidates), t.report};
}

Template resolve_template(const PipelineConfig& cfg) {
  if (cfg.template_path) return load_template(*cfg.template_path);
  return parse_template(default_template_html());
}

ComposeResult compose(const ResultList& list, const Profile& m, const PipelineConfig& cfg,
                      const std::optional<std::string>& generated_at) {
  const auto tpl = resolve_template(cfg);
  auto selected = segment_select(list, m, cfg);
  Stopwatch clock;
  ComposeResult out;
  out.page = generated_at ? build_page(selected.candidates, tpl, list.query, *generated_at)
                          : build_page(selected.candidates, tpl, list.query);
  out.candidates = std::move(selected.candidates);
  out.report = selected.report;
  out.report.durations.build_ms = clock.lap_ms();
  return out;
}

std::string format_report(const PipelineReport& r) {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "pages_fetched=%zu pages_skipped=%zu segments_total=%zu candidates_selected=%zu "
                "fetch_ms=%.1f segment_ms=%.1f score_ms=%.1f select_ms=%.1f build_ms=%.1f",
                r.pages_fetched, r.pages_skipped, r.segments_total, r.candidates_selected,
                r.durations.fetch_ms, r.durations.segment_ms, r.durations.score_ms,
                r.durations.select_ms, r.durations.build_ms);
  return buf;
}

}  // namespace digestweaver
