#include "digestweaver/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include <json.hpp>

#include "digestweaver/dump.hpp"
#include "digestweaver/error.hpp"
#include "digestweaver/pipeline.hpp"

namespace digestweaver::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string results;
  std::string profile_store;
  std::string profile_id = "default";
  std::string template_path;
  std::string out;
  std::string page;
  std::string now;
  std::string cache_dir;
  bool offline = false;
  bool no_cache = false;
  PipelineConfig cfg;
  std::vector<std::string> terms;
};

void add_score_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--alpha", o.cfg.score.alpha, "Query density weight")->capture_default_str();
  cmd.add_option("--beta", o.cfg.score.beta, "Profile density weight")->capture_default_str();
}

void add_fetch_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--top-n", o.cfg.fetch.top_n, "Number of results to fetch")->capture_default_str();
  cmd.add_flag("--offline", o.offline, "Read pages from html_path instead of the network");
  cmd.add_option("--parallelism", o.cfg.fetch.parallelism, "Concurrent fetches")->capture_default_str();
  cmd.add_option("--timeout-ms", o.cfg.fetch.timeout_ms, "Per-request timeout")->capture_default_str();
  cmd.add_option("--cache-dir", o.cache_dir, "Response cache directory");
  cmd.add_flag("--no-cache", o.no_cache, "Bypass cached responses");
}

void apply_fetch_options(Options& o) {
  o.cfg.fetch.mode = o.offline ? FetchMode::Offline : FetchMode::Online;
  if (!o.cache_dir.empty()) o.cfg.fetch.cache_dir = o.cache_dir;
  o.cfg.fetch.bypass_cache = o.no_cache;
}

Profile profile_for(const Options& o) {
  if (o.profile_store.empty()) return Profile{o.profile_id, {}};
  return load_profile(o.profile_store, o.profile_id);
}

std::string profile_json(const Profile& p) {
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [term, weight] : p.terms) terms[term] = weight;
  return nlohmann::json{{"terms", terms}}.dump(2);
}

int run_compose(Options& o, std::ostream& err) {
  apply_fetch_options(o);
  if (!o.template_path.empty()) o.cfg.template_path = o.template_path;
  if (!o.now.empty() && !is_iso8601_utc(o.now)) {
    throw Error(ErrorCode::InvalidConfig, "--now must look like 2024-01-31T12:00:00Z");
  }
  o.cfg.validate();
  const auto list = load_result_list(o.results);
  const auto profile = profile_for(o);
  // Resolve the template before any fetching so a bad template fails fast.
  (void)resolve_template(o.cfg);
  const auto result = compose(list, profile, o.cfg,
                              o.now.empty() ? std::nullopt : std::optional<std::string>(o.now));

  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + o.out);
  file << result.page.html;
  file.flush();
  if (!file) throw Error(ErrorCode::Io, "cannot write " + o.out);
  err << format_report(result.report) << '\n';
  return kExitOk;
}

int run_segment(Options& o, std::ostream& out) {
  o.cfg.seg.validate();
  std::ifstream in(o.page, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + o.page);
  std::ostringstream body;
  body << in.rdbuf();
  const std::string url = "file://" + fs::absolute(o.page).string();
  const auto tree = parse_html_text(body.str(), o.cfg.seg.strip_tags);
  SegmentMatrix omega;
  omega.rows.push_back(segment_page(tree, 0, url, o.cfg.seg));
  out << segment_matrix_json(omega) << '\n';
  return kExitOk;
}

int run_score(Options& o, std::ostream& out) {
  apply_fetch_options(o);
  o.cfg.validate();
  const auto list = load_result_list(o.results);
  const auto profile = profile_for(o);
  const auto trace = trace_selection(list, profile, o.cfg);
  out << scored_matrix_json(trace.phi) << '\n';
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  return code == ErrorCode::Io ? kExitIo : kExitInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compose a single digest page from ranked search results", "digestweaver"};
  app.require_subcommand(1);
  Options o;

  auto* compose_cmd = app.add_subcommand("compose", "Build the digest page");
  compose_cmd->add_option("--results", o.results, "Result-list JSON")->required();
  compose_cmd->add_option("--profile-store", o.profile_store, "Profile store JSON");
  compose_cmd->add_option("--profile-id", o.profile_id, "Profile id")->capture_default_str();
  compose_cmd->add_option("--template", o.template_path, "Template HTML (default: built-in)");
  compose_cmd->add_option("--out", o.out, "Output HTML path")->required();
  compose_cmd->add_option("--delta", o.cfg.score.delta, "Selection threshold")->capture_default_str();
  compose_cmd->add_option("--now", o.now, "Pin the generated-at timestamp (ISO-8601 UTC)");
  add_score_flags(*compose_cmd, o);
  add_fetch_flags(*compose_cmd, o);

  auto* segment_cmd = app.add_subcommand("segment", "Print the segments of one HTML page");
  segment_cmd->add_option("--page", o.page, "HTML file")->required();
  segment_cmd->add_option("--min-chars", o.cfg.seg.min_chars)->capture_default_str();
  segment_cmd->add_option("--max-chars", o.cfg.seg.max_chars)->capture_default_str();

  auto* score_cmd = app.add_subcommand("score", "Print the scored segment matrix");
  score_cmd->add_option("--results", o.results, "Result-list JSON")->required();
  score_cmd->add_option("--profile-store", o.profile_store, "Profile store JSON");
  score_cmd->add_option("--profile-id", o.profile_id, "Profile id")->capture_default_str();
  add_score_flags(*score_cmd, o);
  add_fetch_flags(*score_cmd, o);

  auto* profile_cmd = app.add_subcommand("profile", "Edit the profile store");
  profile_cmd->require_subcommand(1);
  auto* set_cmd = profile_cmd->add_subcommand("set", "Replace a profile's terms");
  auto* get_cmd = profile_cmd->add_subcommand("get", "Print a profile's terms");
  for (auto* cmd : {set_cmd, get_cmd}) {
    cmd->add_option("--store", o.profile_store, "Profile store JSON")->required();
    cmd->add_option("--id", o.profile_id, "Profile id")->required();
  }
  set_cmd->add_option("terms", o.terms, "Profile terms");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*compose_cmd) return run_compose(o, err);
    if (*segment_cmd) return run_segment(o, out);
    if (*score_cmd) return run_score(o, out);
    if (*set_cmd) {
      const auto p = make_profile(o.profile_id, normalize_terms(o.terms));
      save_profile(o.profile_store, p);
      out << profile_json(p) << '\n';
      return kExitOk;
    }
    if (*get_cmd) {
      out << profile_json(load_profile(o.profile_store, o.profile_id)) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: E_IO: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitInput;
}

}  // namespace digestweaver::cli
