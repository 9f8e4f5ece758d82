#pragma once

// JSON-over-HTTP facade over the pipeline:
//   GET  /api/health          -> {"status":"ok"}
//   POST /api/compose         ComposeRequest -> ComposeResponse
//   GET  /api/profile/{id}    -> {"terms": {term: weight}}
//   PUT  /api/profile/{id}    {"terms": {term: weight}} or {"terms": [term, ...]}
// plus static files under / when a directory is configured.

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "digestweaver/pipeline.hpp"

namespace httplib {
class Server;
}

namespace digestweaver::service {

/// Maps a query string to a result list.
class ResultProvider {
 public:
  virtual ~ResultProvider() = default;
  virtual std::optional<ResultList> resolve(const std::string& query) const = 0;
};

/// Looks up <dir>/<fixture_key(query)>.json.
class FixtureProvider final : public ResultProvider {
 public:
  explicit FixtureProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::optional<ResultList> resolve(const std::string& query) const override;

 private:
  std::filesystem::path dir_;
};

/// Lowercased query tokens (no stopword removal) joined by '-';
/// "Pondicherry  Tourism" -> "pondicherry-tourism".
std::string fixture_key(const std::string& query);

struct ServiceConfig {
  PipelineConfig defaults;
  std::filesystem::path profile_store;
  std::shared_ptr<const ResultProvider> provider;
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::string> pinned_generated_at;
};

class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct ComposeRequest {
  std::string query;
  std::string profile_id = "default";
  std::optional<double> delta;
  std::optional<int> top_n;
  std::optional<double> alpha;
  std::optional<double> beta;

  /// Throws HttpError(400) on malformed JSON or wrongly typed fields.
  static ComposeRequest from_json(const std::string& body);
};

struct CandidateView {
  std::string source_url;
  std::optional<std::string> heading;
  double score = 0;
  double query_density = 0;
  double profile_density = 0;
  std::string text_preview;  // first 200 code points
};

struct ComposeResponse {
  std::string html;
  std::vector<CandidateView> candidates;
  PipelineReport report;

  std::string to_json() const;
};

inline constexpr std::size_t kPreviewChars = 200;

class Service {
 public:
  explicit Service(ServiceConfig cfg);

  /// Throws HttpError: 400 invalid request, 404 unresolvable query.
  ComposeResponse handle_compose(const ComposeRequest& req) const;

  Profile handle_profile_get(const std::string& profile_id) const;

  /// `body` is the PUT payload; terms are normalized before storing.
  Profile handle_profile_put(const std::string& profile_id, const std::string& body) const;

  /// Registers every route on `server`.
  void mount(httplib::Server& server) const;

  const ServiceConfig& config() const noexcept { return cfg_; }

 private:
  ServiceConfig cfg_;
};

std::string profile_to_json(const Profile& p);

}  // namespace digestweaver::service
