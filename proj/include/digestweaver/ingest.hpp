#pragma once

// Result lists and page fetching. A result list is the ranked output of an
// upstream search engine; pages are fetched from local files (offline) or
// over HTTP (online). Per-page failures never abort: they yield a skipped
// RawPage that keeps its rank position.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace digestweaver {

struct SearchResultEntry {
  int rank = 1;  // 1-based
  std::string url;
  std::string title;
  std::string snippet;
  std::optional<std::filesystem::path> local_html_path;

  bool operator==(const SearchResultEntry&) const = default;
};

struct ResultList {
  std::string query;
  std::vector<SearchResultEntry> entries;

  std::size_t n() const noexcept { return entries.size(); }
};

enum class FetchMode { Offline, Online };

struct FetchPolicy {
  FetchMode mode = FetchMode::Offline;
  int top_n = 10;
  int timeout_ms = 10'000;
  std::size_t max_bytes = 2 * 1024 * 1024;
  std::optional<std::filesystem::path> cache_dir;
  bool bypass_cache = false;
  int parallelism = 4;

  /// Throws Error(InvalidConfig) when a field is out of bounds.
  void validate() const;
};

enum class FetchStatus { Ok, Skipped };

struct RawPage {
  SearchResultEntry source;
  std::string body;  // raw bytes, possibly not UTF-8
  std::string media_type;
  FetchStatus fetch_status = FetchStatus::Skipped;
  std::optional<std::string> skip_reason;

  bool ok() const noexcept { return fetch_status == FetchStatus::Ok; }

  static RawPage skipped(SearchResultEntry source, std::string reason);
};

inline constexpr const char* kUserAgent = "digestweaver/1.0";
inline constexpr int kMaxRedirects = 3;

/// Parses a Result-List JSON document. Relative html_path values resolve
/// against `base_dir`.
ResultList parse_result_list(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});

/// Loads a Result-List JSON file; entries come back sorted by rank.
/// Errors: Io (unreadable), Schema, DupRank, EmptyQuery.
ResultList load_result_list(const std::filesystem::path& path);

bool is_valid_uri(const std::string& url);

bool is_html_media_type(const std::string& media_type);

RawPage fetch_page(const SearchResultEntry& entry, const FetchPolicy& policy);

/// Fetches the first min(n, top_n) entries, up to policy.parallelism at a
/// time. Output is in rank order regardless of completion order.
std::vector<RawPage> fetch_all(const ResultList& list, const FetchPolicy& policy);

/// Cache file used for `url` under `cache_dir` (FNV-1a of the URL).
std::filesystem::path cache_path(const std::filesystem::path& cache_dir, const std::string& url);

}  // namespace digestweaver
