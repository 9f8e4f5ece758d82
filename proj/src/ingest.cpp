#include "digestweaver/ingest.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"

namespace digestweaver {

namespace fs = std::filesystem;
using json = nlohmann::json;

void FetchPolicy::validate() const {
  if (top_n < 1) throw Error(ErrorCode::InvalidConfig, "top_n must be >= 1");
  if (timeout_ms < 1) throw Error(ErrorCode::InvalidConfig, "timeout_ms must be >= 1");
  if (max_bytes < 1) throw Error(ErrorCode::InvalidConfig, "max_bytes must be >= 1");
  if (parallelism < 1) throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
}

RawPage RawPage::skipped(SearchResultEntry source, std::string reason) {
  RawPage page;
  page.source = std::move(source);
  page.fetch_status = FetchStatus::Skipped;
  page.skip_reason = std::move(reason);
  return page;
}

bool is_valid_uri(const std::string& url) {
  static const std::regex re(R"(^[A-Za-z][A-Za-z0-9+.\-]*:[^\s]+$)");
  return std::regex_match(url, re);
}

bool is_html_media_type(const std::string& media_type) {
  const auto lower = text::ascii_lower(media_type);
  const auto semi = lower.find(';');
  const auto essence = text::trim(lower.substr(0, semi));
  return essence == "text/html" || essence == "application/xhtml+xml";
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorCode::Schema, "result list: " + what);
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) schema_error(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, const std::string& data) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return;
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) return;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fs::remove(tmp, ec);
}

std::string media_type_for_file(const fs::path& path, const std::string& body) {
  const auto ext = text::ascii_lower(path.extension().string());
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".xhtml") return "application/xhtml+xml";
  const auto first = body.find_first_not_of(" \t\r\n\f");
  if (first != std::string::npos && body[first] == '<') return "text/html";
  return "application/octet-stream";
}

RawPage fetch_local(const SearchResultEntry& entry, const FetchPolicy& policy) {
  if (!entry.local_html_path) {
    return RawPage::skipped(entry, "offline mode requires html_path");
  }
  const auto& path = *entry.local_html_path;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    return RawPage::skipped(entry, "missing local file: " + path.string());
  }
  const auto size = fs::file_size(path, ec);
  if (ec) return RawPage::skipped(entry, "unreadable local file: " + path.string());
  if (size > policy.max_bytes) {
    return RawPage::skipped(entry, "body exceeds max_bytes (" + std::to_string(size) + " bytes)");
  }
  auto body = read_file(path);
  if (!body) return RawPage::skipped(entry, "unreadable local file: " + path.string());
  if (body->empty()) return RawPage::skipped(entry, "empty body");

  auto media_type = media_type_for_file(path, *body);
  if (!is_html_media_type(media_type)) {
    return RawPage::skipped(entry, "non-HTML media type: " + media_type);
  }
  RawPage page;
  page.source = entry;
  page.body = std::move(*body);
  page.media_type = std::move(media_type);
  page.fetch_status = FetchStatus::Ok;
  return page;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // path + query
};

std::optional<SplitUrl> split_url(const std::string& url) {
  static const std::regex re(R"(^([A-Za-z][A-Za-z0-9+.\-]*://[^/?#]+)([^#]*))");
  std::smatch m;
  if (!std::regex_search(url, m, re)) return std::nullopt;
  const auto scheme = text::ascii_lower(url.substr(0, url.find(':')));
  if (scheme != "http" && scheme != "https") return std::nullopt;
  SplitUrl out{m[1].str(), m[2].str()};
  if (out.target.empty()) out.target = "/";
  return out;
}

std::string resolve_location(const SplitUrl& base, const std::string& location) {
  if (location.find("://") != std::string::npos) return location;
  if (location.rfind("//", 0) == 0) {
    return base.origin.substr(0, base.origin.find("://") + 1) + location;
  }
  if (!location.empty() && location.front() == '/') return base.origin + location;
  auto dir = base.target.substr(0, base.target.rfind('/') + 1);
  return base.origin + dir + location;
}

RawPage fetch_http(const SearchResultEntry& entry, const FetchPolicy& policy) {
  std::string url = entry.url;
  for (int hop = 0; hop <= kMaxRedirects; ++hop) {
    auto split = split_url(url);
    if (!split) return RawPage::skipped(entry, "unsupported URL: " + url);

    httplib::Client client(split->origin);
    const auto timeout = std::chrono::milliseconds(policy.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    client.set_follow_location(false);

    std::string body;
    std::optional<std::string> abort_reason;
    int status = 0;
    std::string media_type;
    std::string location;

    const httplib::Headers headers{{"User-Agent", kUserAgent}};
    auto res = client.Get(
        split->target, headers,
        [&](const httplib::Response& r) {
          status = r.status;
          media_type = r.get_header_value("Content-Type");
          location = r.get_header_value("Location");
          if (status >= 300 && status < 400) return true;
          if (status < 200 || status >= 300) {
            abort_reason = "HTTP status " + std::to_string(status);
            return false;
          }
          if (!is_html_media_type(media_type)) {
            abort_reason = "non-HTML media type: " + (media_type.empty() ? "(none)" : media_type);
            return false;
          }
          if (r.has_header("Content-Length")) {
            const auto declared = std::strtoull(r.get_header_value("Content-Length").c_str(), nullptr, 10);
            if (declared > policy.max_bytes) {
              abort_reason = "body exceeds max_bytes (" + std::to_string(declared) + " bytes)";
              return false;
            }
          }
          return true;
        },
        [&](const char* data, size_t len) {
          if (body.size() + len > policy.max_bytes) {
            abort_reason = "body exceeds max_bytes";
            return false;
          }
          body.append(data, len);
          return true;
        });

    if (abort_reason) return RawPage::skipped(entry, *abort_reason);
    if (!res) {
      return RawPage::skipped(entry, "fetch failed: " + httplib::to_string(res.error()));
    }
    if (status >= 300 && status < 400) {
      if (location.empty()) {
        return RawPage::skipped(entry, "HTTP status " + std::to_string(status) + " without Location");
      }
      url = resolve_location(*split, location);
      continue;
    }
    if (body.empty()) return RawPage::skipped(entry, "empty body");

    RawPage page;
    page.source = entry;
    page.body = std::move(body);
    page.media_type = media_type;
    page.fetch_status = FetchStatus::Ok;
    return page;
  }
  return RawPage::skipped(entry, "too many redirects (limit " + std::to_string(kMaxRedirects) + ")");
}

}  // namespace

ResultList parse_result_list(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_error("top level must be an object");
  auto q = doc.find("query");
  if (q == doc.end() || !q->is_string()) schema_error("\"query\" must be a string");
  auto results = doc.find("results");
  if (results == doc.end() || !results->is_array()) schema_error("\"results\" must be an array");

  ResultList list;
  list.query = q->get<std::string>();
  if (text::collapse_whitespace(list.query).empty()) {
    throw Error(ErrorCode::EmptyQuery, "result list: query is empty");
  }

  std::set<int> seen;
  for (const auto& item : *results) {
    if (!item.is_object()) schema_error("each result must be an object");
    auto rank = item.find("rank");
    if (rank == item.end() || !rank->is_number_integer()) schema_error("\"rank\" must be an integer");
    SearchResultEntry entry;
    const auto r = rank->get<long long>();
    if (r < 1 || r > std::numeric_limits<int>::max()) schema_error("\"rank\" must be >= 1");
    entry.rank = static_cast<int>(r);
    auto url = item.find("url");
    if (url == item.end() || !url->is_string()) schema_error("\"url\" must be a string");
    entry.url = url->get<std::string>();
    if (!is_valid_uri(entry.url)) schema_error("\"url\" is not a URI: " + entry.url);
    entry.title = optional_string(item, "title");
    entry.snippet = optional_string(item, "snippet");
    auto html_path = optional_string(item, "html_path");
    if (!html_path.empty()) {
      fs::path p(html_path);
      entry.local_html_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (!seen.insert(entry.rank).second) {
      throw Error(ErrorCode::DupRank, "result list: duplicate rank " + std::to_string(entry.rank));
    }
    list.entries.push_back(std::move(entry));
  }
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return list;
}

ResultList load_result_list(const fs::path& path) {
  auto contents = read_file(path);
  if (!contents) throw Error(ErrorCode::Io, "cannot read result list " + path.string());
  return parse_result_list(*contents, path.parent_path());
}

fs::path cache_path(const fs::path& cache_dir, const std::string& url) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : url) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.html", static_cast<unsigned long long>(h));
  return cache_dir / name;
}

RawPage fetch_page(const SearchResultEntry& entry, const FetchPolicy& policy) {
  if (policy.mode == FetchMode::Offline) return fetch_local(entry, policy);

  if (policy.cache_dir && !policy.bypass_cache) {
    if (auto cached = read_file(cache_path(*policy.cache_dir, entry.url)); cached && !cached->empty()) {
      RawPage page;
      page.source = entry;
      page.body = std::move(*cached);
      page.media_type = "text/html";
      page.fetch_status = FetchStatus::Ok;
      return page;
    }
  }
  auto page = fetch_http(entry, policy);
  if (page.ok() && policy.cache_dir) {
    std::error_code ec;
    fs::create_directories(*policy.cache_dir, ec);
    write_file_atomic(cache_path(*policy.cache_dir, entry.url), page.body);
  }
  return page;
}

std::vector<RawPage> fetch_all(const ResultList& list, const FetchPolicy& policy) {
  policy.validate();
  const auto count = std::min(list.n(), static_cast<std::size_t>(policy.top_n));
  std::vector<RawPage> pages(count);
  if (count == 0) return pages;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
      try {
        pages[k] = fetch_page(list.entries[k], policy);
      } catch (const std::exception& e) {
        pages[k] = RawPage::skipped(list.entries[k], std::string("fetch failed: ") + e.what());
      }
    }
  };

  const auto threads = std::min(count, static_cast<std::size_t>(policy.parallelism));
  if (threads <= 1) {
    worker();
    return pages;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return pages;
}

}  // namespace digestweaver
