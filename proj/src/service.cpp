#include "digestweaver/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"
#include "digestweaver/tokenizer.hpp"

namespace digestweaver::service {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string fixture_key(const std::string& query) {
  std::string key;
  for (const auto& tok : tokenize(query, Stopwords::none())) {
    if (!key.empty()) key += '-';
    key += tok;
  }
  return key;
}

std::optional<ResultList> FixtureProvider::resolve(const std::string& query) const {
  const auto key = fixture_key(query);
  if (key.empty()) return std::nullopt;
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  return load_result_list(path);
}

namespace {

template <typename T>
std::optional<T> optional_field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if constexpr (std::is_same_v<T, int>) {
    if (!it->is_number_integer()) throw HttpError(400, std::string("\"") + key + "\" must be an integer");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) throw HttpError(400, std::string("\"") + key + "\" must be a number");
  } else {
    if (!it->is_string()) throw HttpError(400, std::string("\"") + key + "\" must be a string");
  }
  return it->get<T>();
}

json report_to_json(const PipelineReport& r) {
  return {
      {"pages_fetched", r.pages_fetched},
      {"pages_skipped", r.pages_skipped},
      {"segments_total", r.segments_total},
      {"candidates_selected", r.candidates_selected},
      {"durations_ms",
       {{"fetch", r.durations.fetch_ms},
        {"segment", r.durations.segment_ms},
        {"score", r.durations.score_ms},
        {"select", r.durations.select_ms},
        {"build", r.durations.build_ms}}},
  };
}

json error_json(const std::string& message) { return {{"error", message}}; }

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

ComposeRequest ComposeRequest::from_json(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw HttpError(400, "request body is not valid JSON");
  }
  if (!doc.is_object()) throw HttpError(400, "request body must be an object");
  ComposeRequest req;
  req.query = optional_field<std::string>(doc, "query").value_or("");
  if (auto id = optional_field<std::string>(doc, "profile_id")) req.profile_id = *id;
  req.delta = optional_field<double>(doc, "delta");
  req.top_n = optional_field<int>(doc, "top_n");
  req.alpha = optional_field<double>(doc, "alpha");
  req.beta = optional_field<double>(doc, "beta");
  return req;
}

std::string ComposeResponse::to_json() const {
  json cands = json::array();
  for (const auto& c : candidates) {
    cands.push_back({
        {"source_url", c.source_url},
        {"heading", c.heading ? json(*c.heading) : json(nullptr)},
        {"score", c.score},
        {"query_density", c.query_density},
        {"profile_density", c.profile_density},
        {"text_preview", c.text_preview},
    });
  }
  return json{{"html", html}, {"candidates", cands}, {"report", report_to_json(report)}}.dump();
}

std::string profile_to_json(const Profile& p) {
  json terms = json::object();
  for (const auto& [term, weight] : p.terms) terms[term] = weight;
  return json{{"terms", terms}}.dump();
}

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.defaults.validate();
  if (!cfg_.provider) throw Error(ErrorCode::InvalidConfig, "service requires a result provider");
}

ComposeResponse Service::handle_compose(const ComposeRequest& req) const {
  if (text::collapse_whitespace(req.query).empty()) throw HttpError(400, "query is empty");
  if (req.profile_id.empty()) throw HttpError(400, "profile_id is empty");

  PipelineConfig cfg = cfg_.defaults;
  if (req.delta) cfg.score.delta = *req.delta;
  if (req.alpha) cfg.score.alpha = *req.alpha;
  if (req.beta) cfg.score.beta = *req.beta;
  if (req.top_n) cfg.fetch.top_n = *req.top_n;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw HttpError(400, e.what());
  }

  auto list = cfg_.provider->resolve(req.query);
  if (!list) throw HttpError(404, "no result list for query \"" + req.query + "\"");

  const auto profile = load_profile(cfg_.profile_store, req.profile_id);
  const auto result = compose(*list, profile, cfg, cfg_.pinned_generated_at);

  ComposeResponse resp;
  resp.html = result.page.html;
  resp.report = result.report;
  for (const auto& c : result.candidates.candidates) {
    resp.candidates.push_back({
        c.segment.source_url,
        c.segment.heading,
        c.score,
        c.query_density,
        c.profile_density,
        std::string(text::prefix(c.segment.text, kPreviewChars)),
    });
  }
  return resp;
}

Profile Service::handle_profile_get(const std::string& profile_id) const {
  return load_profile(cfg_.profile_store, profile_id);
}

Profile Service::handle_profile_put(const std::string& profile_id, const std::string& body) const {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw HttpError(400, "request body is not valid JSON");
  }
  const json* terms = &doc;
  if (doc.is_object()) {
    auto it = doc.find("terms");
    if (it == doc.end()) throw HttpError(400, "missing \"terms\"");
    terms = &*it;
  }

  std::vector<ProfileTerm> normalized;
  if (terms->is_array()) {
    std::vector<std::string> raw;
    for (const auto& t : *terms) {
      if (!t.is_string()) throw HttpError(400, "terms must be strings");
      raw.push_back(t.get<std::string>());
    }
    normalized = normalize_terms(raw);
  } else if (terms->is_object()) {
    std::map<std::string, double> weights;
    for (const auto& [raw, weight] : terms->items()) {
      if (!weight.is_number() || weight.get<double>() < 0) {
        throw HttpError(400, "weights must be non-negative numbers");
      }
      for (const auto& t : normalize_terms({raw})) weights[t.term] = weight.get<double>();
    }
    for (const auto& [term, weight] : weights) normalized.push_back({term, weight});
  } else {
    throw HttpError(400, "\"terms\" must be an array or an object");
  }

  const auto p = make_profile(profile_id, normalized);
  save_profile(cfg_.profile_store, p);
  return p;
}

void Service::mount(httplib::Server& server) const {
  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  server.Post("/api/compose", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto resp = handle_compose(ComposeRequest::from_json(req.body));
      res.status = 200;
      res.set_content(resp.to_json(), "application/json");
    } catch (const HttpError& e) {
      send_json(res, e.status(), error_json(e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_json(e.what()));
    }
  });

  server.Get(R"(/api/profile/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.status = 200;
      res.set_content(profile_to_json(handle_profile_get(req.matches[1])), "application/json");
    } catch (const std::exception& e) {
      send_json(res, 500, error_json(e.what()));
    }
  });

  server.Put(R"(/api/profile/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      res.status = 200;
      res.set_content(profile_to_json(handle_profile_put(req.matches[1], req.body)), "application/json");
    } catch (const HttpError& e) {
      send_json(res, e.status(), error_json(e.what()));
    } catch (const Error& e) {
      send_json(res, e.code() == ErrorCode::InvalidConfig ? 400 : 500, error_json(e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_json(e.what()));
    }
  });

  if (cfg_.static_dir) server.set_mount_point("/", cfg_.static_dir->string());
}

}  // namespace digestweaver::service
