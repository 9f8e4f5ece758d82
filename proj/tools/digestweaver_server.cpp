#include <httplib.h>

#include <CLI11.hpp>

#include <iostream>
#include <memory>

#include "digestweaver/error.hpp"
#include "digestweaver/page_builder.hpp"
#include "digestweaver/service.hpp"

using namespace digestweaver;

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for digest composition", "digestweaver-server"};
  std::string fixtures;
  std::string store = "profiles.json";
  std::string static_dir;
  std::string template_path;
  std::string host = "127.0.0.1";
  std::string now;
  int port = 8080;
  bool online = false;
  PipelineConfig defaults;

  app.add_option("--fixtures", fixtures, "Directory of <query>.json result lists")->required();
  app.add_option("--profile-store", store, "Profile store JSON")->capture_default_str();
  app.add_option("--static", static_dir, "Directory served under /");
  app.add_option("--template", template_path, "Template HTML (default: built-in)");
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  app.add_flag("--online", online, "Fetch result URLs over HTTP instead of html_path files");
  app.add_option("--delta", defaults.score.delta)->capture_default_str();
  app.add_option("--alpha", defaults.score.alpha)->capture_default_str();
  app.add_option("--beta", defaults.score.beta)->capture_default_str();
  app.add_option("--top-n", defaults.fetch.top_n)->capture_default_str();
  app.add_option("--parallelism", defaults.fetch.parallelism)->capture_default_str();
  app.add_option("--now", now, "Pin the generated-at timestamp (ISO-8601 UTC)");
  CLI11_PARSE(app, argc, argv);

  defaults.fetch.mode = online ? FetchMode::Online : FetchMode::Offline;
  if (!template_path.empty()) defaults.template_path = template_path;

  service::ServiceConfig cfg;
  cfg.defaults = defaults;
  cfg.profile_store = store;
  cfg.provider = std::make_shared<service::FixtureProvider>(fixtures);
  if (!static_dir.empty()) cfg.static_dir = static_dir;
  if (!now.empty()) {
    if (!is_iso8601_utc(now)) {
      std::cerr << "error: --now must look like 2024-01-31T12:00:00Z\n";
      return 1;
    }
    cfg.pinned_generated_at = now;
  }

  try {
    const service::Service svc(std::move(cfg));
    httplib::Server server;
    svc.mount(server);
    std::cerr << "listening on http://" << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
