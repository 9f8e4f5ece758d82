#include "digestweaver/ingest.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <random>

#include "digestweaver/error.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

namespace digestweaver {
namespace {

using dwtest::TempDir;
using dwtest::write_file;

ErrorCode load_error(const std::string& json) {
  try {
    parse_result_list(json);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << json;
  return ErrorCode::Io;
}

TEST(LoadResultListTest, PondicherryFixture) {
  const auto list = load_result_list(dwtest::kFixtures / "pondicherry" / "results.json");
  EXPECT_EQ(list.query, "Pondicherry");
  ASSERT_EQ(list.n(), 10u);
  for (std::size_t k = 0; k < list.n(); ++k) EXPECT_EQ(list.entries[k].rank, static_cast<int>(k + 1));
  ASSERT_TRUE(list.entries[0].local_html_path);
  EXPECT_TRUE(std::filesystem::exists(*list.entries[0].local_html_path));
}

TEST(LoadResultListTest, EmptyResultsIsValid) {
  const auto list = parse_result_list(R"({"query": "x", "results": []})");
  EXPECT_EQ(list.n(), 0u);
}

TEST(LoadResultListTest, SortsByRank) {
  const auto list = parse_result_list(R"({"query": "q", "results": [
      {"rank": 3, "url": "http://c.example/", "title": "c", "snippet": ""},
      {"rank": 1, "url": "http://a.example/", "title": "a", "snippet": ""},
      {"rank": 2, "url": "http://b.example/", "title": "b", "snippet": ""}]})");
  ASSERT_EQ(list.n(), 3u);
  EXPECT_EQ(list.entries[0].title, "a");
  EXPECT_EQ(list.entries[2].title, "c");
}

TEST(LoadResultListTest, DuplicateRank) {
  EXPECT_EQ(load_error(R"({"query": "q", "results": [
      {"rank": 1, "url": "http://a.example/", "title": "", "snippet": ""},
      {"rank": 1, "url": "http://b.example/", "title": "", "snippet": ""},
      {"rank": 2, "url": "http://c.example/", "title": "", "snippet": ""}]})"),
            ErrorCode::DupRank);
}

TEST(LoadResultListTest, EmptyQuery) {
  EXPECT_EQ(load_error(R"({"query": "   ", "results": []})"), ErrorCode::EmptyQuery);
}

TEST(LoadResultListTest, SchemaViolations) {
  EXPECT_EQ(load_error("not json"), ErrorCode::Schema);
  EXPECT_EQ(load_error("[]"), ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"results": []})"), ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"query": "q"})"), ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"query": "q", "results": [{"url": "http://a/"}]})"), ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"query": "q", "results": [{"rank": 0, "url": "http://a/"}]})"),
            ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"query": "q", "results": [{"rank": 1, "url": "not a uri"}]})"),
            ErrorCode::Schema);
  EXPECT_EQ(load_error(R"({"query": "q", "results": [{"rank": 1, "url": "http://a/", "title": 5}]})"),
            ErrorCode::Schema);
}

TEST(LoadResultListTest, MissingFileIsIo) {
  try {
    load_result_list("/nonexistent/results.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

SearchResultEntry local_entry(int rank, const std::filesystem::path& path) {
  SearchResultEntry e;
  e.rank = rank;
  e.url = "https://example.com/" + std::to_string(rank);
  e.local_html_path = path;
  return e;
}

TEST(FetchPageTest, OfflineReadsLocalFile) {
  TempDir dir;
  const std::string body = "<p>" + std::string(3 * 1024 - 7, 'x') + "</p>";
  write_file(dir / "page.html", body);
  const auto page = fetch_page(local_entry(1, dir / "page.html"), FetchPolicy{});
  ASSERT_TRUE(page.ok());
  EXPECT_EQ(page.body.size(), 3u * 1024);
  EXPECT_EQ(page.media_type, "text/html");
}

TEST(FetchPageTest, OfflineFailuresAreSkips) {
  TempDir dir;
  FetchPolicy policy;
  auto missing = fetch_page(local_entry(1, dir / "missing.html"), policy);
  EXPECT_FALSE(missing.ok());
  EXPECT_NE(missing.skip_reason->find("missing"), std::string::npos);

  SearchResultEntry no_path;
  no_path.url = "https://example.com/";
  EXPECT_FALSE(fetch_page(no_path, policy).ok());

  write_file(dir / "big.html", std::string(200, 'x'));
  policy.max_bytes = 100;
  auto big = fetch_page(local_entry(1, dir / "big.html"), policy);
  EXPECT_FALSE(big.ok());
  EXPECT_NE(big.skip_reason->find("max_bytes"), std::string::npos);

  write_file(dir / "doc.pdf", "%PDF-1.4");
  auto pdf = fetch_page(local_entry(1, dir / "doc.pdf"), FetchPolicy{});
  EXPECT_FALSE(pdf.ok());
  EXPECT_NE(pdf.skip_reason->find("media type"), std::string::npos);

  write_file(dir / "empty.html", "");
  EXPECT_FALSE(fetch_page(local_entry(1, dir / "empty.html"), FetchPolicy{}).ok());
}

class OnlineFetchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto& s = stub_.server();
    s.Get("/page", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        user_agent_ = req.get_header_value("User-Agent");
      }
      ++hits_;
      res.set_content("<p>hello from stub</p>", "text/html; charset=utf-8");
    });
    s.Get("/missing", [](const httplib::Request&, httplib::Response& res) {
      res.status = 404;
      res.set_content("not found", "text/plain");
    });
    s.Get("/doc.pdf", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("%PDF-1.4", "application/pdf");
    });
    s.Get("/big", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<p>" + std::string(5000, 'x') + "</p>", "text/html");
    });
    s.Get(R"(/redirect/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      const int n = std::stoi(req.matches[1]);
      res.set_redirect(n == 0 ? "/page" : "/redirect/" + std::to_string(n - 1));
    });
    s.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(800));
      res.set_content("<p>late</p>", "text/html");
    });
    s.Get(R"(/delay/(\d+)/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::stoi(req.matches[2])));
      res.set_content("<p>page " + req.matches[1].str() + "</p>", "text/html");
    });
    stub_.start();
  }

  SearchResultEntry entry(const std::string& path, int rank = 1) {
    SearchResultEntry e;
    e.rank = rank;
    e.url = stub_.url(path);
    return e;
  }

  FetchPolicy online(int timeout_ms = 2000) {
    FetchPolicy p;
    p.mode = FetchMode::Online;
    p.timeout_ms = timeout_ms;
    return p;
  }

  dwtest::StubServer stub_;
  std::mutex mu_;
  std::string user_agent_;
  std::atomic<int> hits_{0};
};

TEST_F(OnlineFetchTest, OkPageSendsUserAgent) {
  const auto page = fetch_page(entry("/page"), online());
  ASSERT_TRUE(page.ok()) << *page.skip_reason;
  EXPECT_EQ(page.body, "<p>hello from stub</p>");
  std::lock_guard lock(mu_);
  EXPECT_EQ(user_agent_, "digestweaver/1.0");
}

TEST_F(OnlineFetchTest, HttpErrorStatusIsSkip) {
  const auto page = fetch_page(entry("/missing"), online());
  EXPECT_FALSE(page.ok());
  EXPECT_NE(page.skip_reason->find("404"), std::string::npos);
}

TEST_F(OnlineFetchTest, NonHtmlMediaTypeIsSkip) {
  const auto page = fetch_page(entry("/doc.pdf"), online());
  EXPECT_FALSE(page.ok());
  EXPECT_NE(page.skip_reason->find("application/pdf"), std::string::npos);
}

TEST_F(OnlineFetchTest, OversizeBodyIsSkip) {
  auto policy = online();
  policy.max_bytes = 1000;
  const auto page = fetch_page(entry("/big"), policy);
  EXPECT_FALSE(page.ok());
  EXPECT_NE(page.skip_reason->find("max_bytes"), std::string::npos);
}

TEST_F(OnlineFetchTest, FollowsAtMostThreeRedirects) {
  EXPECT_TRUE(fetch_page(entry("/redirect/2"), online()).ok());  // 3 hops
  const auto page = fetch_page(entry("/redirect/3"), online());  // 4 hops
  EXPECT_FALSE(page.ok());
  EXPECT_NE(page.skip_reason->find("redirect"), std::string::npos);
}

TEST_F(OnlineFetchTest, TimeoutIsSkip) {
  const auto page = fetch_page(entry("/slow"), online(200));
  EXPECT_FALSE(page.ok());
}

TEST_F(OnlineFetchTest, UnreachableHostIsSkip) {
  SearchResultEntry e;
  e.url = "http://127.0.0.1:1/nothing";
  EXPECT_FALSE(fetch_page(e, online(500)).ok());
}

TEST_F(OnlineFetchTest, CacheServesRepeatFetches) {
  TempDir dir;
  auto policy = online();
  policy.cache_dir = dir.path();
  ASSERT_TRUE(fetch_page(entry("/page"), policy).ok());
  ASSERT_TRUE(fetch_page(entry("/page"), policy).ok());
  EXPECT_EQ(hits_.load(), 1);
  EXPECT_TRUE(std::filesystem::exists(cache_path(dir.path(), stub_.url("/page"))));
  policy.bypass_cache = true;
  ASSERT_TRUE(fetch_page(entry("/page"), policy).ok());
  EXPECT_EQ(hits_.load(), 2);
}

TEST_F(OnlineFetchTest, FetchAllTimeoutLeavesGap) {
  ResultList list;
  list.query = "q";
  for (int r = 1; r <= 5; ++r) {
    list.entries.push_back(entry(r == 3 ? "/slow" : "/page", r));
  }
  auto policy = online(300);
  policy.parallelism = 5;
  const auto pages = fetch_all(list, policy);
  ASSERT_EQ(pages.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(pages[k].source.rank, k + 1);
    EXPECT_EQ(pages[k].ok(), k != 2);
  }
}

TEST_F(OnlineFetchTest, OrderIsRankOrderUnderRandomDelays) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    ResultList list;
    list.query = "q";
    for (int r = 1; r <= 8; ++r) {
      const int delay = std::uniform_int_distribution<int>(0, 60)(rng);
      list.entries.push_back(entry("/delay/" + std::to_string(r) + "/" + std::to_string(delay), r));
    }
    auto policy = online();
    policy.parallelism = 8;
    const auto pages = fetch_all(list, policy);
    ASSERT_EQ(pages.size(), 8u);
    for (int k = 0; k < 8; ++k) {
      ASSERT_TRUE(pages[k].ok());
      EXPECT_EQ(pages[k].body, "<p>page " + std::to_string(k + 1) + "</p>");
    }
  }
}

ResultList local_list(int n, const std::filesystem::path& file) {
  ResultList list;
  list.query = "q";
  for (int r = 1; r <= n; ++r) list.entries.push_back(local_entry(r, file));
  return list;
}

TEST(FetchAllTest, PrefixAndMinRule) {
  TempDir dir;
  write_file(dir / "p.html", "<p>x</p>");
  FetchPolicy policy;
  policy.top_n = 5;
  auto pages = fetch_all(local_list(10, dir / "p.html"), policy);
  ASSERT_EQ(pages.size(), 5u);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(pages[k].source.rank, k + 1);

  policy.top_n = 10;
  EXPECT_EQ(fetch_all(local_list(3, dir / "p.html"), policy).size(), 3u);
  EXPECT_TRUE(fetch_all(local_list(0, dir / "p.html"), policy).empty());
}

TEST(FetchAllTest, MixedFailuresKeepFullLength) {
  TempDir dir;
  write_file(dir / "p.html", "<p>x</p>");
  auto list = local_list(6, dir / "p.html");
  list.entries[1].local_html_path = dir / "gone.html";
  list.entries[4].local_html_path.reset();
  const auto pages = fetch_all(list, FetchPolicy{});
  ASSERT_EQ(pages.size(), 6u);
  EXPECT_FALSE(pages[1].ok());
  EXPECT_FALSE(pages[4].ok());
  EXPECT_TRUE(pages[0].ok() && pages[2].ok() && pages[3].ok() && pages[5].ok());
}

TEST(FetchPolicyTest, Validation) {
  FetchPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.top_n = 0;
  EXPECT_THROW(p.validate(), Error);
  p = FetchPolicy{};
  p.timeout_ms = 0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(MediaTypeTest, HtmlDetection) {
  EXPECT_TRUE(is_html_media_type("text/html"));
  EXPECT_TRUE(is_html_media_type("Text/HTML; charset=UTF-8"));
  EXPECT_TRUE(is_html_media_type("application/xhtml+xml"));
  EXPECT_FALSE(is_html_media_type("application/pdf"));
  EXPECT_FALSE(is_html_media_type(""));
}

}  // namespace
}  // namespace digestweaver
