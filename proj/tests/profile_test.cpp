#include "digestweaver/profile.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "digestweaver/error.hpp"
#include "test_support.hpp"

namespace digestweaver {
namespace {

using dwtest::TempDir;

std::vector<std::string> terms_of(const std::vector<ProfileTerm>& v) {
  std::vector<std::string> out;
  for (const auto& t : v) {
    EXPECT_EQ(t.weight, 1.0);
    out.push_back(t.term);
  }
  return out;
}

TEST(NormalizeTermsTest, Examples) {
  EXPECT_EQ(terms_of(normalize_terms({"Tourism"})), std::vector<std::string>{"tourism"});
  EXPECT_EQ(terms_of(normalize_terms({"Tourism", "tourism"})), std::vector<std::string>{"tourism"});
  EXPECT_EQ(terms_of(normalize_terms({"semantic web"})), (std::vector<std::string>{"semantic", "web"}));
}

TEST(NormalizeTermsTest, DropsEmptyAndStopwordOnlyInputs) {
  EXPECT_TRUE(normalize_terms({"", "  ", "the", "a"}).empty());
  EXPECT_EQ(terms_of(normalize_terms({"the Beach!", "beach"})), std::vector<std::string>{"beach"});
}

TEST(NormalizeTermsTest, Idempotent) {
  const auto once = normalize_terms({"Semantic-Web", "Café Culture", "2024 travel", "tourism"});
  const auto twice = normalize_terms(terms_of(once));
  EXPECT_EQ(once, twice);
}

TEST(ProfileTest, ValidateRejectsBadTerms) {
  EXPECT_NO_THROW(make_profile("p", {{"tourism", 1.0}}).validate());
  EXPECT_THROW(make_profile("p", {{"Tourism", 1.0}}).validate(), Error);
  EXPECT_THROW(make_profile("p", {{"two words", 1.0}}).validate(), Error);
  EXPECT_THROW(make_profile("p", {{"tourism", -1.0}}).validate(), Error);
  EXPECT_THROW(make_profile("p", {{"tourism", std::numeric_limits<double>::infinity()}}).validate(), Error);
}

TEST(ProfileStoreTest, UnknownIdIsEmpty) {
  TempDir dir;
  dwtest::write_file(dir / "s.json", R"({"tourist": {"tourism": 1.0}})");
  const auto p = load_profile(dir / "s.json", "nobody");
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.profile_id, "nobody");
}

TEST(ProfileStoreTest, StoredProfileLoads) {
  const auto p = load_profile(dwtest::kFixtures / "pondicherry" / "profiles.json", "tourist");
  ASSERT_EQ(p.terms.size(), 1u);
  EXPECT_EQ(p.terms.at("tourism"), 1.0);
}

TEST(ProfileStoreTest, CorruptStore) {
  TempDir dir;
  for (const std::string bad : {R"({"tourist": {"tourism": 1.)", "[1,2]", R"({"x": {"t": "heavy"}})",
                                R"({"x": ["tourism"]})"}) {
    dwtest::write_file(dir / "s.json", bad);
    try {
      load_profile(dir / "s.json", "tourist");
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::StoreCorrupt) << bad;
    }
  }
}

TEST(ProfileStoreTest, MissingStoreIsEmpty) {
  TempDir dir;
  EXPECT_TRUE(load_profile(dir / "absent.json", "x").empty());
}

TEST(ProfileStoreTest, SaveLoadAndOverwrite) {
  TempDir dir;
  const auto store = dir / "s.json";
  const auto a = make_profile("a", {{"tourism", 1.0}, {"beach", 0.5}});
  const auto b = make_profile("b", {{"heritage", 0.25}});
  save_profile(store, a);
  save_profile(store, b);
  EXPECT_EQ(load_profile(store, "a"), a);
  EXPECT_EQ(load_profile(store, "b"), b);
  const auto a2 = make_profile("a", {{"food", 1.0}});
  save_profile(store, a2);
  EXPECT_EQ(load_profile(store, "a"), a2);
  EXPECT_EQ(load_profile(store, "b"), b);
}

TEST(ProfileStoreTest, UnwritableStoreIsIo) {
  try {
    save_profile("/nonexistent-dir/sub/s.json", make_profile("a", {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

Profile random_profile(std::mt19937& rng, const std::string& id) {
  static const std::vector<std::string> pool = {"tourism", "beach", "heritage", "food", "temple",
                                                "caf\xC3\xA9", "2024", "auroville", "yoga", "music"};
  std::vector<ProfileTerm> terms;
  for (const auto& t : pool) {
    if (rng() % 2) terms.push_back({t, std::uniform_real_distribution<double>(0, 1)(rng)});
  }
  return make_profile(id, terms);
}

TEST(ProfileStoreTest, RandomRoundTrips) {
  TempDir dir;
  std::mt19937 rng(5);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_profile(rng, "id" + std::to_string(k % 7));
    save_profile(dir / "s.json", p);
    EXPECT_EQ(load_profile(dir / "s.json", p.profile_id), p);
  }
}

TEST(ProfileStoreTest, ConcurrentReadersNeverSeeTornWrites) {
  TempDir dir;
  const auto store = dir / "s.json";
  const auto small = make_profile("x", {{"tourism", 1.0}});
  std::vector<ProfileTerm> many;
  for (int k = 0; k < 400; ++k) many.push_back({"term" + std::to_string(k), 0.5});
  const auto big = make_profile("x", many);
  save_profile(store, small);

  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::thread writer([&] {
    for (int k = 0; k < 100; ++k) save_profile(store, k % 2 ? small : big);
    done = true;
  });
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!done) {
        try {
          const auto p = load_profile(store, "x");
          if (!(p == small) && !(p == big)) ++bad;
        } catch (const Error&) {
          ++bad;
        }
      }
    });
  }
  writer.join();
  for (auto& t : readers) t.join();
  EXPECT_EQ(bad.load(), 0);
}

}  // namespace
}  // namespace digestweaver
