#include "digestweaver/profile.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

#include <json.hpp>

#include "digestweaver/error.hpp"
#include "digestweaver/tokenizer.hpp"

namespace digestweaver {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::mutex& store_mutex(const fs::path& store) {
  static std::mutex registry_mutex;
  static std::unordered_map<std::string, std::mutex> mutexes;
  std::error_code ec;
  auto key = fs::weakly_canonical(store, ec).string();
  if (ec) key = store.string();
  std::lock_guard lock(registry_mutex);
  return mutexes[key];
}

json read_store(const fs::path& store) {
  std::ifstream in(store, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!fs::exists(store, ec)) return json::object();
    throw Error(ErrorCode::Io, "cannot read profile store " + store.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::StoreCorrupt, "profile store " + store.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::StoreCorrupt, "profile store " + store.string() + ": not an object");
  }
  for (const auto& [id, terms] : doc.items()) {
    if (!terms.is_object()) {
      throw Error(ErrorCode::StoreCorrupt, "profile store: entry \"" + id + "\" is not an object");
    }
    for (const auto& [term, weight] : terms.items()) {
      if (!weight.is_number()) {
        throw Error(ErrorCode::StoreCorrupt, "profile store: weight of \"" + term + "\" is not a number");
      }
    }
  }
  return doc;
}

}  // namespace

std::vector<ProfileTerm> Profile::term_list() const {
  std::vector<ProfileTerm> out;
  out.reserve(terms.size());
  for (const auto& [term, weight] : terms) out.push_back({term, weight});
  return out;
}

void Profile::validate() const {
  for (const auto& [term, weight] : terms) {
    const auto toks = tokenize(term);
    if (toks.size() != 1 || toks.front() != term) {
      throw Error(ErrorCode::InvalidConfig, "profile term \"" + term + "\" is not a single token");
    }
    if (!std::isfinite(weight) || weight < 0) {
      throw Error(ErrorCode::InvalidConfig, "profile term \"" + term + "\" has an invalid weight");
    }
  }
}

std::vector<ProfileTerm> normalize_terms(const std::vector<std::string>& raw) {
  std::vector<ProfileTerm> out;
  std::set<std::string> seen;
  for (const auto& r : raw) {
    for (auto& tok : tokenize(r)) {
      if (seen.insert(tok).second) out.push_back({std::move(tok), 1.0});
    }
  }
  return out;
}

Profile make_profile(std::string profile_id, const std::vector<ProfileTerm>& terms) {
  Profile p;
  p.profile_id = std::move(profile_id);
  for (const auto& t : terms) p.terms[t.term] = t.weight;
  return p;
}

Profile load_profile(const fs::path& store, const std::string& profile_id) {
  const auto doc = read_store(store);
  Profile p;
  p.profile_id = profile_id;
  if (auto it = doc.find(profile_id); it != doc.end()) {
    for (const auto& [term, weight] : it->items()) p.terms[term] = weight.get<double>();
  }
  return p;
}

void save_profile(const fs::path& store, const Profile& p) {
  p.validate();
  std::lock_guard lock(store_mutex(store));
  auto doc = read_store(store);
  json terms = json::object();
  for (const auto& [term, weight] : p.terms) terms[term] = weight;
  doc[p.profile_id] = std::move(terms);

  static std::atomic<unsigned> counter{0};
  auto tmp = store;
  tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write profile store " + store.string());
    out << doc.dump(2) << '\n';
    if (!out.flush()) throw Error(ErrorCode::Io, "cannot write profile store " + store.string());
  }
  std::error_code ec;
  fs::rename(tmp, store, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot replace profile store " + store.string());
  }
}

}  // namespace digestweaver
