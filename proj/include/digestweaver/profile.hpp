#pragma once

// User profile index terms and their JSON store:
//   {"<profile_id>": {"<term>": <weight>, ...}, ...}

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace digestweaver {

struct ProfileTerm {
  std::string term;
  double weight = 1.0;

  bool operator==(const ProfileTerm&) const = default;
};

struct Profile {
  std::string profile_id;
  std::map<std::string, double> terms;  // unique by term

  bool empty() const noexcept { return terms.empty(); }
  std::vector<ProfileTerm> term_list() const;

  /// Throws Error(InvalidConfig) unless every term is a single tokenizer
  /// token and every weight is finite and non-negative.
  void validate() const;

  bool operator==(const Profile&) const = default;
};

/// Tokenizes each raw string with the scorer's tokenizer; every token becomes
/// a term of weight 1.0. First-occurrence order, duplicates collapsed.
std::vector<ProfileTerm> normalize_terms(const std::vector<std::string>& raw);

Profile make_profile(std::string profile_id, const std::vector<ProfileTerm>& terms);

/// Returns the stored profile, or an empty one when the id (or the store
/// file itself) is absent. Throws Error(StoreCorrupt) on an unparsable store.
Profile load_profile(const std::filesystem::path& store, const std::string& profile_id);

/// Inserts or replaces p in the store. Writers are serialized per store path
/// and the file is replaced atomically, so readers never see a partial write.
/// Throws Error(Io) on write failure.
void save_profile(const std::filesystem::path& store, const Profile& p);

}  // namespace digestweaver
