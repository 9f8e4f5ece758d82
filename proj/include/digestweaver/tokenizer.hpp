#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace digestweaver {

/// A named stopword list. Words are stored lowercased.
class Stopwords {
 public:
  Stopwords() = default;
  Stopwords(std::string name, std::vector<std::string> words);

  /// The built-in English list (versioned with the library).
  static const Stopwords& english();

  /// One word per line; blank lines and lines starting with '#' are ignored.
  static Stopwords from_file(const std::filesystem::path& path);

  static Stopwords none();

  bool contains(std::string_view word) const;
  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::string name_;
  std::unordered_set<std::string> words_;
};

/// Lowercases, splits on maximal runs of non-alphanumeric code points, drops
/// tokens shorter than two code points and drops stopwords.
std::vector<std::string> tokenize(std::string_view text,
                                  const Stopwords& stopwords = Stopwords::english());

}  // namespace digestweaver
