#include "digestweaver/tokenizer.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <fstream>

#include "digestweaver/error.hpp"
#include "digestweaver/text.hpp"

namespace digestweaver {

namespace {

// Version 1 of the built-in list. Changing it changes scores.
constexpr const char* kEnglishStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an",
    "and", "any", "are", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "could", "did",
    "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "if", "in", "into", "is", "it",
    "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor",
    "not", "now", "of", "off", "on", "once", "only", "or", "other", "our",
    "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through",
    "to", "too", "under", "until", "up", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with",
    "would", "you", "your", "yours", "yourself", "yourselves",
};

bool is_word_char(UChar32 c) {
  if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC)) return true;
  // Combining marks (viramas, accents) belong to the word they modify.
  const auto type = u_charType(c);
  return type == U_DECIMAL_DIGIT_NUMBER || type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

}  // namespace

Stopwords::Stopwords(std::string name, std::vector<std::string> words) : name_(std::move(name)) {
  for (auto& w : words) {
    auto toks = tokenize(w, none());
    for (auto& t : toks) words_.insert(std::move(t));
  }
}

const Stopwords& Stopwords::english() {
  static const Stopwords list("english-v1",
                              std::vector<std::string>(std::begin(kEnglishStopwords),
                                                       std::end(kEnglishStopwords)));
  return list;
}

Stopwords Stopwords::none() { return Stopwords{}; }

Stopwords Stopwords::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open stopword file " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    words.push_back(line);
  }
  return Stopwords(path.filename().string(), std::move(words));
}

bool Stopwords::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

std::vector<std::string> tokenize(std::string_view input, const Stopwords& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;

  auto flush = [&] {
    if (current_len >= 2 && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
    current_len = 0;
  };

  const auto* data = reinterpret_cast<const uint8_t*>(input.data());
  const auto n = static_cast<int32_t>(input.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c = 0;
    U8_NEXT(data, i, n, c);
    if (c < 0 || !is_word_char(c)) {
      flush();
      continue;
    }
    text::append_utf8(current, static_cast<char32_t>(u_tolower(c)));
    ++current_len;
  }
  flush();
  return tokens;
}

}  // namespace digestweaver
