#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace goalex::eval {

enum class TextKind { ActorName, GoalText };

/// Goal-text normalisation used ahead of embedding: lowercasing, tokenisation on
/// non-alphanumerics, stopword removal and suffix-stripping. Actor names pass through
/// untouched. Stemming runs to a fixed point and the stopword filter is applied on both
/// sides of it so that the whole transform is idempotent.
class TextPreprocessor {
 public:
  TextPreprocessor() = default;
  explicit TextPreprocessor(std::unordered_set<std::string> stopwords);

  // Loads one word per line; blank lines and '#' comments are skipped.
  static TextPreprocessor from_stopword_file(const std::string& path);

  std::string preprocess(const std::string& text, TextKind kind) const;

  // One pass of the classic suffix-stripping algorithm over a lowercase token.
  static std::string stem_token(const std::string& token);

  // Lowercase alphanumeric runs, in order of appearance.
  static std::vector<std::string> tokenize(const std::string& text);

  const std::unordered_set<std::string>& stopwords() const { return stopwords_; }

 private:
  std::unordered_set<std::string> stopwords_;
};

}  // namespace goalex::eval
