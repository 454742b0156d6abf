#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cra::textfeat {

using TermSet = std::unordered_set<std::string>;

struct Tokens {
  std::vector<std::string> lower;
  /// Same tokens with their original case, for code-pattern matching.
  std::vector<std::string> original;
  std::size_t size() const { return lower.size(); }
  bool empty() const { return lower.empty(); }
};

/// Word tokens: runs of letters, digits, '_' and non-ASCII bytes. Leading and
/// trailing underscores are trimmed; ASCII letters are lowercased.
Tokens tokenize(std::string_view text);

/// Fraction of non-empty sentences (split on . ! ?) that end with '?'.
double question_ratio(std::string_view text);

struct CodeElementStats {
  int count = 0;
  double ratio = 0.0;
};

/// Data files shipped under data/lexicons, one term per line, '#' comments.
struct Lexicons {
  TermSet stop_words;
  TermSet keywords;
  TermSet positive;
  TermSet negative;
  TermSet negation;
  TermSet confirmatory;
  TermSet gratitude;
};

/// Throws IoFailure for a missing file and InvalidArgument when the positive
/// and negative lists overlap.
Lexicons load_lexicons(const std::filesystem::path& directory);
std::filesystem::path default_data_dir();
TermSet load_term_file(const std::filesystem::path& file);

bool is_code_token(std::string_view original_token, const TermSet& keywords);
CodeElementStats code_element_stats(std::string_view text, const TermSet& keywords);
double stop_word_ratio(std::string_view text, const TermSet& stop_words);

/// Vowel-group syllable estimate: groups of consecutive a/e/i/o/u/y, minus a
/// trailing silent 'e' after a consonant, never below one.
int count_syllables(std::string_view word);

/// Flesch Reading Ease. 0 for text without words.
double readability(std::string_view text);

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  /// -1, 0 or +1.
  virtual int score(std::string_view text) const = 0;
};

class LexiconSentiment final : public SentimentScorer {
 public:
  explicit LexiconSentiment(const Lexicons& lexicons);
  int score(std::string_view text) const override;

 private:
  const Lexicons* lexicons_;
};

/// A negation cue within the two preceding tokens flips a term's polarity.
int sentiment(std::string_view text, const Lexicons& lexicons);

struct ReplySignals {
  bool confirmatory = false;
  bool gratitude = false;
  int reply_sentiment = 0;
};

ReplySignals reply_signals(std::span<const std::string> reply_texts, const Lexicons& lexicons,
                           const SentimentScorer& scorer);
ReplySignals reply_signals(std::span<const std::string> reply_texts, const Lexicons& lexicons);

/// Lowercased tokens of `text` with stop words removed.
std::vector<std::string> content_terms(std::string_view text, const TermSet& stop_words);

}  // namespace cra::textfeat
