#include "cra/textfeat.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "cra/error.hpp"

#ifndef CRA_DEFAULT_DATA_DIR
#define CRA_DEFAULT_DATA_DIR "data"
#endif

namespace cra::textfeat {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

struct SentenceCounts {
  int sentences = 0;
  int questions = 0;
};

SentenceCounts count_sentences(std::string_view text) {
  SentenceCounts out;
  bool has_content = false;
  for (char c : text) {
    if (is_terminator(c)) {
      if (has_content) {
        ++out.sentences;
        if (c == '?') ++out.questions;
      }
      has_content = false;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      has_content = true;
    }
  }
  if (has_content) ++out.sentences;
  return out;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t end = i;
    while (start < end && text[start] == '_') ++start;
    while (end > start && text[end - 1] == '_') --end;
    if (start == end) continue;
    std::string original(text.substr(start, end - start));
    std::string lower = original;
    for (char& c : lower) {
      if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    out.lower.push_back(std::move(lower));
    out.original.push_back(std::move(original));
  }
  return out;
}

double question_ratio(std::string_view text) {
  const SentenceCounts counts = count_sentences(text);
  if (counts.sentences == 0) return 0.0;
  return static_cast<double>(counts.questions) / counts.sentences;
}

TermSet load_term_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read lexicon file " + file.string());
  TermSet terms;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    if (start == line.size() || line[start] == '#') continue;
    terms.insert(line.substr(start));
  }
  return terms;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CRA_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return CRA_DEFAULT_DATA_DIR;
}

Lexicons load_lexicons(const std::filesystem::path& directory) {
  const auto dir = directory / "lexicons";
  Lexicons lex;
  lex.stop_words = load_term_file(dir / "stopwords.txt");
  lex.keywords = load_term_file(dir / "keywords.txt");
  lex.positive = load_term_file(dir / "sentiment_pos.txt");
  lex.negative = load_term_file(dir / "sentiment_neg.txt");
  lex.negation = load_term_file(dir / "sentiment_negation.txt");
  lex.confirmatory = load_term_file(dir / "confirmatory.txt");
  lex.gratitude = load_term_file(dir / "gratitude.txt");
  for (const auto& term : lex.positive) {
    if (lex.negative.count(term)) {
      throw Error(ErrorCode::InvalidArgument, "sentiment term '" + term + "' is both positive and negative");
    }
  }
  return lex;
}

bool is_code_token(std::string_view token, const TermSet& keywords) {
  std::string lower(token);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (keywords.count(lower)) return true;

  bool has_alpha = false;
  bool has_digit = false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    if (std::isalpha(c)) has_alpha = true;
    if (std::isdigit(c)) has_digit = true;
    if (c == '_') return true;  // tokens never start or end with '_'
    if (i + 1 < token.size() && std::islower(c) && std::isupper(static_cast<unsigned char>(token[i + 1]))) {
      return true;
    }
  }
  return has_alpha && has_digit;
}

CodeElementStats code_element_stats(std::string_view text, const TermSet& keywords) {
  const Tokens tokens = tokenize(text);
  if (tokens.empty()) return {};
  int count = 0;
  for (const auto& tok : tokens.original) {
    if (is_code_token(tok, keywords)) ++count;
  }
  return {count, static_cast<double>(count) / static_cast<double>(tokens.size())};
}

double stop_word_ratio(std::string_view text, const TermSet& stop_words) {
  const Tokens tokens = tokenize(text);
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& tok : tokens.lower) hits += stop_words.count(tok);
  return static_cast<double>(hits) / static_cast<double>(tokens.size());
}

int count_syllables(std::string_view word) {
  std::string letters;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      letters.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = letters.size();
  if (n >= 2 && letters[n - 1] == 'e' && !is_vowel(letters[n - 2]) && groups > 1) --groups;
  return groups < 1 ? 1 : groups;
}

double readability(std::string_view text) {
  const Tokens tokens = tokenize(text);
  if (tokens.empty()) return 0.0;
  const double words = static_cast<double>(tokens.size());
  const double sentences = std::max(1, count_sentences(text).sentences);
  double syllables = 0.0;
  for (const auto& tok : tokens.lower) syllables += count_syllables(tok);
  return 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
}

LexiconSentiment::LexiconSentiment(const Lexicons& lexicons) : lexicons_(&lexicons) {}

int LexiconSentiment::score(std::string_view text) const { return sentiment(text, *lexicons_); }

int sentiment(std::string_view text, const Lexicons& lexicons) {
  const Tokens tokens = tokenize(text);
  int positive = 0;
  int negative = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens.lower[i];
    int polarity = 0;
    if (lexicons.positive.count(tok)) polarity = 1;
    else if (lexicons.negative.count(tok)) polarity = -1;
    if (polarity == 0) continue;
    for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
      if (lexicons.negation.count(tokens.lower[i - back])) {
        polarity = -polarity;
        break;
      }
    }
    (polarity > 0 ? positive : negative) += 1;
  }
  return (positive > negative) - (positive < negative);
}

ReplySignals reply_signals(std::span<const std::string> reply_texts, const Lexicons& lexicons,
                           const SentimentScorer& scorer) {
  ReplySignals out;
  if (reply_texts.empty()) return out;
  std::string joined;
  for (const auto& reply : reply_texts) {
    for (const auto& tok : tokenize(reply).lower) {
      if (lexicons.confirmatory.count(tok)) out.confirmatory = true;
      if (lexicons.gratitude.count(tok)) out.gratitude = true;
    }
    if (!joined.empty()) joined += '\n';
    joined += reply;
  }
  out.reply_sentiment = scorer.score(joined);
  return out;
}

ReplySignals reply_signals(std::span<const std::string> reply_texts, const Lexicons& lexicons) {
  return reply_signals(reply_texts, lexicons, LexiconSentiment(lexicons));
}

std::vector<std::string> content_terms(std::string_view text, const TermSet& stop_words) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(text).lower) {
    if (!stop_words.count(tok)) out.push_back(std::move(tok));
  }
  return out;
}

}  // namespace cra::textfeat
