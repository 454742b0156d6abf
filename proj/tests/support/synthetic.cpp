#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <chrono>

#include "cra/rng.hpp"

namespace cra::testing {

namespace {

using std::chrono::hours;
using std::chrono::minutes;

constexpr std::array kIdentifiers = {
    "accountBalance", "retryCount",   "userName",     "parseHeader", "bufferSize",  "maxWidth",
    "loadConfig",     "sessionToken", "orderTotal",   "fetchRows",   "cacheKey",    "timeoutMs",
    "queueDepth",     "renderPage",   "lastIndex",    "itemPrice",   "flushLog",    "portNumber",
    "rowCount",       "saveDraft",    "pageOffset",   "hashValue",   "startTime",   "endTime",
    "requestId",      "mergeLists",   "fileHandle",   "nodeCount",   "readBytes",   "sortKeys",
    "tokenExpiry",    "splitPath",    "colorIndex",   "scoreTable",  "payloadSize", "retryDelay",
    "clientId",       "buildQuery",   "rateLimit",    "shardId",
};
constexpr std::array kFillers = {"consider", "moving", "logic", "into", "helper", "method", "maybe",
                                 "boundary", "case", "please", "extract", "variable", "loop",
                                 "condition", "handling", "test", "coverage", "rename", "simplify",
                                 "branch", "comment", "naming", "docs", "guard", "early", "exit"};
constexpr std::array kPositive = {"nice", "clean", "elegant", "readable", "neat"};
constexpr std::array kNegative = {"wrong", "confusing", "unsafe", "redundant", "messy"};
constexpr std::array kReplies = {"Done.", "Thanks, fixed!", "Will look later", "Updated as suggested",
                                 "Good point"};
constexpr std::array kFiles = {"Ledger", "Refund", "Invoice", "Cart",   "Session", "Router", "Cache",
                               "Parser", "Report", "Audit",  "Upload", "Search",  "Billing", "Mailer",
                               "Stock",  "Queue",  "Token",  "Config", "Metrics", "Export"};
constexpr std::array<CommentCategory, 4> kUsefulCategories = {
    CommentCategory::Logical, CommentCategory::NamingConvention, CommentCategory::Validation,
    CommentCategory::SolutionApproach};

template <typename Array>
auto pick(const Array& a, Rng& rng) {
  return a[uniform_index(rng, a.size())];
}

bool chance(Rng& rng, double p) { return uniform01(rng) < p; }

std::string developer(std::size_t i) {
  return std::string("dev") + (i < 9 ? "0" : "") + std::to_string(i + 1);
}

std::string comment_text(const SyntheticTruth& t, const std::string& identifier, Rng& rng) {
  std::vector<std::string> words;
  const std::size_t fillers = 2 + uniform_index(rng, 5);
  for (std::size_t i = 0; i < fillers; ++i) words.emplace_back(pick(kFillers, rng));
  if (t.similar) words.insert(words.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, words.size() + 1)),
                              identifier);
  if (t.sentiment > 0) words.emplace_back(pick(kPositive, rng));
  if (t.sentiment < 0) words.emplace_back(pick(kNegative, rng));
  std::string text;
  for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
  text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text + (chance(rng, 0.3) ? "?" : ".");
}

}  // namespace

bool latent_useful(bool trigger, int sentiment, bool similar) { return trigger || (sentiment >= 0 && similar); }

SyntheticData generate_synthetic(const SyntheticOptions& options) {
  Rng rng(options.seed);
  SyntheticData out;
  constexpr std::size_t kDevelopers = 12;
  for (std::size_t i = 0; i < kDevelopers; ++i) out.dump.developers.push_back({developer(i), "Developer " + std::to_string(i + 1)});
  const std::array<std::string, 3> projects{"alpha", "beta", "gamma"};
  for (const auto& p : projects) out.dump.projects.push_back({p, "Project " + p});

  // Noise-free verdicts: exactly clean_negatives of them are "not useful".
  std::vector<std::size_t> order(options.comments);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);
  out.truth.resize(options.comments);
  for (std::size_t k = 0; k < order.size(); ++k) {
    SyntheticTruth& t = out.truth[order[k]];
    t.clean_useful = k >= options.clean_negatives;
    if (!t.clean_useful) {
      t.trigger = false;
      switch (uniform_index(rng, 3)) {
        case 0: t.sentiment = -1; t.similar = true; break;
        case 1: t.sentiment = -1; t.similar = false; break;
        default: t.sentiment = static_cast<int>(uniform_index(rng, 2)); t.similar = false; break;
      }
    } else if (chance(rng, 0.75)) {
      t.trigger = true;
      const double s = uniform01(rng);
      t.sentiment = s < 0.2 ? -1 : (s < 0.7 ? 0 : 1);
      t.similar = chance(rng, 0.7);
    } else {
      t.trigger = false;
      t.sentiment = static_cast<int>(uniform_index(rng, 2));
      t.similar = true;
    }
    t.label = t.clean_useful;
  }
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < out.truth.size(); ++i) (out.truth[i].clean_useful ? positives : negatives).push_back(i);
  shuffle(positives, rng);
  shuffle(negatives, rng);
  for (std::size_t k = 0; k < options.flips_to_negative && k < positives.size(); ++k) out.truth[positives[k]].label = false;
  for (std::size_t k = 0; k < options.flips_to_positive && k < negatives.size(); ++k) out.truth[negatives[k]].label = true;

  constexpr std::size_t kPerChange = 4;
  const Timestamp base = Timestamp{} + std::chrono::seconds(1704067200);  // 2024-01-01
  for (std::size_t first = 0, c = 0; first < options.comments; first += kPerChange, ++c) {
    ReviewChange change;
    change.change_id = std::to_string(1000 + c);
    change.project_id = projects[uniform_index(rng, projects.size())];
    const std::size_t author = uniform_index(rng, kDevelopers);
    change.author_id = developer(author);
    change.created_at = base + hours(6 * static_cast<long>(c));
    const std::size_t s = uniform_index(rng, 3);
    change.status = s == 0 ? ChangeStatus::merged : (s == 1 ? ChangeStatus::abandoned : ChangeStatus::open);

    Patchset ps1{1, change.created_at, {}};
    Patchset ps2{2, change.created_at + hours(72), {}};
    std::vector<std::size_t> files(kFiles.size());
    for (std::size_t i = 0; i < files.size(); ++i) files[i] = i;
    shuffle(files, rng);

    const std::size_t last = std::min(options.comments, first + kPerChange);
    for (std::size_t i = first; i < last; ++i) {
      SyntheticTruth& t = out.truth[i];
      t.comment_id = "c" + std::to_string(i + 1);
      const std::string path = "src/" + std::string(kFiles[files[i - first]]) + ".java";
      const int line = 10 + static_cast<int>(uniform_index(rng, 200));
      ps1.files.push_back({path, {line}});
      if (t.trigger) {
        const int d = static_cast<int>(uniform_index(rng, 6));
        ps2.files.push_back({path, {std::max(1, chance(rng, 0.5) ? line + d : line - d)}});
      } else if (chance(rng, 0.5)) {
        ps2.files.push_back({path, {line + 6 + static_cast<int>(uniform_index(rng, 40))}});
      }

      std::size_t reviewer = uniform_index(rng, kDevelopers - 1);
      if (reviewer >= author) ++reviewer;
      const std::string id1 = pick(kIdentifiers, rng);
      const std::string id2 = pick(kIdentifiers, rng);
      ReviewComment comment;
      comment.comment_id = t.comment_id;
      comment.thread_id = "t" + std::to_string(i + 1);
      comment.author_id = developer(reviewer);
      comment.written_at = change.created_at + minutes(30 + static_cast<long>(uniform_index(rng, 48 * 60)));
      comment.patchset_number = 1;
      comment.code_context = "int " + id1 + " = " + id2 + "(x);\nreturn " + id1 + ";";
      comment.text = comment_text(t, id1, rng);

      CommentThread thread{comment.thread_id, path, line, 1, {comment}};
      if (chance(rng, 0.5)) {
        ReviewComment reply;
        reply.comment_id = t.comment_id + "r";
        reply.thread_id = comment.thread_id;
        reply.author_id = change.author_id;
        reply.written_at = comment.written_at + hours(1);
        reply.patchset_number = 1;
        reply.text = pick(kReplies, rng);
        thread.comments.push_back(std::move(reply));
      }
      change.threads.push_back(std::move(thread));

      UsefulnessLabel label;
      label.comment_id = t.comment_id;
      label.rater_id = change.author_id;
      label.is_useful = t.label;
      label.category = t.label ? pick(kUsefulCategories, rng) : CommentCategory::Others;
      label.labeled_at = comment.written_at + hours(24);
      out.labels.push_back(std::move(label));
    }
    change.patchsets.push_back(std::move(ps1));
    change.patchsets.push_back(std::move(ps2));
    if (chance(rng, 0.3)) change.patchsets.push_back({3, change.created_at + hours(96), {{"README.md", {1}}}});
    out.dump.changes.push_back(std::move(change));
  }
  return out;
}

}  // namespace cra::testing
