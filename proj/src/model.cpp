#include "cra/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace cra {

std::string_view to_string(ChangeStatus status) {
  switch (status) {
    case ChangeStatus::open: return "open";
    case ChangeStatus::merged: return "merged";
    case ChangeStatus::abandoned: return "abandoned";
  }
  return "open";
}

std::optional<ChangeStatus> parse_change_status(std::string_view text) {
  if (text == "open") return ChangeStatus::open;
  if (text == "merged") return ChangeStatus::merged;
  if (text == "abandoned") return ChangeStatus::abandoned;
  return std::nullopt;
}

const Patchset* ReviewChange::find_patchset(int number) const {
  for (const auto& ps : patchsets) {
    if (ps.number == number) return &ps;
  }
  return nullptr;
}

int ReviewChange::last_patchset_number() const {
  int last = 0;
  for (const auto& ps : patchsets) last = std::max(last, ps.number);
  return last;
}

namespace {

constexpr std::array<std::pair<CommentCategory, std::string_view>, kCategoryCount> kCategoryNames{{
    {CommentCategory::AlternateOutput, "AlternateOutput"},
    {CommentCategory::DesignDiscussion, "DesignDiscussion"},
    {CommentCategory::Documentation, "Documentation"},
    {CommentCategory::FalsePositive, "FalsePositive"},
    {CommentCategory::Interface, "Interface"},
    {CommentCategory::LargerDefect, "LargerDefect"},
    {CommentCategory::Logical, "Logical"},
    {CommentCategory::NamingConvention, "NamingConvention"},
    {CommentCategory::OrganizationOfCode, "OrganizationOfCode"},
    {CommentCategory::Praise, "Praise"},
    {CommentCategory::Question, "Question"},
    {CommentCategory::Resource, "Resource"},
    {CommentCategory::SolutionApproach, "SolutionApproach"},
    {CommentCategory::Support, "Support"},
    {CommentCategory::Timing, "Timing"},
    {CommentCategory::Validation, "Validation"},
    {CommentCategory::VisualRepresentation, "VisualRepresentation"},
    {CommentCategory::Others, "Others"},
}};

}  // namespace

const std::array<CommentCategory, kCategoryCount>& all_categories() {
  static const auto values = [] {
    std::array<CommentCategory, kCategoryCount> out{};
    for (std::size_t i = 0; i < kCategoryCount; ++i) out[i] = kCategoryNames[i].first;
    return out;
  }();
  return values;
}

std::string_view to_string(CommentCategory category) {
  for (const auto& [value, name] : kCategoryNames) {
    if (value == category) return name;
  }
  return "Others";
}

std::optional<CommentCategory> parse_category(std::string_view text) {
  for (const auto& [value, name] : kCategoryNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

bool comment_order(const ReviewComment& a, const ReviewComment& b) {
  if (a.written_at != b.written_at) return a.written_at < b.written_at;
  return a.comment_id < b.comment_id;
}

std::vector<Violation> validate_change(const ReviewChange& change) {
  std::vector<Violation> out;
  auto fail = [&out](std::string field, std::string rule) {
    out.push_back({std::move(field), std::move(rule)});
  };

  if (change.change_id.empty()) fail("change_id", "must be non-empty");
  if (change.project_id.empty()) fail("project_id", "must be non-empty");
  if (change.author_id.empty()) fail("author_id", "must be non-empty");

  std::unordered_set<int> numbers;
  for (std::size_t i = 0; i < change.patchsets.size(); ++i) {
    const auto& ps = change.patchsets[i];
    const std::string field = "patchsets[" + std::to_string(i) + "]";
    if (ps.number < 1) fail(field + ".number", "patchset number must be positive");
    if (!numbers.insert(ps.number).second) {
      fail(field + ".number", "duplicate patchset number");
    } else if (i > 0 && ps.number < change.patchsets[i - 1].number) {
      fail(field + ".number", "patchset numbers must be strictly increasing");
    }
    if (i == 0 && ps.number != 1) fail(field + ".number", "first patchset must be number 1");
    if (i > 0 && ps.uploaded_at < change.patchsets[i - 1].uploaded_at) {
      fail(field + ".uploaded_at", "upload times must not decrease with patchset number");
    }
    for (std::size_t f = 0; f < ps.files.size(); ++f) {
      const auto& file = ps.files[f];
      const std::string ffield = field + ".files[" + std::to_string(f) + "]";
      if (file.path.empty()) fail(ffield + ".path", "must be non-empty");
      if (!file.changed_new_lines.empty() && *file.changed_new_lines.begin() < 1) {
        fail(ffield + ".changed_new_lines", "line numbers must be >= 1");
      }
    }
  }

  if (change.status != ChangeStatus::open && change.patchsets.empty()) {
    fail("status", "merged or abandoned change requires at least one patchset");
  }

  std::unordered_set<std::string> thread_ids;
  std::unordered_set<std::string> comment_ids;
  for (std::size_t t = 0; t < change.threads.size(); ++t) {
    const auto& thread = change.threads[t];
    const std::string field = "threads[" + std::to_string(t) + "]";
    if (thread.thread_id.empty()) fail(field + ".thread_id", "must be non-empty");
    if (!thread_ids.insert(thread.thread_id).second) fail(field + ".thread_id", "duplicate thread id");
    if (thread.file_path.empty()) fail(field + ".file_path", "must be non-empty");
    if (thread.line < 1) fail(field + ".line", "line must be positive");
    if (change.find_patchset(thread.origin_patchset) == nullptr) {
      fail(field + ".origin_patchset", "dangling patchset reference");
    }
    if (thread.comments.empty()) fail(field + ".comments", "thread must contain at least one comment");

    for (std::size_t c = 0; c < thread.comments.size(); ++c) {
      const auto& comment = thread.comments[c];
      const std::string cfield = field + ".comments[" + std::to_string(c) + "]";
      if (comment.comment_id.empty()) fail(cfield + ".comment_id", "must be non-empty");
      if (!comment_ids.insert(comment.comment_id).second) fail(cfield + ".comment_id", "duplicate comment id");
      if (comment.author_id.empty()) fail(cfield + ".author_id", "must be non-empty");
      if (comment.thread_id != thread.thread_id) fail(cfield + ".thread_id", "must match the owning thread");
      if (c > 0 && comment_order(comment, thread.comments[c - 1])) {
        fail(cfield + ".written_at", "comments must be time-ordered");
      }
      const Patchset* ps = change.find_patchset(comment.patchset_number);
      if (ps == nullptr) {
        fail(cfield + ".patchset_number", "dangling patchset reference");
      } else if (comment.written_at < ps->uploaded_at) {
        fail(cfield + ".written_at", "comment precedes its patchset upload");
      }
    }
  }
  return out;
}

}  // namespace cra
