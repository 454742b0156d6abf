#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cra/time.hpp"

namespace cra {

struct Developer {
  std::string developer_id;
  std::string display_name;
  friend bool operator==(const Developer&, const Developer&) = default;
};

struct Project {
  std::string project_id;
  std::string name;
  friend bool operator==(const Project&, const Project&) = default;
};

enum class ChangeStatus { open, merged, abandoned };

std::string_view to_string(ChangeStatus status);
std::optional<ChangeStatus> parse_change_status(std::string_view text);

/// Post-image line numbers touched by a patchset in one file. Hunk text is
/// not kept; change-trigger proximity only needs the line numbers.
struct FileDiff {
  std::string path;
  std::set<int> changed_new_lines;
  friend bool operator==(const FileDiff&, const FileDiff&) = default;
};

struct Patchset {
  int number = 0;
  Timestamp uploaded_at;
  std::vector<FileDiff> files;
  friend bool operator==(const Patchset&, const Patchset&) = default;
};

struct ReviewComment {
  std::string comment_id;
  std::string thread_id;
  std::string author_id;
  Timestamp written_at;
  std::string text;
  int patchset_number = 0;
  /// Source lines around the commented line, captured when mined.
  std::optional<std::string> code_context;
  friend bool operator==(const ReviewComment&, const ReviewComment&) = default;
};

struct CommentThread {
  std::string thread_id;
  std::string file_path;
  int line = 0;
  int origin_patchset = 0;
  std::vector<ReviewComment> comments;
  friend bool operator==(const CommentThread&, const CommentThread&) = default;
};

struct ReviewChange {
  std::string change_id;
  std::string project_id;
  std::string author_id;
  Timestamp created_at;
  ChangeStatus status = ChangeStatus::open;
  std::vector<Patchset> patchsets;
  std::vector<CommentThread> threads;

  const Patchset* find_patchset(int number) const;
  int last_patchset_number() const;
  friend bool operator==(const ReviewChange&, const ReviewChange&) = default;
};

enum class CommentCategory {
  AlternateOutput,
  DesignDiscussion,
  Documentation,
  FalsePositive,
  Interface,
  LargerDefect,
  Logical,
  NamingConvention,
  OrganizationOfCode,
  Praise,
  Question,
  Resource,
  SolutionApproach,
  Support,
  Timing,
  Validation,
  VisualRepresentation,
  Others,
};

inline constexpr std::size_t kCategoryCount = 18;
const std::array<CommentCategory, kCategoryCount>& all_categories();
std::string_view to_string(CommentCategory category);
std::optional<CommentCategory> parse_category(std::string_view text);

struct UsefulnessLabel {
  std::string comment_id;
  std::string rater_id;
  bool is_useful = false;
  CommentCategory category = CommentCategory::Others;
  Timestamp labeled_at;
  friend bool operator==(const UsefulnessLabel&, const UsefulnessLabel&) = default;
};

struct Violation {
  std::string field;
  std::string rule;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Empty iff every structural invariant of the change holds. Pure.
std::vector<Violation> validate_change(const ReviewChange& change);

/// Comments ordered by written_at, ties by comment_id.
bool comment_order(const ReviewComment& a, const ReviewComment& b);

}  // namespace cra
