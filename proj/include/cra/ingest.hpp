#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cra/model.hpp"

namespace cra {

inline constexpr int kDumpFormatVersion = 1;

/// Portable snapshot of mined review history.
struct ReviewDump {
  int format_version = kDumpFormatVersion;
  std::vector<Developer> developers;
  std::vector<Project> projects;
  std::vector<ReviewChange> changes;
  friend bool operator==(const ReviewDump&, const ReviewDump&) = default;
};

/// Parses and fully validates a canonical dump.
/// Throws MalformedJson, UnsupportedVersion, DanglingReference or InvalidDump.
ReviewDump parse_review_dump(std::string_view bytes);

/// Canonical serialization; parse_review_dump(serialize_review_dump(d)) == d.
std::string serialize_review_dump(const ReviewDump& dump, int indent = 2);

/// Checks cross references and per-change invariants of an in-memory dump.
void validate_dump(const ReviewDump& dump);

/// Compact JSON of one change, in the same shape as a dump entry.
std::string serialize_change(const ReviewChange& change);
/// Inverse of serialize_change. Throws MalformedJson or InvalidDump; does not
/// resolve developer or project ids.
ReviewChange parse_change(std::string_view bytes);

/// Comment lookup helpers over a change.
const CommentThread* find_thread(const ReviewChange& change, std::string_view thread_id);

// ---------------------------------------------------------------------------
// Per-comment review context

inline constexpr int kTriggerProximity = 5;
inline constexpr int kNoLineChange = 999;

struct TriggerResult {
  bool triggered = false;
  int line_change = kNoLineChange;
  friend bool operator==(const TriggerResult&, const TriggerResult&) = default;
};

/// Did a later patchset touch the commented file within five lines of the
/// thread's line? Any later change counts, whoever authored it.
TriggerResult change_trigger(const ReviewComment& comment, const ReviewChange& change);

struct ThreadContext {
  bool author_responded = false;
  std::vector<std::string> reply_texts;
  int thread_length = 0;
  int num_participant = 0;
  bool is_last_patch = false;
  int patch_id = 0;
  int num_patches = 0;
  long long review_interval = 0;  // seconds
  ChangeStatus review_status = ChangeStatus::open;
};

ThreadContext thread_context(const ReviewComment& comment, const ReviewChange& change);

struct ExperienceFeatures {
  int code_reviewership = 0;
  int code_ownership = 0;
  int reviewing_experience = 0;
  int developer_experience = 0;
  friend bool operator==(const ExperienceFeatures&, const ExperienceFeatures&) = default;
};

/// All counts consider history strictly before `as_of`. A developer has
/// reviewed a change when they wrote at least one comment on it and did not
/// author it.
ExperienceFeatures experience(const ReviewDump& history, std::string_view reviewer_id,
                              std::string_view author_id, std::string_view file_path,
                              std::string_view project_id, Timestamp as_of);

/// Same contract as experience(), over a list of changes.
ExperienceFeatures experience(const std::vector<ReviewChange>& changes, std::string_view reviewer_id,
                              std::string_view author_id, std::string_view file_path,
                              std::string_view project_id, Timestamp as_of);

}  // namespace cra
