#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cra/ingest.hpp"
#include "cra/metrics.hpp"
#include "cra/model.hpp"

namespace cra::store {

/// Bumped with every schema migration; stored in PRAGMA user_version.
inline constexpr int kSchemaVersion = 1;

struct UpsertCounts {
  int inserted = 0;
  int updated = 0;
  friend bool operator==(const UpsertCounts&, const UpsertCounts&) = default;
};

struct StoredPrediction {
  std::string comment_id;
  std::string model_version;
  bool useful = false;
  double probability = 0.0;
  Timestamp predicted_at;
  friend bool operator==(const StoredPrediction&, const StoredPrediction&) = default;
};

/// A label value that was overwritten, kept forever.
struct LabelAuditEntry {
  UsefulnessLabel previous;
  Timestamp replaced_at;
  friend bool operator==(const LabelAuditEntry&, const LabelAuditEntry&) = default;
};

/// One comment as shown to its change author for labeling.
struct LabelingItem {
  ReviewComment comment;
  std::string change_id;
  std::string project_id;
  std::string file_path;
  int line = 0;
};

struct LabelProgress {
  int labeled = 0;
  /// Reviewer comments received on the rater's changes.
  int total = 0;
  friend bool operator==(const LabelProgress&, const LabelProgress&) = default;
};

struct StoredModel {
  std::string model_version;
  std::string algorithm;
  Timestamp created_at;
  std::string artifact;
};

/// Everything the metrics need, read in one transaction.
struct Snapshot {
  ReviewDump dump;
  /// Latest prediction per comment, overridden by the latest human label.
  metrics::VerdictMap verdicts;
};

/// Single-file SQLite store. All calls are serialized through one
/// connection, so each call sees a consistent snapshot and there is a single
/// writer. Safe to share between threads.
class Store {
 public:
  /// Creates the file and schema if needed. A store written by a newer
  /// schema is refused with StorageFailure.
  explicit Store(const std::filesystem::path& path);
  ~Store();
  Store(Store&&) noexcept;
  Store& operator=(Store&&) noexcept;

  /// Idempotent by id. A change counts as updated only when its canonical
  /// body differs from the stored one. Comments are never deleted, so labels
  /// and predictions stay attached.
  UpsertCounts upsert_dump(const ReviewDump& dump);

  ReviewDump load_dump() const;
  Snapshot snapshot() const;
  bool has_developer(std::string_view developer_id) const;
  bool has_project(std::string_view project_id) const;

  /// Authors who received at least `min_comments` reviewer comments in
  /// [now - months, now]. Sorted.
  std::vector<std::string> eligible_labelers(Timestamp now, int months = 4, int min_comments = 50) const;

  /// An unlabeled reviewer comment on one of the rater's changes, or none.
  /// Order is a hash of (session_seed, comment_id), so it is stable for a
  /// session and differs between sessions.
  std::optional<LabelingItem> next_unlabeled(std::string_view rater_id, std::uint64_t session_seed = 0) const;

  /// Throws UnknownComment or NotChangeAuthor. Overwrites a previous label by
  /// the same rater after copying it to the audit table. Returns true when a
  /// label was replaced.
  bool submit_label(const UsefulnessLabel& label, Timestamp now);
  LabelProgress progress(std::string_view rater_id) const;
  std::size_t label_count() const;
  /// Ordered by comment_id, rater_id.
  std::vector<UsefulnessLabel> labels() const;
  std::vector<LabelAuditEntry> label_audit(std::string_view comment_id) const;
  std::string export_labels_csv() const;

  /// Upsert per (comment_id, model_version), all in one transaction.
  void put_predictions(const std::vector<StoredPrediction>& predictions);
  std::vector<StoredPrediction> predictions() const;
  /// Reviewer comments with no prediction from `model_version`, sorted.
  std::vector<std::string> unpredicted_comments(std::string_view model_version) const;

  void put_model(const StoredModel& model);
  std::optional<StoredModel> model(std::string_view model_version) const;
  /// Most recently created, ties by version.
  std::optional<StoredModel> latest_model() const;

  std::optional<Timestamp> high_water_mark(std::string_view endpoint) const;
  void set_high_water_mark(std::string_view endpoint, Timestamp mark);
  std::optional<int> mining_interval() const;
  void set_mining_interval(int seconds);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cra::store
