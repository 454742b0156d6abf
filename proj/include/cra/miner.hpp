#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cra/ingest.hpp"
#include "json.hpp"

namespace cra::miner {

/// Name of the environment variable holding "user:password" for HTTP basic
/// auth. The credential is never accepted any other way.
inline constexpr const char* kCredentialEnv = "CRA_MINER_CREDENTIAL";
inline constexpr int kMinPollIntervalSeconds = 60;

struct MinerConfig {
  /// Scheme, host, optional port and path prefix, e.g. https://review.example/gerrit
  std::string base_url;
  int poll_interval_seconds = 3600;
  int page_size = 100;
  /// Attempts after the first one for retriable failures.
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
  int timeout_seconds = 30;
};

struct MineResult {
  ReviewDump dump;
  /// Largest `updated` among the fetched changes; none when nothing changed.
  std::optional<Timestamp> high_water_mark;
};

/// Everything fetched for one Gerrit change, before mapping.
struct GerritChange {
  nlohmann::json change;
  /// GET /changes/{id}/comments
  nlohmann::json comments;
  /// patchset number -> path -> diff against the previous patchset (or the
  /// parent commit for patchset 1).
  std::map<int, std::map<std::string, nlohmann::json>> diffs;
  /// (patchset, path) -> file text, for code context.
  std::map<std::pair<int, std::string>, std::string> contents;
};

/// The adapter boundary: maps fetched Gerrit payloads to a validated dump.
/// Throws SchemaMismatch on payloads it does not recognise.
ReviewDump gerrit_to_dump(const std::vector<GerritChange>& changes);

/// Post-image line numbers that a Gerrit diff marks as changed.
std::set<int> changed_lines_from_diff(const nlohmann::json& diff);

/// Up to ten lines of `text` centered on the 1-based `line`.
std::optional<std::string> code_context(const std::string& text, int line);

/// Fetches the changes updated at or after `since`. Runs for the same
/// base_url are serialized; a second caller waits for the first.
/// Throws AuthFailure (missing or rejected credential), NetworkFailure (after
/// bounded exponential backoff) or SchemaMismatch.
MineResult mine_incremental(const MinerConfig& config, Timestamp since);

/// Start-or-reject guard for a single background job.
class SingleFlight {
 public:
  /// False when a run is already in progress.
  bool try_start();
  void finish();
  bool running() const;

 private:
  mutable std::mutex mutex_;
  bool running_ = false;
};

}  // namespace cra::miner
