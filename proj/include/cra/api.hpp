#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cra/metrics.hpp"
#include "cra/miner.hpp"
#include "cra/store.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace cra::api {

inline constexpr const char* kSessionCookie = "cra_session";
inline constexpr int kDefaultRankingLimit = 100;
inline constexpr int kDashboardTopN = 5;

struct UserAccount {
  /// Letters, digits and . _ @ - only, so it can travel inside a cookie.
  std::string id;
  /// Lowercase hex SHA-256 of the password.
  std::string password_sha256;
  bool admin = false;
};

struct ApiConfig {
  /// HMAC key for session cookies. Must be non-empty.
  std::string session_secret;
  std::vector<UserAccount> users;
  /// Labeling deep link; {change_id}, {patchset}, {file}, {line} and
  /// {comment_id} are substituted. Empty means no link.
  std::string deep_link_template;
  long long session_ttl_seconds = 8 * 3600;
  /// Strings that must never appear in a response body, such as the store
  /// path. Secrets held by the config are added automatically.
  std::vector<std::string> redact;
  std::function<Timestamp()> clock;
};

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

/// Default dashboard window: the two whole calendar months before `now`.
Period default_period(Timestamp now);

/// Hex SHA-256, for building user tables.
std::string sha256_hex(std::string_view text);

struct DashboardSummary {
  Period period;
  std::optional<metrics::RankingEntry> best_reviewer;  // by RI
  std::optional<metrics::RankingEntry> best_project;   // by usefulness %
  double useful_pct = 0.0;
  std::vector<metrics::RankingEntry> top_reviewers;
  std::vector<metrics::RankingEntry> top_projects;
};

/// Projects rank by usefulness, 100 * UC / NC.
DashboardSummary dashboard(const store::Snapshot& snapshot, Period period);
nlohmann::json to_json(const DashboardSummary& summary);

/// Request handling over a store. Handlers only read snapshots, so any
/// number of requests may run at once. Mining runs are single-flight.
class Service {
 public:
  /// `mine_job` performs one mining run; it is called on a worker thread.
  Service(store::Store& store, ApiConfig config, std::function<void()> mine_job = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse handle(const HttpRequest& request);

  /// Starts a mining run unless one is in flight. Used by the HTTP trigger
  /// and by the interval scheduler.
  bool trigger_mining();
  bool mining() const { return flight_.running(); }
  /// Blocks until no mining run is in flight.
  void wait_for_mining();

 private:
  struct Session {
    std::string user;
    bool admin = false;
    std::uint64_t seed = 0;
  };

  HttpResponse route(const HttpRequest& request);
  std::optional<Session> session_of(const HttpRequest& request) const;
  std::string issue_cookie(const UserAccount& user);
  HttpResponse login(const HttpRequest& request);
  HttpResponse labeling_next(const Session& session);
  HttpResponse labeling_submit(const Session& session, const HttpRequest& request);
  HttpResponse labeling_progress(const Session& session);
  HttpResponse rankings(const HttpRequest& request);
  HttpResponse entity(const HttpRequest& request, const std::string& kind, const std::string& id);
  HttpResponse set_interval(const HttpRequest& request);
  Timestamp now() const;
  std::string scrub(std::string body) const;

  store::Store& store_;
  ApiConfig config_;
  std::function<void()> mine_job_;
  miner::SingleFlight flight_;
  std::mutex worker_mutex_;
  std::thread worker_;
  std::mutex submit_mutex_;
  std::set<std::pair<std::string, std::string>> submitting_;
  std::atomic<std::uint64_t> cookie_counter_{0};
};

/// Routes every /api request of `server` to `service`; serves files from
/// `static_dir` at / when it is given.
void mount(httplib::Server& server, Service& service, const std::string& static_dir = "");

}  // namespace cra::api
