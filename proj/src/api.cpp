#include "cra/api.hpp"

#include <httplib.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <regex>

#include "cra/error.hpp"
#include "cra/rng.hpp"

namespace cra::api {

using nlohmann::json;

namespace {

std::string hex(const unsigned char* data, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 15];
  }
  return out;
}

std::string hmac_hex(std::string_view key, std::string_view message) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), reinterpret_cast<const unsigned char*>(message.data()),
       message.size(), mac, &len);
  return hex(mac, len);
}

bool same_secret(std::string_view a, std::string_view b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

HttpResponse json_response(int status, const json& body) {
  HttpResponse r;
  r.status = status;
  r.body = body.dump();
  r.headers["Content-Type"] = "application/json";
  return r;
}

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"error", {{"code", code}, {"message", message}}}});
}

struct BadRequest {
  std::string message;
};

std::optional<std::string> param(const HttpRequest& r, const std::string& name) {
  const auto it = r.query.find(name);
  if (it == r.query.end()) return std::nullopt;
  return it->second;
}

int int_param(const HttpRequest& r, const std::string& name, int fallback, int lo, int hi) {
  const auto v = param(r, name);
  if (!v) return fallback;
  static const std::regex digits(R"(^\d{1,9}$)");
  if (!std::regex_match(*v, digits)) throw BadRequest{"'" + name + "' must be a non-negative integer"};
  const int n = std::stoi(*v);
  if (n < lo || n > hi) throw BadRequest{"'" + name + "' must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
  return n;
}

Period period_param(const HttpRequest& r, Timestamp now) {
  const auto from = param(r, "from");
  const auto to = param(r, "to");
  if (!from && !to) return default_period(now);
  if (!from || !to) throw BadRequest{"'from' and 'to' must be given together"};
  const auto f = parse_timestamp(*from);
  const auto t = parse_timestamp(*to);
  if (!f || !t) throw BadRequest{"'from' and 'to' must be ISO-8601 dates"};
  if (!(*f < *t)) throw BadRequest{"'from' must be before 'to'"};
  return {*f, *t};
}

json period_json(Period p) { return {{"from", format_timestamp(p.from)}, {"to", format_timestamp(p.to)}}; }

json entry_json(const metrics::RankingEntry& e) { return {{"entity_id", e.entity_id}, {"rank", e.rank}, {"value", e.value}}; }

json metrics_json(const metrics::PeriodMetrics& m) {
  return {{"NR", m.nr},         {"NC", m.nc},       {"UC", m.uc},
          {"CUD", m.cud},       {"ID", m.id},       {"RE", m.re},
          {"RI", m.ri},         {"NC_score", m.nc_score}, {"CUD_score", m.cud_score},
          {"review_score", m.review_score}};
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    const auto j = path.find('/', i);
    out.emplace_back(path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j;
  }
  return out;
}

json categories_json() {
  json out = json::array();
  for (auto c : all_categories()) out.push_back(to_string(c));
  return out;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (std::size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

std::vector<metrics::RankingEntry> project_usefulness(const std::vector<metrics::PeriodMetrics>& projects) {
  auto entries = metrics::rank(projects, metrics::RankKey::CUD).entries;
  for (auto& e : entries) e.value *= 100.0;
  return entries;
}

}  // namespace

Period default_period(Timestamp now) {
  const Timestamp to = month_start(now);
  return {add_months(to, -2), to};
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  return hex(digest, len);
}

DashboardSummary dashboard(const store::Snapshot& snapshot, Period period) {
  DashboardSummary s;
  s.period = period;
  const auto reviewers = metrics::reviewer_metrics(snapshot.dump.changes, snapshot.verdicts, period);
  const auto projects = metrics::project_metrics(snapshot.dump.changes, snapshot.verdicts, period);
  long long nc = 0, uc = 0;
  for (const auto& r : reviewers) {
    nc += r.nc;
    uc += r.uc;
  }
  s.useful_pct = nc == 0 ? 0.0 : 100.0 * static_cast<double>(uc) / static_cast<double>(nc);
  const auto by_ri = metrics::rank(reviewers, metrics::RankKey::RI).entries;
  const auto by_use = project_usefulness(projects);
  if (!by_ri.empty()) s.best_reviewer = by_ri.front();
  if (!by_use.empty()) s.best_project = by_use.front();
  s.top_reviewers.assign(by_ri.begin(), by_ri.begin() + std::min<std::ptrdiff_t>(kDashboardTopN, std::ssize(by_ri)));
  s.top_projects.assign(by_use.begin(), by_use.begin() + std::min<std::ptrdiff_t>(kDashboardTopN, std::ssize(by_use)));
  return s;
}

json to_json(const DashboardSummary& s) {
  json out;
  out["period"] = period_json(s.period);
  out["best_reviewer"] = s.best_reviewer
                             ? json{{"id", s.best_reviewer->entity_id}, {"RI", static_cast<long long>(s.best_reviewer->value)}}
                             : json(nullptr);
  out["best_project"] =
      s.best_project ? json{{"id", s.best_project->entity_id}, {"useful_pct", s.best_project->value}} : json(nullptr);
  out["useful_pct"] = s.useful_pct;
  out["top5_reviewers"] = json::array();
  for (const auto& e : s.top_reviewers) out["top5_reviewers"].push_back(entry_json(e));
  out["top5_projects"] = json::array();
  for (const auto& e : s.top_projects) out["top5_projects"].push_back(entry_json(e));
  return out;
}

Service::Service(store::Store& store, ApiConfig config, std::function<void()> mine_job)
    : store_(store), config_(std::move(config)), mine_job_(std::move(mine_job)) {
  if (config_.session_secret.empty()) throw Error(ErrorCode::InvalidArgument, "session secret must be set");
  static const std::regex user_id(R"(^[A-Za-z0-9._@-]+$)");
  for (const auto& u : config_.users) {
    if (!std::regex_match(u.id, user_id)) throw Error(ErrorCode::InvalidArgument, "invalid user id in user table");
    config_.redact.push_back(u.password_sha256);
  }
  config_.redact.push_back(config_.session_secret);
  if (const char* credential = std::getenv(miner::kCredentialEnv); credential && *credential) {
    const std::string c = credential;
    config_.redact.push_back(c);
    if (const auto colon = c.find(':'); colon != std::string::npos) config_.redact.push_back(c.substr(colon + 1));
  }
  std::erase_if(config_.redact, [](const std::string& s) { return s.size() < 4; });
}

Service::~Service() { wait_for_mining(); }

Timestamp Service::now() const {
  if (config_.clock) return config_.clock();
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string Service::scrub(std::string body) const {
  for (const auto& secret : config_.redact) body = replace_all(std::move(body), secret, "[redacted]");
  return body;
}

bool Service::trigger_mining() {
  if (!mine_job_ || !flight_.try_start()) return false;
  std::lock_guard lock(worker_mutex_);
  if (worker_.joinable()) worker_.join();
  worker_ = std::thread([this] {
    try {
      mine_job_();
    } catch (...) {
      // The job reports its own failures; the flight must end regardless.
    }
    flight_.finish();
  });
  return true;
}

void Service::wait_for_mining() {
  std::lock_guard lock(worker_mutex_);
  if (worker_.joinable()) worker_.join();
}

std::string Service::issue_cookie(const UserAccount& user) {
  unsigned char nonce[16];
  if (RAND_bytes(nonce, sizeof nonce) != 1) {
    const auto n = mix_seed(cookie_counter_++ ^ static_cast<std::uint64_t>(now().time_since_epoch().count()));
    std::memcpy(nonce, &n, sizeof n);
    std::memcpy(nonce + 8, &n, sizeof n);
  }
  const std::string payload =
      user.id + "|" + std::to_string(now().time_since_epoch().count()) + "|" + hex(nonce, sizeof nonce);
  return payload + "|" + hmac_hex(config_.session_secret, payload);
}

std::optional<Service::Session> Service::session_of(const HttpRequest& request) const {
  const auto it = request.headers.find("Cookie");
  if (it == request.headers.end()) return std::nullopt;
  const std::string prefix = std::string(kSessionCookie) + "=";
  std::string token;
  for (std::string_view rest = it->second; !rest.empty();) {
    const auto semi = rest.find(';');
    std::string_view part = rest.substr(0, semi);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    if (part.starts_with(prefix)) token = std::string(part.substr(prefix.size()));
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  const auto mac_at = token.rfind('|');
  if (mac_at == std::string::npos) return std::nullopt;
  const std::string payload = token.substr(0, mac_at);
  if (!same_secret(token.substr(mac_at + 1), hmac_hex(config_.session_secret, payload))) return std::nullopt;

  const auto nonce_at = payload.rfind('|');
  const auto issued_at = payload.rfind('|', nonce_at == 0 ? 0 : nonce_at - 1);
  if (nonce_at == std::string::npos || issued_at == std::string::npos || issued_at >= nonce_at) return std::nullopt;
  const std::string user = payload.substr(0, issued_at);
  long long issued = 0;
  try {
    issued = std::stoll(payload.substr(issued_at + 1, nonce_at - issued_at - 1));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const long long t = now().time_since_epoch().count();
  if (issued > t + 60 || t - issued >= config_.session_ttl_seconds) return std::nullopt;
  const auto account = std::find_if(config_.users.begin(), config_.users.end(), [&](const UserAccount& u) { return u.id == user; });
  if (account == config_.users.end()) return std::nullopt;
  return Session{user, account->admin, fnv1a64(payload.substr(nonce_at + 1))};
}

HttpResponse Service::handle(const HttpRequest& request) {
  HttpResponse r;
  try {
    r = route(request);
  } catch (const BadRequest& e) {
    r = error_response(400, "InvalidArgument", e.message);
  } catch (const json::exception&) {
    r = error_response(400, "InvalidArgument", "request body is not the expected JSON");
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::InvalidArgument: r = error_response(400, e.name(), e.what()); break;
      case ErrorCode::UnknownComment: r = error_response(404, e.name(), e.what()); break;
      case ErrorCode::NotChangeAuthor: r = error_response(403, e.name(), e.what()); break;
      // Storage and other internal failures are not described to clients.
      default: r = error_response(500, e.name(), "internal error"); break;
    }
  } catch (const std::exception&) {
    r = error_response(500, "Internal", "internal error");
  }
  r.body = scrub(std::move(r.body));
  return r;
}

HttpResponse Service::route(const HttpRequest& request) {
  const auto parts = split_path(request.path);
  const std::string& m = request.method;
  if (parts.empty() || parts[0] != "api") return error_response(404, "NotFound", "no such route");
  const std::size_t n = parts.size();
  auto is = [&](std::initializer_list<const char*> want) {
    if (want.size() != n - 1) return false;
    std::size_t i = 1;
    for (const char* w : want) {
      if (parts[i++] != w) return false;
    }
    return true;
  };

  if (m == "GET" && is({"dashboard"})) {
    const Period p = period_param(request, now());
    return json_response(200, to_json(dashboard(store_.snapshot(), p)));
  }
  if (m == "GET" && is({"rankings"})) return rankings(request);
  if (m == "GET" && n == 4 && parts[1] == "entities") return entity(request, parts[2], parts[3]);
  if (m == "GET" && is({"categories"})) return json_response(200, {{"categories", categories_json()}});
  if (m == "POST" && is({"session"})) return login(request);
  if (m == "DELETE" && is({"session"})) {
    HttpResponse r = json_response(200, {{"ok", true}});
    r.headers["Set-Cookie"] = std::string(kSessionCookie) + "=; Path=/api; Max-Age=0; HttpOnly; SameSite=Strict";
    return r;
  }

  const bool labeling = n == 3 && parts[1] == "labeling";
  const bool admin = n >= 3 && parts[1] == "admin";
  if (!labeling && !admin) return error_response(404, "NotFound", "no such route");
  const auto session = session_of(request);
  if (!session) return error_response(401, "Unauthenticated", "sign in first");

  if (labeling) {
    if (m == "GET" && parts[2] == "next") return labeling_next(*session);
    if (m == "POST" && parts[2] == "submit") return labeling_submit(*session, request);
    if (m == "GET" && parts[2] == "progress") return labeling_progress(*session);
    return error_response(404, "NotFound", "no such route");
  }
  if (!session->admin) return error_response(403, "Forbidden", "admin role required");
  if (m == "POST" && is({"admin", "mine", "run"})) {
    if (!mine_job_) return error_response(409, "MinerUnavailable", "no miner endpoint is configured");
    if (!trigger_mining()) return error_response(409, "MiningInProgress", "a mining run is already in progress");
    return json_response(202, {{"status", "started"}});
  }
  if (m == "PUT" && is({"admin", "mine", "interval"})) return set_interval(request);
  if (m == "GET" && is({"admin", "mine"})) {
    const auto interval = store_.mining_interval();
    return json_response(200, {{"running", mining()}, {"interval_seconds", interval ? json(*interval) : json(nullptr)}});
  }
  return error_response(404, "NotFound", "no such route");
}

HttpResponse Service::login(const HttpRequest& request) {
  const json body = json::parse(request.body);
  const std::string user = body.at("user").get<std::string>();
  const std::string password = body.at("password").get<std::string>();
  const std::string digest = sha256_hex(password);
  const auto account = std::find_if(config_.users.begin(), config_.users.end(), [&](const UserAccount& u) { return u.id == user; });
  // Hash comparison runs even for unknown users so timing says little.
  const bool ok = same_secret(digest, account == config_.users.end() ? std::string(64, '0') : account->password_sha256) &&
                  account != config_.users.end();
  if (!ok) return error_response(401, "Unauthenticated", "unknown user or wrong password");
  HttpResponse r = json_response(200, {{"user", account->id}, {"admin", account->admin}});
  r.headers["Set-Cookie"] = std::string(kSessionCookie) + "=" + issue_cookie(*account) + "; Path=/api; Max-Age=" +
                            std::to_string(config_.session_ttl_seconds) + "; HttpOnly; SameSite=Strict";
  return r;
}

HttpResponse Service::labeling_next(const Session& session) {
  const auto item = store_.next_unlabeled(session.user, session.seed);
  json out = {{"categories", categories_json()}, {"comment", nullptr}, {"link", nullptr}};
  if (!item) return json_response(200, out);
  const auto& c = item->comment;
  out["comment"] = {{"comment_id", c.comment_id},
                    {"text", c.text},
                    {"author_id", c.author_id},
                    {"written_at", format_timestamp(c.written_at)},
                    {"change_id", item->change_id},
                    {"project_id", item->project_id},
                    {"file_path", item->file_path},
                    {"line", item->line},
                    {"patchset", c.patchset_number},
                    {"code_context", c.code_context ? json(*c.code_context) : json(nullptr)}};
  if (!config_.deep_link_template.empty()) {
    std::string link = config_.deep_link_template;
    link = replace_all(link, "{change_id}", httplib::detail::encode_query_param(item->change_id));
    link = replace_all(link, "{patchset}", std::to_string(c.patchset_number));
    link = replace_all(link, "{file}", httplib::detail::encode_query_param(item->file_path));
    link = replace_all(link, "{line}", std::to_string(item->line));
    link = replace_all(link, "{comment_id}", httplib::detail::encode_query_param(c.comment_id));
    out["link"] = link;
  }
  return json_response(200, out);
}

HttpResponse Service::labeling_submit(const Session& session, const HttpRequest& request) {
  const json body = json::parse(request.body);
  UsefulnessLabel label;
  label.comment_id = body.at("comment_id").get<std::string>();
  label.rater_id = session.user;
  label.is_useful = body.at("is_useful").get<bool>();
  const auto category = parse_category(body.at("category").get<std::string>());
  if (!category) throw BadRequest{"unknown category"};
  label.category = *category;
  label.labeled_at = now();

  const auto key = std::make_pair(label.comment_id, label.rater_id);
  {
    std::lock_guard lock(submit_mutex_);
    if (!submitting_.insert(key).second) {
      return error_response(409, "DuplicateSubmit", "this comment is already being labeled");
    }
  }
  struct Release {
    Service* self;
    std::pair<std::string, std::string> key;
    ~Release() {
      std::lock_guard lock(self->submit_mutex_);
      self->submitting_.erase(key);
    }
  } release{this, key};

  const bool replaced = store_.submit_label(label, label.labeled_at);
  const auto progress = store_.progress(session.user);
  return json_response(200, {{"replaced", replaced}, {"progress", {{"labeled", progress.labeled}, {"total", progress.total}}}});
}

HttpResponse Service::labeling_progress(const Session& session) {
  const auto p = store_.progress(session.user);
  return json_response(200, {{"labeled", p.labeled}, {"total", p.total}});
}

HttpResponse Service::rankings(const HttpRequest& request) {
  const Period period = period_param(request, now());
  const std::string entity = param(request, "entity").value_or("reviewer");
  if (entity != "reviewer" && entity != "project") throw BadRequest{"'entity' must be reviewer or project"};
  const auto key = metrics::parse_rank_key(param(request, "key").value_or("RI"));
  if (!key) throw BadRequest{"'key' must be one of RI, RE, NC, CUD, review_score"};
  const int offset = int_param(request, "offset", 0, 0, 1'000'000'000);
  const int limit = int_param(request, "limit", kDefaultRankingLimit, 1, 1000);

  const auto snapshot = store_.snapshot();
  const auto rows = entity == "reviewer" ? metrics::reviewer_metrics(snapshot.dump.changes, snapshot.verdicts, period)
                                         : metrics::project_metrics(snapshot.dump.changes, snapshot.verdicts, period);
  const auto ranking = metrics::rank(rows, *key);
  json out = {{"entity", entity},
              {"key", metrics::to_string(*key)},
              {"period", period_json(period)},
              {"total", ranking.entries.size()},
              {"offset", offset},
              {"limit", limit},
              {"rows", json::array()}};
  for (std::size_t i = static_cast<std::size_t>(offset); i < ranking.entries.size() && i < static_cast<std::size_t>(offset) + static_cast<std::size_t>(limit); ++i) {
    const auto& e = ranking.entries[i];
    const auto& m = *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.entity_id == e.entity_id; });
    json row = metrics_json(m);
    row["entity_id"] = e.entity_id;
    row["rank"] = e.rank;
    row["value"] = e.value;
    out["rows"].push_back(std::move(row));
  }
  return json_response(200, out);
}

HttpResponse Service::entity(const HttpRequest& request, const std::string& kind, const std::string& id) {
  if (kind != "reviewer" && kind != "project") throw BadRequest{"kind must be reviewer or project"};
  const int months = int_param(request, "months", 6, 1, 120);
  const bool known = kind == "reviewer" ? store_.has_developer(id) : store_.has_project(id);
  if (!known) return error_response(404, "NotFound", "no such " + kind);
  const auto snapshot = store_.snapshot();
  const Timestamp current = month_start(now());
  json buckets = json::array();
  for (int k = months - 1; k >= 0; --k) {
    const Period p{add_months(current, -k), add_months(current, -k + 1)};
    const auto counts = kind == "reviewer" ? metrics::aggregate(snapshot.dump.changes, snapshot.verdicts, id, p)
                                           : metrics::aggregate_project(snapshot.dump.changes, snapshot.verdicts, id, p);
    const auto m = metrics::PeriodMetrics::from_counts(id, p, counts);
    json b = {{"month", format_month(p.from)}, {"from", format_timestamp(p.from)}, {"to", format_timestamp(p.to)},
              {"NR", m.nr}, {"NC", m.nc}, {"UC", m.uc}, {"CUD", m.cud}, {"ID", m.id}, {"RE", m.re}, {"RI", m.ri}};
    buckets.push_back(std::move(b));
  }
  return json_response(200, {{"kind", kind}, {"id", id}, {"months", months}, {"buckets", buckets}});
}

HttpResponse Service::set_interval(const HttpRequest& request) {
  const json body = json::parse(request.body);
  const json& v = body.at("seconds");
  if (!v.is_number_integer()) throw BadRequest{"'seconds' must be an integer"};
  const long long seconds = v.get<long long>();
  if (seconds < miner::kMinPollIntervalSeconds || seconds > 7 * 24 * 3600) {
    throw BadRequest{"'seconds' must be between 60 and 604800"};
  }
  store_.set_mining_interval(static_cast<int>(seconds));
  return json_response(200, {{"seconds", seconds}});
}

void mount(httplib::Server& server, Service& service, const std::string& static_dir) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    if (req.has_header("Cookie")) r.headers["Cookie"] = req.get_header_value("Cookie");
    r.body = req.body;
    const HttpResponse out = service.handle(r);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) {
      if (k != "Content-Type") res.set_header(k, v);
    }
    res.set_content(out.body, "application/json");
  };
  const std::string pattern = R"(/api(/.*)?)";
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Put(pattern, handler);
  server.Delete(pattern, handler);
  if (!static_dir.empty()) server.set_mount_point("/", static_dir);
}

}  // namespace cra::api
