#include "cra/store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "cra/error.hpp"
#include "cra/pipeline.hpp"
#include "cra/rng.hpp"

namespace cra::store {

namespace {

constexpr const char* kSchemaV1 = R"sql(
CREATE TABLE developers (
  developer_id TEXT PRIMARY KEY,
  display_name TEXT NOT NULL
);
CREATE TABLE projects (
  project_id TEXT PRIMARY KEY,
  name TEXT NOT NULL
);
CREATE TABLE changes (
  change_id TEXT PRIMARY KEY,
  project_id TEXT NOT NULL REFERENCES projects(project_id),
  author_id TEXT NOT NULL REFERENCES developers(developer_id),
  created_at TEXT NOT NULL,
  body TEXT NOT NULL
);
CREATE TABLE comments (
  comment_id TEXT PRIMARY KEY,
  change_id TEXT NOT NULL REFERENCES changes(change_id),
  thread_id TEXT NOT NULL,
  author_id TEXT NOT NULL REFERENCES developers(developer_id),
  written_at TEXT NOT NULL,
  text TEXT NOT NULL,
  patchset_number INTEGER NOT NULL,
  code_context TEXT,
  file_path TEXT NOT NULL,
  line INTEGER NOT NULL
);
CREATE INDEX comments_by_change ON comments(change_id);
CREATE TABLE predictions (
  comment_id TEXT NOT NULL REFERENCES comments(comment_id),
  model_version TEXT NOT NULL,
  label INTEGER NOT NULL,
  probability REAL NOT NULL,
  predicted_at TEXT NOT NULL,
  PRIMARY KEY (comment_id, model_version)
);
CREATE TABLE labels (
  comment_id TEXT NOT NULL REFERENCES comments(comment_id),
  rater_id TEXT NOT NULL REFERENCES developers(developer_id),
  is_useful INTEGER NOT NULL,
  category TEXT NOT NULL,
  labeled_at TEXT NOT NULL,
  PRIMARY KEY (comment_id, rater_id)
);
CREATE TABLE label_audit (
  audit_id INTEGER PRIMARY KEY AUTOINCREMENT,
  comment_id TEXT NOT NULL REFERENCES comments(comment_id),
  rater_id TEXT NOT NULL REFERENCES developers(developer_id),
  is_useful INTEGER NOT NULL,
  category TEXT NOT NULL,
  labeled_at TEXT NOT NULL,
  replaced_at TEXT NOT NULL
);
CREATE TABLE models (
  model_version TEXT PRIMARY KEY,
  algorithm TEXT NOT NULL,
  created_at TEXT NOT NULL,
  artifact BLOB NOT NULL
);
CREATE TABLE miner_state (
  endpoint TEXT PRIMARY KEY,
  high_water_mark TEXT NOT NULL
);
CREATE TABLE settings (
  key TEXT PRIMARY KEY,
  value TEXT NOT NULL
);
)sql";

[[noreturn]] void fail(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::StorageFailure, what + ": " + (db ? sqlite3_errmsg(db) : "cannot open"));
}

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail(db, "prepare");
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view v) {
    check(sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind(int i, const std::string& v) { return bind(i, std::string_view(v)); }
  Statement& bind(int i, const char* v) { return bind(i, std::string_view(v)); }
  Statement& bind(int i, long long v) {
    check(sqlite3_bind_int64(stmt_, i, v));
    return *this;
  }
  Statement& bind(int i, int v) { return bind(i, static_cast<long long>(v)); }
  Statement& bind(int i, bool v) { return bind(i, static_cast<long long>(v)); }
  Statement& bind(int i, double v) {
    check(sqlite3_bind_double(stmt_, i, v));
    return *this;
  }
  Statement& bind(int i, Timestamp t) { return bind(i, format_timestamp(t)); }
  Statement& bind(int i, const std::optional<std::string>& v) {
    if (v) return bind(i, *v);
    check(sqlite3_bind_null(stmt_, i));
    return *this;
  }
  Statement& bind_blob(int i, std::string_view v) {
    check(sqlite3_bind_blob(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    fail(db_, "step");
  }
  void run() {
    while (step()) {
    }
  }
  void reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::string blob(int col) const {
    const auto* p = static_cast<const char*>(sqlite3_column_blob(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
  long long integer(int col) const { return sqlite3_column_int64(stmt_, col); }
  double real(int col) const { return sqlite3_column_double(stmt_, col); }
  Timestamp time(int col) const { return parse_timestamp_or_throw(text(col)); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) fail(db_, "bind");
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    const std::string msg = err ? err : "exec";
    sqlite3_free(err);
    throw Error(ErrorCode::StorageFailure, msg);
  }
}

/// Commits on commit(), rolls back otherwise.
class Transaction {
 public:
  explicit Transaction(sqlite3* db, bool write = false) : db_(db) { exec(db, write ? "BEGIN IMMEDIATE" : "BEGIN"); }
  ~Transaction() {
    if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec(db_, "COMMIT");
    done_ = true;
  }

 private:
  sqlite3* db_;
  bool done_ = false;
};

UsefulnessLabel read_label(const Statement& s, int first) {
  UsefulnessLabel l;
  l.comment_id = s.text(first);
  l.rater_id = s.text(first + 1);
  l.is_useful = s.integer(first + 2) != 0;
  const auto category = parse_category(s.text(first + 3));
  if (!category) throw Error(ErrorCode::StorageFailure, "unknown category in store: " + s.text(first + 3));
  l.category = *category;
  l.labeled_at = s.time(first + 4);
  return l;
}

}  // namespace

struct Store::Impl {
  sqlite3* db = nullptr;
  mutable std::mutex mutex;

  ~Impl() { sqlite3_close(db); }

  ReviewDump load_dump_locked() const {
    ReviewDump dump;
    Statement devs(db, "SELECT developer_id, display_name FROM developers ORDER BY developer_id");
    while (devs.step()) dump.developers.push_back({devs.text(0), devs.text(1)});
    Statement projects(db, "SELECT project_id, name FROM projects ORDER BY project_id");
    while (projects.step()) dump.projects.push_back({projects.text(0), projects.text(1)});
    Statement changes(db, "SELECT body FROM changes ORDER BY change_id");
    while (changes.step()) dump.changes.push_back(parse_change(changes.text(0)));
    return dump;
  }

  std::vector<UsefulnessLabel> labels_locked() const {
    std::vector<UsefulnessLabel> out;
    Statement s(db,
                "SELECT comment_id, rater_id, is_useful, category, labeled_at FROM labels "
                "ORDER BY comment_id, rater_id");
    while (s.step()) out.push_back(read_label(s, 0));
    return out;
  }
};

Store::Store(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.string().c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
    // The path itself is left out so it cannot leak through error bodies.
    throw Error(ErrorCode::StorageFailure, "cannot open store");
  }
  sqlite3* db = impl_->db;
  sqlite3_busy_timeout(db, 5000);
  exec(db, "PRAGMA foreign_keys = ON");
  exec(db, "PRAGMA journal_mode = WAL");

  Statement version(db, "PRAGMA user_version");
  version.step();
  const long long current = version.integer(0);
  version.reset();
  if (current > kSchemaVersion) {
    throw Error(ErrorCode::StorageFailure, "store schema version " + std::to_string(current) + " is newer than " +
                                               std::to_string(kSchemaVersion));
  }
  if (current < 1) {
    Transaction tx(db, true);
    exec(db, kSchemaV1);
    exec(db, "PRAGMA user_version = 1");
    tx.commit();
  }
}

Store::~Store() = default;
Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;

UpsertCounts Store::upsert_dump(const ReviewDump& dump) {
  validate_dump(dump);
  std::lock_guard lock(impl_->mutex);
  sqlite3* db = impl_->db;
  Transaction tx(db, true);
  UpsertCounts counts;

  Statement dev(db,
                "INSERT INTO developers(developer_id, display_name) VALUES (?1, ?2) "
                "ON CONFLICT(developer_id) DO UPDATE SET display_name = excluded.display_name");
  for (const auto& d : dump.developers) {
    dev.bind(1, d.developer_id).bind(2, d.display_name).run();
    dev.reset();
  }
  Statement project(db,
                    "INSERT INTO projects(project_id, name) VALUES (?1, ?2) "
                    "ON CONFLICT(project_id) DO UPDATE SET name = excluded.name");
  for (const auto& p : dump.projects) {
    project.bind(1, p.project_id).bind(2, p.name).run();
    project.reset();
  }

  Statement existing(db, "SELECT body FROM changes WHERE change_id = ?1");
  Statement put_change(db,
                       "INSERT INTO changes(change_id, project_id, author_id, created_at, body) "
                       "VALUES (?1, ?2, ?3, ?4, ?5) ON CONFLICT(change_id) DO UPDATE SET "
                       "project_id = excluded.project_id, author_id = excluded.author_id, "
                       "created_at = excluded.created_at, body = excluded.body");
  Statement put_comment(db,
                        "INSERT INTO comments(comment_id, change_id, thread_id, author_id, written_at, text, "
                        "patchset_number, code_context, file_path, line) "
                        "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10) ON CONFLICT(comment_id) DO UPDATE SET "
                        "change_id = excluded.change_id, thread_id = excluded.thread_id, "
                        "author_id = excluded.author_id, written_at = excluded.written_at, text = excluded.text, "
                        "patchset_number = excluded.patchset_number, code_context = excluded.code_context, "
                        "file_path = excluded.file_path, line = excluded.line");
  for (const auto& change : dump.changes) {
    const std::string body = serialize_change(change);
    existing.bind(1, change.change_id);
    const bool found = existing.step();
    const bool same = found && existing.text(0) == body;
    existing.reset();
    if (same) continue;
    ++(found ? counts.updated : counts.inserted);

    put_change.bind(1, change.change_id)
        .bind(2, change.project_id)
        .bind(3, change.author_id)
        .bind(4, change.created_at)
        .bind(5, body)
        .run();
    put_change.reset();
    for (const auto& thread : change.threads) {
      for (const auto& c : thread.comments) {
        put_comment.bind(1, c.comment_id)
            .bind(2, change.change_id)
            .bind(3, thread.thread_id)
            .bind(4, c.author_id)
            .bind(5, c.written_at)
            .bind(6, c.text)
            .bind(7, c.patchset_number)
            .bind(8, c.code_context)
            .bind(9, thread.file_path)
            .bind(10, thread.line)
            .run();
        put_comment.reset();
      }
    }
  }
  tx.commit();
  return counts;
}

ReviewDump Store::load_dump() const {
  std::lock_guard lock(impl_->mutex);
  Transaction tx(impl_->db);
  ReviewDump dump = impl_->load_dump_locked();
  tx.commit();
  return dump;
}

Snapshot Store::snapshot() const {
  std::lock_guard lock(impl_->mutex);
  sqlite3* db = impl_->db;
  Transaction tx(db);
  Snapshot out;
  out.dump = impl_->load_dump_locked();

  // Latest prediction per comment; a later model overrides an earlier one.
  metrics::VerdictMap predicted;
  Statement p(db, "SELECT comment_id, label FROM predictions ORDER BY comment_id, predicted_at, model_version");
  while (p.step()) predicted[p.text(0)] = p.integer(1) != 0;
  metrics::VerdictMap labeled;
  const auto labels = impl_->labels_locked();
  for (const auto& l : pipeline::latest_labels(labels)) labeled[l.comment_id] = l.is_useful;
  tx.commit();
  out.verdicts = metrics::merge_verdicts(predicted, labeled);
  return out;
}

bool Store::has_developer(std::string_view developer_id) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT 1 FROM developers WHERE developer_id = ?1");
  return s.bind(1, developer_id).step();
}

bool Store::has_project(std::string_view project_id) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT 1 FROM projects WHERE project_id = ?1");
  return s.bind(1, project_id).step();
}

std::vector<std::string> Store::eligible_labelers(Timestamp now, int months, int min_comments) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT ch.author_id FROM comments c JOIN changes ch ON ch.change_id = c.change_id "
              "WHERE c.author_id <> ch.author_id AND c.written_at >= ?1 AND c.written_at <= ?2 "
              "GROUP BY ch.author_id HAVING COUNT(*) >= ?3 ORDER BY ch.author_id");
  s.bind(1, add_months(now, -months)).bind(2, now).bind(3, min_comments);
  std::vector<std::string> out;
  while (s.step()) out.push_back(s.text(0));
  return out;
}

std::optional<LabelingItem> Store::next_unlabeled(std::string_view rater_id, std::uint64_t session_seed) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT c.comment_id, c.thread_id, c.author_id, c.written_at, c.text, c.patchset_number, "
              "c.code_context, c.change_id, ch.project_id, c.file_path, c.line "
              "FROM comments c JOIN changes ch ON ch.change_id = c.change_id "
              "WHERE ch.author_id = ?1 AND c.author_id <> ?1 AND NOT EXISTS "
              "(SELECT 1 FROM labels l WHERE l.comment_id = c.comment_id AND l.rater_id = ?1)");
  s.bind(1, rater_id);
  std::optional<LabelingItem> best;
  std::uint64_t best_key = 0;
  const std::string salt = std::to_string(session_seed) + ":";
  while (s.step()) {
    const std::string id = s.text(0);
    const std::uint64_t key = fnv1a64(id, fnv1a64(salt));
    if (best && (key > best_key || (key == best_key && id > best->comment.comment_id))) continue;
    LabelingItem item;
    item.comment.comment_id = id;
    item.comment.thread_id = s.text(1);
    item.comment.author_id = s.text(2);
    item.comment.written_at = s.time(3);
    item.comment.text = s.text(4);
    item.comment.patchset_number = static_cast<int>(s.integer(5));
    if (!s.is_null(6)) item.comment.code_context = s.text(6);
    item.change_id = s.text(7);
    item.project_id = s.text(8);
    item.file_path = s.text(9);
    item.line = static_cast<int>(s.integer(10));
    best = std::move(item);
    best_key = key;
  }
  return best;
}

bool Store::submit_label(const UsefulnessLabel& label, Timestamp now) {
  std::lock_guard lock(impl_->mutex);
  sqlite3* db = impl_->db;
  Transaction tx(db, true);
  Statement owner(db,
                  "SELECT ch.author_id FROM comments c JOIN changes ch ON ch.change_id = c.change_id "
                  "WHERE c.comment_id = ?1");
  if (!owner.bind(1, label.comment_id).step()) {
    throw Error(ErrorCode::UnknownComment, "no comment '" + label.comment_id + "'");
  }
  if (owner.text(0) != label.rater_id) {
    throw Error(ErrorCode::NotChangeAuthor,
                "'" + label.rater_id + "' did not author the change of comment '" + label.comment_id + "'");
  }

  Statement previous(db,
                     "SELECT comment_id, rater_id, is_useful, category, labeled_at FROM labels "
                     "WHERE comment_id = ?1 AND rater_id = ?2");
  const bool replaced = previous.bind(1, label.comment_id).bind(2, label.rater_id).step();
  if (replaced) {
    const UsefulnessLabel old = read_label(previous, 0);
    Statement audit(db,
                    "INSERT INTO label_audit(comment_id, rater_id, is_useful, category, labeled_at, replaced_at) "
                    "VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
    audit.bind(1, old.comment_id)
        .bind(2, old.rater_id)
        .bind(3, old.is_useful)
        .bind(4, to_string(old.category))
        .bind(5, old.labeled_at)
        .bind(6, now)
        .run();
  }
  Statement put(db,
                "INSERT INTO labels(comment_id, rater_id, is_useful, category, labeled_at) "
                "VALUES (?1, ?2, ?3, ?4, ?5) ON CONFLICT(comment_id, rater_id) DO UPDATE SET "
                "is_useful = excluded.is_useful, category = excluded.category, labeled_at = excluded.labeled_at");
  put.bind(1, label.comment_id)
      .bind(2, label.rater_id)
      .bind(3, label.is_useful)
      .bind(4, to_string(label.category))
      .bind(5, label.labeled_at)
      .run();
  tx.commit();
  return replaced;
}

LabelProgress Store::progress(std::string_view rater_id) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT COUNT(*), COUNT(l.comment_id) FROM comments c "
              "JOIN changes ch ON ch.change_id = c.change_id "
              "LEFT JOIN labels l ON l.comment_id = c.comment_id AND l.rater_id = ?1 "
              "WHERE ch.author_id = ?1 AND c.author_id <> ?1");
  s.bind(1, rater_id).step();
  return {static_cast<int>(s.integer(1)), static_cast<int>(s.integer(0))};
}

std::size_t Store::label_count() const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT COUNT(*) FROM labels");
  s.step();
  return static_cast<std::size_t>(s.integer(0));
}

std::vector<UsefulnessLabel> Store::labels() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->labels_locked();
}

std::vector<LabelAuditEntry> Store::label_audit(std::string_view comment_id) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT comment_id, rater_id, is_useful, category, labeled_at, replaced_at FROM label_audit "
              "WHERE comment_id = ?1 ORDER BY audit_id");
  s.bind(1, comment_id);
  std::vector<LabelAuditEntry> out;
  while (s.step()) out.push_back({read_label(s, 0), s.time(5)});
  return out;
}

std::string Store::export_labels_csv() const { return pipeline::write_labels_csv(labels()); }

void Store::put_predictions(const std::vector<StoredPrediction>& predictions) {
  std::lock_guard lock(impl_->mutex);
  sqlite3* db = impl_->db;
  Transaction tx(db, true);
  Statement put(db,
                "INSERT INTO predictions(comment_id, model_version, label, probability, predicted_at) "
                "VALUES (?1, ?2, ?3, ?4, ?5) ON CONFLICT(comment_id, model_version) DO UPDATE SET "
                "label = excluded.label, probability = excluded.probability, predicted_at = excluded.predicted_at");
  for (const auto& p : predictions) {
    put.bind(1, p.comment_id).bind(2, p.model_version).bind(3, p.useful).bind(4, p.probability).bind(5, p.predicted_at);
    put.run();
    put.reset();
  }
  tx.commit();
}

std::vector<StoredPrediction> Store::predictions() const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT comment_id, model_version, label, probability, predicted_at FROM predictions "
              "ORDER BY comment_id, model_version");
  std::vector<StoredPrediction> out;
  while (s.step()) out.push_back({s.text(0), s.text(1), s.integer(2) != 0, s.real(3), s.time(4)});
  return out;
}

std::vector<std::string> Store::unpredicted_comments(std::string_view model_version) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT c.comment_id FROM comments c JOIN changes ch ON ch.change_id = c.change_id "
              "WHERE c.author_id <> ch.author_id AND NOT EXISTS (SELECT 1 FROM predictions p "
              "WHERE p.comment_id = c.comment_id AND p.model_version = ?1) ORDER BY c.comment_id");
  s.bind(1, model_version);
  std::vector<std::string> out;
  while (s.step()) out.push_back(s.text(0));
  return out;
}

void Store::put_model(const StoredModel& model) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "INSERT INTO models(model_version, algorithm, created_at, artifact) VALUES (?1, ?2, ?3, ?4) "
              "ON CONFLICT(model_version) DO NOTHING");
  s.bind(1, model.model_version).bind(2, model.algorithm).bind(3, model.created_at).bind_blob(4, model.artifact);
  s.run();
}

namespace {

std::optional<StoredModel> read_model(Statement& s) {
  if (!s.step()) return std::nullopt;
  return StoredModel{s.text(0), s.text(1), s.time(2), s.blob(3)};
}

}  // namespace

std::optional<StoredModel> Store::model(std::string_view model_version) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT model_version, algorithm, created_at, artifact FROM models WHERE model_version = ?1");
  s.bind(1, model_version);
  return read_model(s);
}

std::optional<StoredModel> Store::latest_model() const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "SELECT model_version, algorithm, created_at, artifact FROM models "
              "ORDER BY created_at DESC, model_version DESC LIMIT 1");
  return read_model(s);
}

std::optional<Timestamp> Store::high_water_mark(std::string_view endpoint) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT high_water_mark FROM miner_state WHERE endpoint = ?1");
  if (!s.bind(1, endpoint).step()) return std::nullopt;
  return s.time(0);
}

void Store::set_high_water_mark(std::string_view endpoint, Timestamp mark) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "INSERT INTO miner_state(endpoint, high_water_mark) VALUES (?1, ?2) "
              "ON CONFLICT(endpoint) DO UPDATE SET high_water_mark = excluded.high_water_mark");
  s.bind(1, endpoint).bind(2, mark).run();
}

std::optional<int> Store::mining_interval() const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT value FROM settings WHERE key = 'mining_interval_seconds'");
  if (!s.step()) return std::nullopt;
  return std::stoi(s.text(0));
}

void Store::set_mining_interval(int seconds) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db,
              "INSERT INTO settings(key, value) VALUES ('mining_interval_seconds', ?1) "
              "ON CONFLICT(key) DO UPDATE SET value = excluded.value");
  s.bind(1, std::to_string(seconds)).run();
}

}  // namespace cra::store
