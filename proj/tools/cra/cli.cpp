#include "cra/cli.hpp"

#include <httplib.h>
#include <openssl/rand.h>
#include <pthread.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <condition_variable>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cra/error.hpp"
#include "cra/ingest.hpp"
#include "cra/metrics.hpp"
#include "cra/pipeline.hpp"
#include "cra/stats.hpp"
#include "cra/store.hpp"
#include "cra/textfeat.hpp"
#include "json.hpp"

extern char** environ;

namespace cra::cli {

using nlohmann::json;

namespace {

/// Bad flag values found after parsing; exit 1 like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Logger = std::shared_ptr<spdlog::logger>;

Timestamp now_utc() { return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.filename().string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void check_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!object.is_object()) throw Error(ErrorCode::InvalidArgument, std::string(where) + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::InvalidArgument, "unknown config key " + std::string(where) + "." + key);
    }
  }
}

template <typename T>
void read_key(const json& object, const char* key, T& target) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("config key ") + key + " has the wrong type");
  }
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  try {
    if (!text.empty() && text[0] != '-') {
      const auto v = std::stoull(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "seed must be a non-negative integer");
}

Period parse_period(const std::string& from, const std::string& to) {
  const auto f = parse_timestamp(from);
  if (!f) throw UsageError("--from: not a date: " + from);
  const auto t = parse_timestamp(to);
  if (!t) throw UsageError("--to: not a date: " + to);
  if (!(*f < *t)) throw UsageError("--to must be after --from");
  return {*f, *t};
}

std::vector<UsefulnessLabel> read_labels(const std::string& labels_path, const store::Store& store) {
  return labels_path.empty() ? store.labels() : pipeline::parse_labels_csv(read_text(labels_path));
}

textfeat::Lexicons lexicons_for(const CliConfig& config) {
  return textfeat::load_lexicons(config.data_dir.empty() ? textfeat::default_data_dir() : config.data_dir);
}

struct MineSummary {
  std::size_t changes = 0;
  store::UpsertCounts counts;
};

/// One incremental run from the stored watermark (or `since`), committed
/// before the watermark moves so a crash re-fetches rather than skips.
MineSummary mine_once(store::Store& store, const miner::MinerConfig& config, std::optional<Timestamp> since) {
  const Timestamp from = since ? *since : store.high_water_mark(config.base_url).value_or(epoch());
  const auto result = miner::mine_incremental(config, from);
  MineSummary s{result.dump.changes.size(), store.upsert_dump(result.dump)};
  if (result.high_water_mark) store.set_high_water_mark(config.base_url, *result.high_water_mark);
  return s;
}

std::string fixed(double v, int precision) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

std::string pad(std::string text, std::size_t width, bool left = false) {
  if (text.size() >= width) return text;
  return left ? text + std::string(width - text.size(), ' ') : std::string(width - text.size(), ' ') + text;
}

// ---- subcommands ----

int cmd_import(const CliConfig& config, const std::string& dump_path, std::ostream& out) {
  const auto dump = parse_review_dump(read_text(dump_path));
  store::Store store(config.store);
  const auto c = store.upsert_dump(dump);
  out << "imported " << dump.changes.size() << " changes: " << c.inserted << " inserted, " << c.updated
      << " updated\n";
  return kExitOk;
}

int cmd_mine(const CliConfig& config, const std::string& since_text, std::ostream& out) {
  if (config.miner.base_url.empty()) throw UsageError("--url: no miner endpoint (set --url, CRA_MINER_URL or miner.base_url)");
  std::optional<Timestamp> since;
  if (!since_text.empty()) {
    since = parse_timestamp(since_text);
    if (!since) throw UsageError("--since: not a timestamp: " + since_text);
  }
  store::Store store(config.store);
  const auto s = mine_once(store, config.miner, since);
  out << "mined " << s.changes << " changes: " << s.counts.inserted << " inserted, " << s.counts.updated << " updated\n";
  return kExitOk;
}

pipeline::TrainOptions train_options(const CliConfig& config, learn::Algorithm algorithm) {
  pipeline::TrainOptions o;
  o.algorithm = learn::AlgorithmConfig::defaults(algorithm);
  o.seed = config.seed;
  o.selection.rfe.seed = config.seed;
  return o;
}

learn::Algorithm algorithm_flag(const std::string& text, const char* flag) {
  const auto a = learn::parse_algorithm(text);
  if (!a) throw UsageError(std::string(flag) + ": unknown algorithm " + text + " (expected dt, rf or lr)");
  return *a;
}

int cmd_train(const CliConfig& config, const std::string& labels_path, const std::string& algo,
              const std::string& out_path, std::ostream& out, const Logger& log) {
  const auto algorithm = algorithm_flag(algo, "--algo");
  store::Store store(config.store);
  const auto labels = read_labels(labels_path, store);
  const auto dump = store.load_dump();
  const auto data = pipeline::build_training_set(dump, labels, lexicons_for(config));
  log->info("training {} on {} labeled comments", learn::to_string(algorithm), data.labels.size());
  const auto outcome = pipeline::fit_model(data, train_options(config, algorithm));
  pipeline::save_model(outcome.model, out_path);
  out << "trained " << outcome.model.model_version() << " on " << data.labels.size() << " labeled comments\n";
  out << "features: ";
  for (std::size_t i = 0; i < outcome.model.selected_feature_ids.size(); ++i) {
    out << (i ? ", " : "") << outcome.model.selected_feature_ids[i];
  }
  out << "\n";
  return kExitOk;
}

struct Measure {
  const char* name;
  double (*of)(const learn::FoldRow&);
};

const Measure kMeasures[] = {
    {"A", [](const learn::FoldRow& r) { return r.accuracy; }},
    {"useful P", [](const learn::FoldRow& r) { return r.useful.precision; }},
    {"useful R", [](const learn::FoldRow& r) { return r.useful.recall; }},
    {"useful F1", [](const learn::FoldRow& r) { return r.useful.f1; }},
    {"not useful P", [](const learn::FoldRow& r) { return r.not_useful.precision; }},
    {"not useful R", [](const learn::FoldRow& r) { return r.not_useful.recall; }},
    {"not useful F1", [](const learn::FoldRow& r) { return r.not_useful.f1; }},
};

std::vector<double> measure_values(const learn::EvaluationReport& report, const Measure& m) {
  std::vector<double> v;
  v.reserve(report.rows.size());
  for (const auto& r : report.rows) v.push_back(m.of(r));
  return v;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

struct EvaluateFlags {
  std::string labels;
  int repeats = 20;
  int folds = 10;
  bool explain = false;
  std::string compare;
  std::string algo = "rf";
  bool json = false;
};

int cmd_evaluate(const CliConfig& config, const EvaluateFlags& flags, std::ostream& out, const Logger& log) {
  std::vector<learn::Algorithm> algorithms;
  if (flags.compare.empty()) {
    algorithms.push_back(algorithm_flag(flags.algo, "--algo"));
  } else {
    std::stringstream list(flags.compare);
    for (std::string item; std::getline(list, item, ',');) algorithms.push_back(algorithm_flag(item, "--compare"));
    if (algorithms.size() != 2 || algorithms[0] == algorithms[1]) {
      throw UsageError("--compare: expected two different algorithms, e.g. dt,rf");
    }
  }

  store::Store store(config.store);
  const auto labels = read_labels(flags.labels, store);
  const auto data = pipeline::build_training_set(store.load_dump(), labels, lexicons_for(config));
  // Discretization and selection are fit once, so every algorithm sees the
  // same design matrix and the same folds.
  const auto prepared = pipeline::prepare(data, train_options(config, algorithms.front()));
  std::size_t useful = 0;
  for (int y : prepared.y) useful += y == 1 ? 1 : 0;

  std::vector<learn::EvaluationReport> reports;
  for (const auto a : algorithms) {
    log->info("cross-validating {} ({} x {}-fold)", learn::to_string(a), flags.repeats, flags.folds);
    learn::CvConfig cv;
    cv.repeats = flags.repeats;
    cv.folds = flags.folds;
    cv.seed = config.seed;
    reports.push_back(learn::cross_validate(prepared.x, prepared.y, learn::AlgorithmConfig::defaults(a), cv));
  }

  json comparison = json::array();
  if (reports.size() == 2) {
    for (const auto& m : kMeasures) {
      const auto a = measure_values(reports[0], m);
      const auto b = measure_values(reports[1], m);
      const auto t = learn::compare(a, b);
      comparison.push_back({{"measure", m.name},
                            {"a", mean(a)},
                            {"b", mean(b)},
                            {"delta", mean(a) - mean(b)},
                            {"p_value", t.p_value},
                            {"test", std::string(t.test_used)}});
    }
  }

  if (flags.json) {
    json doc{{"labeled", prepared.y.size()},
             {"useful", useful},
             {"seed", config.seed},
             {"selected_features", prepared.selection.final_selected},
             {"reports", json::array()}};
    for (const auto& r : reports) doc["reports"].push_back(r.to_json());
    if (!comparison.empty()) doc["comparison"] = comparison;
    if (flags.explain) doc["selection"] = prepared.selection.to_json();
    out << doc.dump(2) << "\n";
    return kExitOk;
  }

  out << "Evaluation: " << flags.repeats << " x " << flags.folds << "-fold stratified CV, seed " << config.seed
      << ", " << prepared.y.size() << " labeled comments (" << fixed(100.0 * useful / prepared.y.size(), 2)
      << "% useful)\n";
  out << "Selected features:";
  for (const auto& f : prepared.selection.final_selected) out << " " << f;
  out << "\n\n";
  out << pad("Algorithm", 22, true) << pad("A", 8) << pad("Useful P", 10) << pad("R", 8) << pad("F1", 8)
      << pad("Not useful P", 14) << pad("R", 8) << pad("F1", 8) << pad("Folds", 7) << "\n";
  for (const auto& r : reports) {
    const auto u = r.mean_useful();
    const auto n = r.mean_not_useful();
    out << pad(std::string(learn::to_string(r.algorithm)), 22, true) << pad(fixed(100 * r.mean_accuracy(), 2), 8)
        << pad(fixed(100 * u.precision, 2), 10) << pad(fixed(100 * u.recall, 2), 8) << pad(fixed(100 * u.f1, 2), 8)
        << pad(fixed(100 * n.precision, 2), 14) << pad(fixed(100 * n.recall, 2), 8) << pad(fixed(100 * n.f1, 2), 8)
        << pad(std::to_string(r.rows.size()), 7) << "\n";
  }
  if (!comparison.empty()) {
    const std::string a(learn::to_string(algorithms[0]));
    const std::string b(learn::to_string(algorithms[1]));
    out << "\n" << a << " vs " << b << " (paired over " << reports[0].rows.size() << " folds)\n";
    out << pad("Measure", 16, true) << pad(a, 22) << pad(b, 22) << pad("Delta", 9) << pad("p-value", 11) << "\n";
    for (const auto& c : comparison) {
      out << pad(c["measure"].get<std::string>(), 16, true) << pad(fixed(100 * c["a"].get<double>(), 2), 22)
          << pad(fixed(100 * c["b"].get<double>(), 2), 22) << pad(fixed(100 * c["delta"].get<double>(), 2), 9)
          << pad(fixed(c["p_value"].get<double>(), 4), 11) << "\n";
    }
  }
  if (flags.explain) out << "\nFeature selection audit:\n" << prepared.selection.to_json().dump(2) << "\n";
  return kExitOk;
}

int cmd_predict(const CliConfig& config, const std::string& model_flag, bool all_unpredicted, std::ostream& out,
                const Logger& log) {
  const std::filesystem::path model_path = model_flag.empty() ? config.model : std::filesystem::path(model_flag);
  if (model_path.empty()) throw UsageError("--model: no model artifact (set --model, CRA_MODEL or model)");
  const std::string artifact = read_text(model_path);
  const auto model = pipeline::parse_model(artifact);
  const std::string version = model.model_version();

  store::Store store(config.store);
  const auto now = now_utc();
  store.put_model({version, std::string(learn::to_string(model.algorithm.algorithm)), now, artifact});
  const auto dump = store.load_dump();

  std::set<std::string> wanted;
  if (all_unpredicted) {
    for (auto& id : store.unpredicted_comments(version)) wanted.insert(std::move(id));
  }
  const auto lexicons = lexicons_for(config);
  std::vector<store::StoredPrediction> predictions;
  std::size_t useful = 0;
  for (const auto& change : dump.changes) {
    for (const auto& thread : change.threads) {
      for (const auto& comment : thread.comments) {
        if (comment.author_id == change.author_id) continue;
        if (all_unpredicted && !wanted.contains(comment.comment_id)) continue;
        const auto p = pipeline::predict_comment(model, comment, change, dump.changes, lexicons);
        useful += p.useful ? 1 : 0;
        predictions.push_back({comment.comment_id, version, p.useful, p.probability, now});
      }
    }
  }
  store.put_predictions(predictions);
  log->info("model {} scored {} comments", version, predictions.size());
  out << "predicted " << predictions.size() << " comments with " << version << " (" << useful << " useful)\n";
  return kExitOk;
}

struct RankFlags {
  std::string from;
  std::string to;
  std::string key = "RI";
  std::string entity = "reviewer";
  bool csv = false;
  bool json = false;
};

int cmd_rank(const CliConfig& config, const RankFlags& flags, std::ostream& out) {
  const Period period = parse_period(flags.from, flags.to);
  const auto key = metrics::parse_rank_key(flags.key);
  if (!key) throw UsageError("--key: expected one of RI, RE, NC, CUD, review_score");
  if (flags.entity != "reviewer" && flags.entity != "project") throw UsageError("--entity: expected reviewer or project");

  store::Store store(config.store);
  const auto snapshot = store.snapshot();
  const auto rows = flags.entity == "reviewer"
                        ? metrics::reviewer_metrics(snapshot.dump.changes, snapshot.verdicts, period)
                        : metrics::project_metrics(snapshot.dump.changes, snapshot.verdicts, period);
  const auto ranking = metrics::rank(rows, *key);
  const auto ordered = metrics::in_rank_order(rows, ranking);

  if (flags.csv) {
    out << metrics::to_csv(ordered, flags.entity == "reviewer" ? "developer_id" : "project_id");
    return kExitOk;
  }
  if (flags.json) {
    json doc = json::array();
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const auto& m = ordered[i];
      doc.push_back({{"rank", ranking.entries[i].rank}, {"entity_id", m.entity_id}, {"NR", m.nr}, {"NC", m.nc},
                     {"UC", m.uc}, {"CUD", m.cud}, {"ID", m.id}, {"RE", m.re}, {"RI", m.ri},
                     {"review_score", m.review_score}});
    }
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << pad("Rank", 5) << "  " << pad(flags.entity, 20, true) << pad("NR", 6) << pad("NC", 6) << pad("UC", 6)
      << pad("CUD", 8) << pad("ID", 8) << pad("RE", 8) << pad("RI", 8) << "\n";
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& m = ordered[i];
    out << pad(std::to_string(ranking.entries[i].rank), 5) << "  " << pad(m.entity_id, 20, true)
        << pad(std::to_string(m.nr), 6) << pad(std::to_string(m.nc), 6) << pad(std::to_string(m.uc), 6)
        << pad(fixed(m.cud, 3), 8) << pad(fixed(m.id, 3), 8) << pad(fixed(m.re, 3), 8) << pad(std::to_string(m.ri), 8)
        << "\n";
  }
  return kExitOk;
}

std::string random_secret() {
  unsigned char bytes[32];
  if (RAND_bytes(bytes, sizeof bytes) != 1) throw Error(ErrorCode::StorageFailure, "no entropy for the session key");
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char b : bytes) {
    s += digits[b >> 4];
    s += digits[b & 15];
  }
  return s;
}

int cmd_serve(const CliConfig& config, const std::map<std::string, std::string>& env, std::ostream& out,
              const Logger& log) {
  if (config.port < 0 || config.port > 65535) throw UsageError("--port: out of range");
  if (config.users.empty()) log->warn("no users configured; labeling and admin endpoints will refuse every login");

  // SIGINT and SIGTERM are taken by a waiter thread so the server can stop
  // cleanly; threads started below inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  store::Store store(config.store);
  api::ApiConfig api_config;
  const auto secret = env.find("CRA_SESSION_SECRET");
  api_config.session_secret = secret != env.end() && !secret->second.empty() ? secret->second : random_secret();
  api_config.users = config.users;
  api_config.deep_link_template = config.deep_link_template;
  api_config.session_ttl_seconds = config.session_ttl_seconds;
  api_config.redact = {config.store.string(), std::filesystem::absolute(config.store).string()};

  api::Service service(store, api_config, [&store, &config, log] {
    if (config.miner.base_url.empty()) {
      log->warn("mining requested but no miner endpoint is configured");
      return;
    }
    try {
      const auto s = mine_once(store, config.miner, std::nullopt);
      log->info("mined {} changes ({} inserted, {} updated)", s.changes, s.counts.inserted, s.counts.updated);
    } catch (const std::exception& e) {
      log->error("mining failed: {}", e.what());
    }
  });

  httplib::Server server;
  api::mount(server, service, config.static_dir.string());
  const int port = config.port == 0 ? server.bind_to_any_port(config.host) : config.port;
  if (config.port != 0 && !server.bind_to_port(config.host, port)) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    throw Error(ErrorCode::IoFailure, "cannot listen on " + config.host + ":" + std::to_string(port));
  }
  if (port < 0) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    throw Error(ErrorCode::IoFailure, "cannot listen on " + config.host);
  }

  std::mutex mutex;
  std::condition_variable wake;
  bool stopping = false;
  std::thread scheduler([&] {
    auto last = std::chrono::steady_clock::now();
    std::unique_lock lock(mutex);
    while (!wake.wait_for(lock, std::chrono::seconds(1), [&] { return stopping; })) {
      const int interval = store.mining_interval().value_or(config.miner.poll_interval_seconds);
      if (config.miner.base_url.empty() || std::chrono::steady_clock::now() - last < std::chrono::seconds(interval)) {
        continue;
      }
      last = std::chrono::steady_clock::now();
      if (!service.trigger_mining()) log->info("scheduled mining skipped: a run is in flight");
    }
  });
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    log->info("signal {} received, shutting down", sig);
    server.stop();
  });

  out << "listening on http://" << config.host << ":" << port << "\n" << std::flush;
  const bool ok = server.listen_after_bind();
  {
    std::lock_guard lock(mutex);
    stopping = true;
  }
  wake.notify_all();
  scheduler.join();
  // Unblock the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  service.wait_for_mining();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  if (!ok) throw Error(ErrorCode::IoFailure, "server stopped unexpectedly");
  return kExitOk;
}

}  // namespace

CliConfig load_config(const std::filesystem::path& file, CliConfig c) {
  json doc;
  try {
    doc = json::parse(read_text(file));
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::InvalidArgument, "config file is not valid JSON");
  }
  const auto base = file.parent_path();
  check_keys(doc, {"store", "model", "seed", "log_level", "data_dir", "miner", "serve"}, "config");
  std::string text;
  if (doc.contains("store")) c.store = resolve(base, doc["store"].get<std::string>());
  if (doc.contains("model")) c.model = resolve(base, doc["model"].get<std::string>());
  if (doc.contains("data_dir")) c.data_dir = resolve(base, doc["data_dir"].get<std::string>());
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw Error(ErrorCode::InvalidArgument, "config key seed must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  read_key(doc, "log_level", c.log_level);
  if (doc.contains("miner")) {
    const auto& m = doc["miner"];
    check_keys(m, {"base_url", "poll_interval_seconds", "page_size", "max_retries", "initial_backoff_ms",
                   "max_backoff_ms", "timeout_seconds"},
               "miner");
    read_key(m, "base_url", c.miner.base_url);
    read_key(m, "poll_interval_seconds", c.miner.poll_interval_seconds);
    read_key(m, "page_size", c.miner.page_size);
    read_key(m, "max_retries", c.miner.max_retries);
    read_key(m, "timeout_seconds", c.miner.timeout_seconds);
    long long ms = c.miner.initial_backoff.count();
    read_key(m, "initial_backoff_ms", ms);
    c.miner.initial_backoff = std::chrono::milliseconds(ms);
    ms = c.miner.max_backoff.count();
    read_key(m, "max_backoff_ms", ms);
    c.miner.max_backoff = std::chrono::milliseconds(ms);
    if (c.miner.poll_interval_seconds < miner::kMinPollIntervalSeconds) {
      throw Error(ErrorCode::InvalidArgument, "miner.poll_interval_seconds must be at least " +
                                                  std::to_string(miner::kMinPollIntervalSeconds));
    }
  }
  if (doc.contains("serve")) {
    const auto& s = doc["serve"];
    check_keys(s, {"host", "port", "static_dir", "deep_link_template", "session_ttl_seconds", "users"}, "serve");
    read_key(s, "host", c.host);
    read_key(s, "port", c.port);
    read_key(s, "deep_link_template", c.deep_link_template);
    read_key(s, "session_ttl_seconds", c.session_ttl_seconds);
    if (s.contains("static_dir")) c.static_dir = resolve(base, s["static_dir"].get<std::string>());
    if (s.contains("users")) {
      if (!s["users"].is_array()) throw Error(ErrorCode::InvalidArgument, "serve.users must be an array");
      c.users.clear();
      for (const auto& u : s["users"]) {
        check_keys(u, {"id", "password_sha256", "admin"}, "serve.users[]");
        api::UserAccount a;
        read_key(u, "id", a.id);
        read_key(u, "password_sha256", a.password_sha256);
        read_key(u, "admin", a.admin);
        if (a.id.empty() || a.password_sha256.size() != 64) {
          throw Error(ErrorCode::InvalidArgument, "serve.users[] needs an id and a 64-digit password_sha256");
        }
        c.users.push_back(std::move(a));
      }
    }
  }
  return c;
}

CliConfig apply_env(CliConfig c, const std::map<std::string, std::string>& env) {
  auto get = [&](const char* name) -> const std::string* {
    const auto it = env.find(name);
    return it == env.end() || it->second.empty() ? nullptr : &it->second;
  };
  if (const auto* v = get("CRA_STORE")) c.store = *v;
  if (const auto* v = get("CRA_MODEL")) c.model = *v;
  if (const auto* v = get("CRA_SEED")) c.seed = parse_seed(*v);
  if (const auto* v = get("CRA_LOG_LEVEL")) c.log_level = *v;
  if (const auto* v = get("CRA_DATA_DIR")) c.data_dir = *v;
  if (const auto* v = get("CRA_MINER_URL")) c.miner.base_url = *v;
  return c;
}

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos || !entry.starts_with("CRA_")) continue;
    env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return env;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code review analytics: mine reviews, classify comment usefulness, rank reviewers", "cra"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string config_path, store_flag, seed_flag, log_flag, data_flag;
  app.add_option("--config", config_path, "JSON config file (default: $CRA_CONFIG)");
  app.add_option("--store", store_flag, "Store database file");
  app.add_option("--seed", seed_flag, "Seed for every stochastic step (default 42)");
  app.add_option("--log-level", log_flag, "trace, debug, info, warn, error or off");
  app.add_option("--data-dir", data_flag, "Directory holding lexicons/");

  std::string dump_path;
  auto* import_cmd = app.add_subcommand("import", "Upsert a review dump into the store");
  import_cmd->add_option("dump", dump_path, "Review dump JSON file")->required();

  std::string since, url;
  auto* mine_cmd = app.add_subcommand("mine", "Fetch changes from the review server (credential from $CRA_MINER_CREDENTIAL)");
  mine_cmd->add_option("--since", since, "Fetch changes updated at or after this time (default: stored watermark)");
  mine_cmd->add_option("--url", url, "Review server base URL");

  std::string labels, algo = "rf", model_out;
  auto* train_cmd = app.add_subcommand("train", "Train a usefulness classifier and write its artifact");
  train_cmd->add_option("--labels", labels, "Labels CSV (default: labels in the store)");
  train_cmd->add_option("--algo", algo, "dt, rf or lr")->capture_default_str();
  train_cmd->add_option("--out", model_out, "Artifact path")->required();

  EvaluateFlags eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Repeated stratified cross-validation report");
  eval_cmd->add_option("--labels", eval.labels, "Labels CSV (default: labels in the store)");
  eval_cmd->add_option("--repeats", eval.repeats, "CV repeats")->capture_default_str()->check(CLI::Range(1, 1000));
  eval_cmd->add_option("--folds", eval.folds, "Folds per repeat")->capture_default_str()->check(CLI::Range(2, 100));
  eval_cmd->add_option("--algo", eval.algo, "dt, rf or lr")->capture_default_str();
  eval_cmd->add_option("--compare", eval.compare, "Two algorithms to compare, e.g. dt,rf");
  eval_cmd->add_flag("--explain", eval.explain, "Print the feature selection audit");
  eval_cmd->add_flag("--json", eval.json, "Machine-readable report with every fold row");

  std::string model_flag;
  bool all_unpredicted = false;
  auto* predict_cmd = app.add_subcommand("predict", "Score reviewer comments with a trained model");
  predict_cmd->add_option("--model", model_flag, "Artifact path (default: model from config)");
  predict_cmd->add_flag("--all-unpredicted", all_unpredicted, "Only comments this model has not scored yet");

  RankFlags rank_flags;
  auto* rank_cmd = app.add_subcommand("rank", "Rank reviewers or projects over a period");
  rank_cmd->add_option("--from", rank_flags.from, "Period start (inclusive)")->required();
  rank_cmd->add_option("--to", rank_flags.to, "Period end (exclusive)")->required();
  rank_cmd->add_option("--key", rank_flags.key, "RI, RE, NC, CUD or review_score")->capture_default_str();
  rank_cmd->add_option("--entity", rank_flags.entity, "reviewer or project")->capture_default_str();
  rank_cmd->add_flag("--csv", rank_flags.csv, "CSV output");
  rank_cmd->add_flag("--json", rank_flags.json, "JSON output");

  std::string host;
  int port = -1;
  std::string static_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API (and the dashboard files, if given)");
  serve_cmd->add_option("--port", port, "TCP port; 0 picks a free one");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--static", static_dir, "Directory served at /");

  std::vector<std::string> argv_store{"cra"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (app.get_subcommands().empty()) {
    err << "usage error: a subcommand is required\n\n" << app.help();
    return kExitUsage;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("cra", sink);
  log->set_pattern("%l: %v");

  try {
    const auto env = process_env();
    CliConfig config;
    if (config_path.empty()) {
      if (const auto it = env.find("CRA_CONFIG"); it != env.end()) config_path = it->second;
    }
    if (!config_path.empty()) config = load_config(config_path, config);
    config = apply_env(std::move(config), env);
    if (!store_flag.empty()) config.store = store_flag;
    if (!data_flag.empty()) config.data_dir = data_flag;
    if (!log_flag.empty()) config.log_level = log_flag;
    if (!seed_flag.empty()) {
      try {
        config.seed = parse_seed(seed_flag);
      } catch (const Error&) {
        throw UsageError("--seed: must be a non-negative integer");
      }
    }
    if (!url.empty()) config.miner.base_url = url;
    if (!host.empty()) config.host = host;
    if (port != -1) config.port = port;
    if (!static_dir.empty()) config.static_dir = static_dir;

    const auto level = spdlog::level::from_str(config.log_level);
    if (level == spdlog::level::off && config.log_level != "off") {
      throw UsageError("--log-level: unknown level " + config.log_level);
    }
    log->set_level(level);

    if (*import_cmd) return cmd_import(config, dump_path, out);
    if (*mine_cmd) return cmd_mine(config, since, out);
    if (*train_cmd) return cmd_train(config, labels, algo, model_out, out, log);
    if (*eval_cmd) return cmd_evaluate(config, eval, out, log);
    if (*predict_cmd) return cmd_predict(config, model_flag, all_unpredicted, out, log);
    if (*rank_cmd) return cmd_rank(config, rank_flags, out);
    if (*serve_cmd) return cmd_serve(config, env, out, log);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace cra::cli
