#include "cra/miner.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <thread>

#include "cra/error.hpp"

namespace cra::miner {

using nlohmann::json;

namespace {

constexpr std::string_view kXssiPrefix = ")]}'";

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema(where + ": missing '" + key + "'");
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) schema(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

int int_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) schema(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

Timestamp time_field(const json& obj, const char* key, const std::string& where) {
  const auto t = parse_timestamp(string_field(obj, key, where));
  if (!t) schema(where + ": '" + key + "' is not a timestamp");
  return *t;
}

/// Username when the server exposes it, else the numeric account id.
std::string account_id(const json& account, const std::string& where) {
  if (!account.is_object()) schema(where + ": account must be an object");
  if (account.contains("username") && account["username"].is_string()) return account["username"].get<std::string>();
  return std::to_string(int_field(account, "_account_id", where));
}

std::string account_name(const json& account) {
  if (account.contains("name") && account["name"].is_string()) return account["name"].get<std::string>();
  return "";
}

ChangeStatus map_status(const std::string& status, const std::string& where) {
  if (status == "NEW") return ChangeStatus::open;
  if (status == "MERGED") return ChangeStatus::merged;
  if (status == "ABANDONED") return ChangeStatus::abandoned;
  schema(where + ": unknown status '" + status + "'");
}

json parse_body(const std::string& body, const std::string& what) {
  std::string_view text = body;
  if (text.starts_with(kXssiPrefix)) text.remove_prefix(kXssiPrefix.size());
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error&) {
    schema(what + ": response is not JSON");
  }
}

std::string base64_decode(std::string_view in) {
  std::string compact;
  for (char c : in) {
    if (c != '\n' && c != '\r') compact += c;
  }
  if (compact.size() % 4 != 0) schema("file content is not base64");
  std::string out(compact.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(compact.data()), static_cast<int>(compact.size()));
  if (n < 0) schema("file content is not base64");
  std::size_t pad = 0;
  while (pad < 2 && pad < compact.size() && compact[compact.size() - 1 - pad] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string path_segment(const std::string& s) { return httplib::detail::encode_query_param(s); }

struct Endpoint {
  std::string scheme_host_port;
  std::string prefix;
};

Endpoint split_base_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::InvalidArgument, "miner base URL must be http(s)://host[:port][/prefix]");
  std::string prefix = m[2].str();
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

class GerritClient {
 public:
  GerritClient(const MinerConfig& config, const std::string& credential)
      : config_(config), endpoint_(split_base_url(config.base_url)), client_(endpoint_.scheme_host_port) {
    const auto colon = credential.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::AuthFailure, std::string(kCredentialEnv) + " must be user:password");
    client_.set_basic_auth(credential.substr(0, colon), credential.substr(colon + 1));
    client_.set_connection_timeout(config.timeout_seconds, 0);
    client_.set_read_timeout(config.timeout_seconds, 0);
  }

  /// Authenticated GET under /a/. Returns none on 404 when allowed.
  std::optional<std::string> get(const std::string& path, bool allow_missing = false) {
    const std::string full = endpoint_.prefix + "/a" + path;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      auto res = client_.Get(full);
      std::string failure;
      if (!res) {
        failure = "request failed: " + httplib::to_string(res.error());
      } else if (res->status == 401 || res->status == 403) {
        throw Error(ErrorCode::AuthFailure, "server rejected the miner credential (HTTP " + std::to_string(res->status) + ")");
      } else if (res->status == 404 && allow_missing) {
        return std::nullopt;
      } else if (res->status == 429 || res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
      } else if (res->status != 200) {
        schema("unexpected HTTP " + std::to_string(res->status) + " for " + path);
      } else {
        return res->body;
      }
      if (attempt >= config_.max_retries) {
        throw Error(ErrorCode::NetworkFailure, failure + " after " + std::to_string(attempt + 1) + " attempts");
      }
      std::this_thread::sleep_for(backoff);
      backoff = std::min(backoff * 2, config_.max_backoff);
    }
  }

  json get_json(const std::string& path, const std::string& what) { return parse_body(*get(path), what); }

 private:
  MinerConfig config_;
  Endpoint endpoint_;
  httplib::Client client_;
};

std::mutex& endpoint_mutex(const std::string& base_url) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[base_url];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

struct RawComment {
  ReviewComment comment;
  std::string path;
  int line = 0;
  std::string in_reply_to;
};

}  // namespace

std::set<int> changed_lines_from_diff(const json& diff) {
  std::set<int> out;
  const json& content = field(diff, "content", "diff");
  if (!content.is_array()) schema("diff: 'content' must be an array");
  int line = 1;
  for (const json& chunk : content) {
    if (!chunk.is_object()) schema("diff: chunk must be an object");
    if (chunk.contains("ab")) line += static_cast<int>(chunk["ab"].size());
    if (chunk.contains("skip")) line += chunk["skip"].get<int>();
    if (chunk.contains("b")) {
      for (std::size_t i = 0; i < chunk["b"].size(); ++i) out.insert(line++);
    }
  }
  return out;
}

std::optional<std::string> code_context(const std::string& text, int line) {
  if (line < 1) return std::nullopt;
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (static_cast<std::size_t>(line) > lines.size()) return std::nullopt;
  // Five lines above, the line itself and four below.
  const int first = std::max(1, line - 5);
  const int last = std::min(static_cast<int>(lines.size()), line + 4);
  std::string out;
  for (int i = first; i <= last; ++i) out += lines[static_cast<std::size_t>(i - 1)] + (i < last ? "\n" : "");
  return out;
}

ReviewDump gerrit_to_dump(const std::vector<GerritChange>& fetched) {
  ReviewDump dump;
  std::map<std::string, std::string> developers;
  std::set<std::string> projects;
  auto see = [&](const json& account, const std::string& where) {
    const std::string id = account_id(account, where);
    auto& name = developers[id];
    if (name.empty()) name = account_name(account);
    return id;
  };

  for (const auto& g : fetched) {
    const json& c = g.change;
    const std::string change_id = std::to_string(int_field(c, "_number", "change"));
    const std::string where = "change " + change_id;
    ReviewChange change;
    change.change_id = change_id;
    change.project_id = string_field(c, "project", where);
    projects.insert(change.project_id);
    change.author_id = see(field(c, "owner", where), where + " owner");
    change.created_at = time_field(c, "created", where);
    change.status = map_status(string_field(c, "status", where), where);

    const json& revisions = field(c, "revisions", where);
    if (!revisions.is_object()) schema(where + ": 'revisions' must be an object");
    for (const auto& [sha, rev] : revisions.items()) {
      Patchset ps;
      ps.number = int_field(rev, "_number", where + " revision " + sha);
      ps.uploaded_at = time_field(rev, "created", where + " revision " + sha);
      const auto it = g.diffs.find(ps.number);
      if (it != g.diffs.end()) {
        for (const auto& [path, diff] : it->second) ps.files.push_back({path, changed_lines_from_diff(diff)});
      }
      change.patchsets.push_back(std::move(ps));
    }
    std::sort(change.patchsets.begin(), change.patchsets.end(),
              [](const Patchset& a, const Patchset& b) { return a.number < b.number; });

    if (!g.comments.is_object()) schema(where + ": comments must be an object keyed by path");
    std::map<std::string, RawComment> raw;
    for (const auto& [path, list] : g.comments.items()) {
      if (!list.is_array()) schema(where + ": comments for '" + path + "' must be an array");
      for (const json& j : list) {
        RawComment r;
        r.comment.comment_id = string_field(j, "id", where + " comment");
        const std::string cw = where + " comment " + r.comment.comment_id;
        r.comment.author_id = see(field(j, "author", cw), cw);
        r.comment.written_at = time_field(j, "updated", cw);
        r.comment.text = j.contains("message") && j["message"].is_string() ? j["message"].get<std::string>() : "";
        r.comment.patchset_number = int_field(j, "patch_set", cw);
        r.path = path;
        // File-level comments have no line; they sit on line 1.
        r.line = j.contains("line") ? std::max(1, j["line"].get<int>()) : 1;
        if (j.contains("in_reply_to") && j["in_reply_to"].is_string()) r.in_reply_to = j["in_reply_to"].get<std::string>();
        const auto text = g.contents.find({r.comment.patchset_number, path});
        if (text != g.contents.end() && j.contains("line")) r.comment.code_context = code_context(text->second, r.line);
        const std::string id = r.comment.comment_id;
        raw.emplace(id, std::move(r));
      }
    }

    // Each reply joins the thread of the comment it answers, transitively.
    auto root_of = [&](std::string id) {
      for (std::size_t hops = 0; hops <= raw.size(); ++hops) {
        const auto it = raw.find(id);
        if (it == raw.end() || it->second.in_reply_to.empty() || !raw.count(it->second.in_reply_to)) return id;
        id = it->second.in_reply_to;
      }
      schema(where + ": reply cycle at comment " + id);
    };
    std::map<std::string, CommentThread> threads;
    for (const auto& [id, r] : raw) {
      const std::string root = root_of(id);
      auto& thread = threads[root];
      if (thread.thread_id.empty()) {
        const RawComment& head = raw.at(root);
        thread = {root, head.path, head.line, head.comment.patchset_number, {}};
      }
      ReviewComment comment = r.comment;
      comment.thread_id = root;
      thread.comments.push_back(std::move(comment));
    }
    for (auto& [id, thread] : threads) {
      std::sort(thread.comments.begin(), thread.comments.end(), comment_order);
      change.threads.push_back(std::move(thread));
    }
    dump.changes.push_back(std::move(change));
  }

  for (const auto& [id, name] : developers) dump.developers.push_back({id, name});
  for (const auto& p : projects) dump.projects.push_back({p, p});
  std::sort(dump.changes.begin(), dump.changes.end(),
            [](const ReviewChange& a, const ReviewChange& b) { return std::stoll(a.change_id) < std::stoll(b.change_id); });
  try {
    validate_dump(dump);
  } catch (const Error& e) {
    schema(std::string("mined data does not form a valid dump: ") + e.what());
  }
  return dump;
}

MineResult mine_incremental(const MinerConfig& config, Timestamp since) {
  const char* credential = std::getenv(kCredentialEnv);
  if (credential == nullptr || *credential == '\0') {
    throw Error(ErrorCode::AuthFailure, std::string(kCredentialEnv) + " is not set");
  }
  if (config.page_size < 1) throw Error(ErrorCode::InvalidArgument, "page size must be positive");
  std::lock_guard single_flight(endpoint_mutex(config.base_url));
  GerritClient client(config, credential);

  std::vector<json> changes;
  for (int offset = 0;;) {
    const std::string query = "since:\"" + format_gerrit_timestamp(since) + "\"";
    const json page = client.get_json("/changes/?q=" + path_segment(query) + "&o=ALL_REVISIONS&o=DETAILED_ACCOUNTS&n=" +
                                          std::to_string(config.page_size) + "&S=" + std::to_string(offset),
                                      "change query");
    if (!page.is_array()) schema("change query: expected an array");
    for (const json& c : page) changes.push_back(c);
    offset += static_cast<int>(page.size());
    if (page.empty() || !page.back().value("_more_changes", false)) break;
  }

  MineResult result;
  std::vector<GerritChange> fetched;
  std::set<int> seen;
  for (const json& c : changes) {
    const int number = int_field(c, "_number", "change");
    if (!seen.insert(number).second) continue;  // pages can shift while we read
    const auto updated = time_field(c, "updated", "change " + std::to_string(number));
    if (!result.high_water_mark || *result.high_water_mark < updated) result.high_water_mark = updated;

    GerritChange g;
    g.change = c;
    const std::string base = "/changes/" + std::to_string(number);
    g.comments = client.get_json(base + "/comments", "comments of " + std::to_string(number));
    if (!c.contains("revisions") || !c["revisions"].is_object()) schema("change " + std::to_string(number) + ": no revisions");
    for (const auto& [sha, rev] : c["revisions"].items()) {
      const int ps = int_field(rev, "_number", "revision " + sha);
      const std::string rev_path = base + "/revisions/" + std::to_string(ps);
      const std::string against = ps > 1 ? "?base=" + std::to_string(ps - 1) : "";
      const json files = client.get_json(rev_path + "/files/" + against, "files of " + std::to_string(number));
      if (!files.is_object()) schema("files of change " + std::to_string(number) + ": expected an object");
      for (const auto& [path, info] : files.items()) {
        if (path == "/COMMIT_MSG" || path == "/MERGE_LIST") continue;
        g.diffs[ps][path] = client.get_json(rev_path + "/files/" + path_segment(path) + "/diff" + against, "diff of " + path);
      }
    }
    // Code context comes from the file as it was in the commented patchset.
    if (g.comments.is_object()) {
      for (const auto& [path, list] : g.comments.items()) {
        if (!list.is_array()) continue;
        for (const json& comment : list) {
          if (!comment.contains("line") || !comment.contains("patch_set")) continue;
          const int ps = comment["patch_set"].get<int>();
          if (g.contents.count({ps, path})) continue;
          const auto body = client.get(base + "/revisions/" + std::to_string(ps) + "/files/" + path_segment(path) + "/content", true);
          if (body) g.contents[{ps, path}] = base64_decode(*body);
        }
      }
    }
    fetched.push_back(std::move(g));
  }
  result.dump = gerrit_to_dump(fetched);
  return result;
}

bool SingleFlight::try_start() {
  std::lock_guard lock(mutex_);
  if (running_) return false;
  running_ = true;
  return true;
}

void SingleFlight::finish() {
  std::lock_guard lock(mutex_);
  running_ = false;
}

bool SingleFlight::running() const {
  std::lock_guard lock(mutex_);
  return running_;
}

}  // namespace cra::miner
