#include "cra/ingest.hpp"

#include <algorithm>
#include "json.hpp"
#include <unordered_set>

#include "cra/error.hpp"

namespace cra {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedJson, what); }

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) malformed(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(where + ": missing key '" + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_string()) malformed(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_integer()) malformed(where + "." + key + ": expected an integer");
  return v.get<int>();
}

Timestamp get_time(const json& obj, const char* key, const std::string& where) {
  auto t = parse_timestamp(get_string(obj, key, where));
  if (!t) malformed(where + "." + key + ": expected an ISO-8601 UTC timestamp");
  return *t;
}

const json& get_array(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_array()) malformed(where + "." + key + ": expected an array");
  return v;
}

ReviewComment comment_from_json(const json& j, const std::string& thread_id, const std::string& where) {
  ReviewComment c;
  c.comment_id = get_string(j, "comment_id", where);
  c.thread_id = thread_id;
  c.author_id = get_string(j, "author_id", where);
  c.written_at = get_time(j, "written_at", where);
  c.text = get_string(j, "text", where);
  c.patchset_number = get_int(j, "patchset_number", where);
  if (auto it = j.find("code_context"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) malformed(where + ".code_context: expected a string");
    c.code_context = it->get<std::string>();
  }
  return c;
}

ReviewChange change_from_json(const json& j, const std::string& where) {
  ReviewChange ch;
  ch.change_id = get_string(j, "change_id", where);
  ch.project_id = get_string(j, "project_id", where);
  ch.author_id = get_string(j, "author_id", where);
  ch.created_at = get_time(j, "created_at", where);
  const std::string status = get_string(j, "status", where);
  auto parsed = parse_change_status(status);
  if (!parsed) malformed(where + ".status: unknown status '" + status + "'");
  ch.status = *parsed;

  const json& patchsets = get_array(j, "patchsets", where);
  for (std::size_t i = 0; i < patchsets.size(); ++i) {
    const std::string pw = where + ".patchsets[" + std::to_string(i) + "]";
    Patchset ps;
    ps.number = get_int(patchsets[i], "number", pw);
    ps.uploaded_at = get_time(patchsets[i], "uploaded_at", pw);
    const json& files = get_array(patchsets[i], "files", pw);
    for (std::size_t f = 0; f < files.size(); ++f) {
      const std::string fw = pw + ".files[" + std::to_string(f) + "]";
      FileDiff fd;
      fd.path = get_string(files[f], "path", fw);
      for (const json& line : get_array(files[f], "changed_new_lines", fw)) {
        if (!line.is_number_integer()) malformed(fw + ".changed_new_lines: expected integers");
        fd.changed_new_lines.insert(line.get<int>());
      }
      ps.files.push_back(std::move(fd));
    }
    ch.patchsets.push_back(std::move(ps));
  }

  const json& threads = get_array(j, "threads", where);
  for (std::size_t t = 0; t < threads.size(); ++t) {
    const std::string tw = where + ".threads[" + std::to_string(t) + "]";
    CommentThread th;
    th.thread_id = get_string(threads[t], "thread_id", tw);
    th.file_path = get_string(threads[t], "file_path", tw);
    th.line = get_int(threads[t], "line", tw);
    th.origin_patchset = get_int(threads[t], "origin_patchset", tw);
    const json& comments = get_array(threads[t], "comments", tw);
    for (std::size_t c = 0; c < comments.size(); ++c) {
      th.comments.push_back(
          comment_from_json(comments[c], th.thread_id, tw + ".comments[" + std::to_string(c) + "]"));
    }
    ch.threads.push_back(std::move(th));
  }
  return ch;
}

json comment_to_json(const ReviewComment& c) {
  json j = {{"comment_id", c.comment_id},
            {"author_id", c.author_id},
            {"written_at", format_timestamp(c.written_at)},
            {"text", c.text},
            {"patchset_number", c.patchset_number}};
  if (c.code_context) j["code_context"] = *c.code_context;
  return j;
}

json change_to_json(const ReviewChange& ch) {
  json patchsets = json::array();
  for (const auto& ps : ch.patchsets) {
    json files = json::array();
    for (const auto& fd : ps.files) {
      files.push_back({{"path", fd.path}, {"changed_new_lines", fd.changed_new_lines}});
    }
    patchsets.push_back({{"number", ps.number}, {"uploaded_at", format_timestamp(ps.uploaded_at)}, {"files", files}});
  }
  json threads = json::array();
  for (const auto& th : ch.threads) {
    json comments = json::array();
    for (const auto& c : th.comments) comments.push_back(comment_to_json(c));
    threads.push_back({{"thread_id", th.thread_id},
                       {"file_path", th.file_path},
                       {"line", th.line},
                       {"origin_patchset", th.origin_patchset},
                       {"comments", comments}});
  }
  return {{"change_id", ch.change_id},
          {"project_id", ch.project_id},
          {"author_id", ch.author_id},
          {"created_at", format_timestamp(ch.created_at)},
          {"status", std::string(to_string(ch.status))},
          {"patchsets", patchsets},
          {"threads", threads}};
}

}  // namespace

ReviewDump parse_review_dump(std::string_view bytes) {
  json root;
  try {
    root = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  if (!root.is_object()) malformed("dump: top level must be an object");

  const int version = get_int(root, "format_version", "dump");
  if (version != kDumpFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "dump format_version " + std::to_string(version) +
                                                   " (supported: " + std::to_string(kDumpFormatVersion) + ")");
  }

  ReviewDump dump;
  dump.format_version = version;
  const json& developers = get_array(root, "developers", "dump");
  for (std::size_t i = 0; i < developers.size(); ++i) {
    const std::string w = "developers[" + std::to_string(i) + "]";
    dump.developers.push_back({get_string(developers[i], "developer_id", w),
                               get_string(developers[i], "display_name", w)});
  }
  const json& projects = get_array(root, "projects", "dump");
  for (std::size_t i = 0; i < projects.size(); ++i) {
    const std::string w = "projects[" + std::to_string(i) + "]";
    dump.projects.push_back({get_string(projects[i], "project_id", w), get_string(projects[i], "name", w)});
  }
  const json& changes = get_array(root, "changes", "dump");
  for (std::size_t i = 0; i < changes.size(); ++i) {
    dump.changes.push_back(change_from_json(changes[i], "changes[" + std::to_string(i) + "]"));
  }

  validate_dump(dump);
  return dump;
}

void validate_dump(const ReviewDump& dump) {
  std::unordered_set<std::string> developers;
  for (const auto& d : dump.developers) {
    if (d.developer_id.empty()) throw Error(ErrorCode::InvalidDump, "empty developer_id");
    if (!developers.insert(d.developer_id).second) {
      throw Error(ErrorCode::InvalidDump, "duplicate developer_id '" + d.developer_id + "'");
    }
  }
  std::unordered_set<std::string> projects;
  for (const auto& p : dump.projects) {
    if (p.project_id.empty()) throw Error(ErrorCode::InvalidDump, "empty project_id");
    if (!projects.insert(p.project_id).second) {
      throw Error(ErrorCode::InvalidDump, "duplicate project_id '" + p.project_id + "'");
    }
  }

  auto require_developer = [&](const std::string& id, const std::string& where) {
    if (!developers.count(id)) {
      throw Error(ErrorCode::DanglingReference, where + " references unknown developer '" + id + "'");
    }
  };

  std::unordered_set<std::string> change_ids;
  std::unordered_set<std::string> comment_ids;
  for (const auto& ch : dump.changes) {
    const std::string where = "change '" + ch.change_id + "'";
    if (!change_ids.insert(ch.change_id).second) {
      throw Error(ErrorCode::InvalidDump, "duplicate change_id '" + ch.change_id + "'");
    }
    if (!projects.count(ch.project_id)) {
      throw Error(ErrorCode::DanglingReference, where + " references unknown project '" + ch.project_id + "'");
    }
    require_developer(ch.author_id, where);
    for (const auto& th : ch.threads) {
      for (const auto& c : th.comments) {
        require_developer(c.author_id, "comment '" + c.comment_id + "'");
        if (!comment_ids.insert(c.comment_id).second) {
          throw Error(ErrorCode::InvalidDump, "duplicate comment_id '" + c.comment_id + "'");
        }
      }
    }
    auto violations = validate_change(ch);
    if (!violations.empty()) {
      std::string msg = where + ":";
      for (const auto& v : violations) msg += " [" + v.field + ": " + v.rule + "]";
      throw Error(ErrorCode::InvalidDump, msg);
    }
  }
}

std::string serialize_review_dump(const ReviewDump& dump, int indent) {
  json developers = json::array();
  for (const auto& d : dump.developers) {
    developers.push_back({{"developer_id", d.developer_id}, {"display_name", d.display_name}});
  }
  json projects = json::array();
  for (const auto& p : dump.projects) projects.push_back({{"project_id", p.project_id}, {"name", p.name}});
  json changes = json::array();
  for (const auto& ch : dump.changes) changes.push_back(change_to_json(ch));

  json root = {{"format_version", dump.format_version},
               {"developers", developers},
               {"projects", projects},
               {"changes", changes}};
  return root.dump(indent) + (indent >= 0 ? "\n" : "");
}

std::string serialize_change(const ReviewChange& change) { return change_to_json(change).dump(); }

ReviewChange parse_change(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  ReviewChange ch = change_from_json(j, "change");
  const auto violations = validate_change(ch);
  if (!violations.empty()) throw Error(ErrorCode::InvalidDump, "change '" + ch.change_id + "': " + violations.front().rule);
  return ch;
}

const CommentThread* find_thread(const ReviewChange& change, std::string_view thread_id) {
  for (const auto& th : change.threads) {
    if (th.thread_id == thread_id) return &th;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

TriggerResult change_trigger(const ReviewComment& comment, const ReviewChange& change) {
  const CommentThread* thread = find_thread(change, comment.thread_id);
  if (thread == nullptr) return {};

  int best = kNoLineChange;
  for (const auto& ps : change.patchsets) {
    if (ps.number <= comment.patchset_number) continue;
    for (const auto& fd : ps.files) {
      if (fd.path != thread->file_path || fd.changed_new_lines.empty()) continue;
      // Nearest changed line on either side of the commented line.
      auto it = fd.changed_new_lines.lower_bound(thread->line);
      if (it != fd.changed_new_lines.end()) best = std::min(best, *it - thread->line);
      if (it != fd.changed_new_lines.begin()) best = std::min(best, thread->line - *std::prev(it));
    }
  }
  return {best <= kTriggerProximity, best};
}

ThreadContext thread_context(const ReviewComment& comment, const ReviewChange& change) {
  ThreadContext ctx;
  ctx.patch_id = comment.patchset_number;
  ctx.num_patches = static_cast<int>(change.patchsets.size());
  ctx.is_last_patch = comment.patchset_number == change.last_patchset_number();
  ctx.review_status = change.status;
  if (const Patchset* ps = change.find_patchset(comment.patchset_number)) {
    ctx.review_interval = std::max<long long>(0, (comment.written_at - ps->uploaded_at).count());
  }

  const CommentThread* thread = find_thread(change, comment.thread_id);
  if (thread == nullptr) return ctx;

  ctx.thread_length = static_cast<int>(thread->comments.size());
  std::unordered_set<std::string> participants;
  for (const auto& c : thread->comments) {
    participants.insert(c.author_id);
    if (c.author_id == change.author_id && c.written_at > comment.written_at) {
      ctx.author_responded = true;
      ctx.reply_texts.push_back(c.text);
    }
  }
  ctx.num_participant = static_cast<int>(participants.size());
  return ctx;
}

namespace {

bool touches_file(const ReviewChange& ch, std::string_view path) {
  for (const auto& ps : ch.patchsets) {
    for (const auto& fd : ps.files) {
      if (fd.path == path) return true;
    }
  }
  for (const auto& th : ch.threads) {
    if (th.file_path == path) return true;
  }
  return false;
}

bool reviewed_before(const ReviewChange& ch, std::string_view reviewer, Timestamp as_of) {
  if (ch.author_id == reviewer) return false;
  for (const auto& th : ch.threads) {
    for (const auto& c : th.comments) {
      if (c.author_id == reviewer && c.written_at < as_of) return true;
    }
  }
  return false;
}

Timestamp first_upload(const ReviewChange& ch) {
  return ch.patchsets.empty() ? ch.created_at : ch.patchsets.front().uploaded_at;
}

}  // namespace

ExperienceFeatures experience(const std::vector<ReviewChange>& changes, std::string_view reviewer_id,
                              std::string_view author_id, std::string_view file_path,
                              std::string_view project_id, Timestamp as_of) {
  ExperienceFeatures out;
  for (const auto& ch : changes) {
    const bool reviewed = reviewed_before(ch, reviewer_id, as_of);
    const bool on_file = touches_file(ch, file_path);
    if (on_file && reviewed) ++out.code_reviewership;
    if (on_file && ch.author_id == reviewer_id && first_upload(ch) < as_of) ++out.code_ownership;
    if (ch.project_id == project_id) {
      if (reviewed) ++out.reviewing_experience;
      if (ch.author_id == author_id && ch.created_at < as_of) ++out.developer_experience;
    }
  }
  return out;
}

ExperienceFeatures experience(const ReviewDump& history, std::string_view reviewer_id,
                              std::string_view author_id, std::string_view file_path,
                              std::string_view project_id, Timestamp as_of) {
  return experience(history.changes, reviewer_id, author_id, file_path, project_id, as_of);
}

}  // namespace cra
