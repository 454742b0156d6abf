#include "mock_gerrit.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>
#include <map>

#include "builders.hpp"
#include "json.hpp"

namespace cra::testing {

namespace {

using nlohmann::json;

const json kAlice = {{"_account_id", 1000}, {"username", "alice"}, {"name", "Alice Ng"}};
const json kBob = {{"_account_id", 1001}, {"username", "bob"}, {"name", "Bob Li"}};
// No username: the miner falls back to the account number.
const json kCarol = {{"_account_id", 1003}, {"name", "Carol Diaz"}};

const std::string kLedger =
    "package ledger;\n"
    "\n"
    "class Ledger {\n"
    "  private long balance;\n"
    "\n"
    "  long total() {\n"
    "    long sum = 0;\n"
    "    for (Entry e : entries) {\n"
    "      sum += e.amount;\n"
    "      balance = sum;\n"
    "    }\n"
    "    return sum;\n"
    "  }\n"
    "}\n";

struct Corpus {
  std::vector<json> changes;  // newest update first, as Gerrit orders them
  std::map<std::string, json> comments;
  std::map<std::string, json> files;  // "change/ps" -> file map
  std::map<std::string, json> diffs;  // "change/ps/path" -> diff
  std::map<std::string, std::string> contents;  // "change/ps/path" -> text
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus c;
    c.changes.push_back({{"_number", 103},
                         {"project", "alpha"},
                         {"owner", kCarol},
                         {"created", "2024-03-01 08:00:00.000000000"},
                         {"updated", "2024-03-05 11:00:00.000000000"},
                         {"status", "ABANDONED"},
                         {"revisions", {{"ccc1", {{"_number", 1}, {"created", "2024-03-01 08:00:00.000000000"}}}}}});
    c.changes.push_back({{"_number", 102},
                         {"project", "beta"},
                         {"owner", kBob},
                         {"created", "2024-02-01 08:00:00.000000000"},
                         {"updated", "2024-02-03 08:00:00.000000000"},
                         {"status", "NEW"},
                         {"revisions", {{"bbb1", {{"_number", 1}, {"created", "2024-02-01 08:00:00.000000000"}}}}}});
    c.changes.push_back({{"_number", 101},
                         {"project", "alpha"},
                         {"owner", kAlice},
                         {"created", "2024-01-10 09:00:00.000000000"},
                         {"updated", "2024-01-12 10:00:00.000000000"},
                         {"status", "MERGED"},
                         {"revisions",
                          {{"aaa1", {{"_number", 1}, {"created", "2024-01-10 09:00:00.000000000"}}},
                           {"aaa2", {{"_number", 2}, {"created", "2024-01-11 15:00:00.000000000"}}}}}});

    c.files["101/1"] = {{"/COMMIT_MSG", json::object()}, {"src/Ledger.java", {{"lines_inserted", 2}}}};
    c.files["101/2"] = {{"src/Ledger.java", {{"lines_inserted", 1}}}};
    c.files["102/1"] = {{"docs/README.md", {{"lines_inserted", 3}}}};
    c.files["103/1"] = {{"src/Cart.java", {{"lines_deleted", 1}}}};
    c.diffs["101/1/src/Ledger.java"] = {
        {"content", {{{"ab", {"package ledger;", ""}}}, {{"a", {"class L {"}}, {"b", {"class Ledger {", "  private long balance;"}}}, {{"skip", 10}}}}};
    c.diffs["101/2/src/Ledger.java"] = {{"content", {{{"skip", 10}}, {{"ab", {"    }"}}}, {{"a", {"    return 0;"}}, {"b", {"    return sum;"}}}}}};
    c.diffs["102/1/docs/README.md"] = {{"content", {{{"b", {"a", "b", "c"}}}}}};
    c.diffs["103/1/src/Cart.java"] = {{"content", {{{"ab", {"x"}}}, {{"a", {"y"}}}}}};
    c.contents["101/1/src/Ledger.java"] = kLedger;
    c.contents["102/1/docs/README.md"] = "a\nb\nc\n";

    c.comments["101"] = {
        {"src/Ledger.java",
         {{{"id", "c101a"}, {"author", kBob}, {"patch_set", 1}, {"line", 10}, {"updated", "2024-01-11 10:00:00.000000000"},
           {"message", "Rename balance to accountBalance"}},
          {{"id", "c101b"}, {"author", kAlice}, {"patch_set", 1}, {"line", 10}, {"in_reply_to", "c101a"},
           {"updated", "2024-01-11 12:00:00.000000000"}, {"message", "Done"}}}},
        {"/PATCHSET_LEVEL",
         {{{"id", "c101c"}, {"author", kCarol}, {"patch_set", 2}, {"updated", "2024-01-12 09:00:00.000000000"},
           {"message", "LGTM"}}}}};
    c.comments["102"] = {{"docs/README.md",
                          {{{"id", "c102a"}, {"author", kCarol}, {"patch_set", 1}, {"line", 2},
                            {"updated", "2024-02-02 09:30:00.000000000"}, {"message", "Typo here?"}}}}};
    c.comments["103"] = {{"src/Cart.java",
                          {{{"id", "c103a"}, {"author", kAlice}, {"patch_set", 1}, {"line", 1},
                            {"updated", "2024-03-04 10:00:00.000000000"}, {"message", "Why remove this?"}}}}};
    return c;
  }();
  return c;
}

std::string base64(const std::string& in) {
  std::string out(4 * ((in.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(in.data()), static_cast<int>(in.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

void reply_json(httplib::Response& res, const json& body) {
  res.set_content(")]}'\n" + body.dump(), "application/json");
}

}  // namespace

MockGerrit::MockGerrit() : server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    if (failures_ > 0) {
      --failures_;
      res.status = 503;
      return httplib::Server::HandlerResponse::Handled;
    }
    const std::string expected = "Basic " + base64(std::string(kUser) + ":" + kPassword);
    if (req.get_header_value("Authorization") != expected) {
      res.status = 401;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  s.Get("/a/changes/", [this](const httplib::Request& req, httplib::Response& res) {
    ++change_queries_;
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
    if (garbage_) {
      res.set_content("<html>maintenance</html>", "text/html");
      return;
    }
    const std::string q = req.get_param_value("q");
    const auto open = q.find('"');
    const auto close = q.rfind('"');
    const Timestamp since = parse_timestamp_or_throw(q.substr(open + 1, close - open - 1));
    std::vector<json> hits;
    for (const auto& c : corpus().changes) {
      if (parse_timestamp_or_throw(c["updated"].get<std::string>()) >= since) hits.push_back(c);
    }
    const std::size_t n = req.has_param("n") ? std::stoul(req.get_param_value("n")) : hits.size();
    const std::size_t start = req.has_param("S") ? std::stoul(req.get_param_value("S")) : 0;
    json page = json::array();
    for (std::size_t i = start; i < hits.size() && i < start + n; ++i) page.push_back(hits[i]);
    if (!page.empty() && start + n < hits.size()) page.back()["_more_changes"] = true;
    reply_json(res, page);
  });
  s.Get(R"(/a/changes/(\d+)/comments)", [](const httplib::Request& req, httplib::Response& res) {
    const auto it = corpus().comments.find(req.matches[1].str());
    reply_json(res, it == corpus().comments.end() ? json::object() : it->second);
  });
  s.Get(R"(/a/changes/(\d+)/revisions/(\d+)/files/)", [](const httplib::Request& req, httplib::Response& res) {
    const auto it = corpus().files.find(req.matches[1].str() + "/" + req.matches[2].str());
    if (it == corpus().files.end()) {
      res.status = 404;
      return;
    }
    reply_json(res, it->second);
  });
  s.Get(R"(/a/changes/(\d+)/revisions/(\d+)/files/(.+)/diff)", [](const httplib::Request& req, httplib::Response& res) {
    const auto it = corpus().diffs.find(req.matches[1].str() + "/" + req.matches[2].str() + "/" + req.matches[3].str());
    if (it == corpus().diffs.end()) {
      res.status = 404;
      return;
    }
    reply_json(res, it->second);
  });
  s.Get(R"(/a/changes/(\d+)/revisions/(\d+)/files/(.+)/content)", [](const httplib::Request& req, httplib::Response& res) {
    const auto it = corpus().contents.find(req.matches[1].str() + "/" + req.matches[2].str() + "/" + req.matches[3].str());
    if (it == corpus().contents.end()) {
      res.status = 404;
      return;
    }
    res.set_content(base64(it->second), "text/plain");
  });

  port_ = s.bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockGerrit::~MockGerrit() {
  server_->stop();
  thread_.join();
}

std::string MockGerrit::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

Timestamp MockGerrit::newest_update() { return ts("2024-03-05T11:00:00"); }

ReviewDump MockGerrit::expected_dump() {
  ReviewDump d;
  d.developers = {{"1003", "Carol Diaz"}, {"alice", "Alice Ng"}, {"bob", "Bob Li"}};
  d.projects = {{"alpha", "alpha"}, {"beta", "beta"}};

  ReviewComment a = make_comment("c101a", "c101a", "bob", ts("2024-01-11T10:00:00"), "Rename balance to accountBalance", 1);
  // Lines 5 to 14 of the file.
  a.code_context =
      "\n"
      "  long total() {\n"
      "    long sum = 0;\n"
      "    for (Entry e : entries) {\n"
      "      sum += e.amount;\n"
      "      balance = sum;\n"
      "    }\n"
      "    return sum;\n"
      "  }\n"
      "}";
  ReviewComment b = make_comment("c101b", "c101a", "alice", ts("2024-01-11T12:00:00"), "Done", 1);
  b.code_context = a.code_context;
  d.changes.push_back(ChangeBuilder("101", "alpha", "alice", ts("2024-01-10T09:00:00"))
                          .status(ChangeStatus::merged)
                          .patchset(1, ts("2024-01-10T09:00:00"), {diff("src/Ledger.java", {3, 4})})
                          .patchset(2, ts("2024-01-11T15:00:00"), {diff("src/Ledger.java", {12})})
                          .thread("c101a", "src/Ledger.java", 10, 1, {a, b})
                          .thread("c101c", "/PATCHSET_LEVEL", 1, 2,
                                  {make_comment("c101c", "", "1003", ts("2024-01-12T09:00:00"), "LGTM", 2)})
                          .build());
  ReviewComment typo = make_comment("c102a", "c102a", "1003", ts("2024-02-02T09:30:00"), "Typo here?", 1);
  typo.code_context = "a\nb\nc";
  d.changes.push_back(ChangeBuilder("102", "beta", "bob", ts("2024-02-01T08:00:00"))
                          .patchset(1, ts("2024-02-01T08:00:00"), {diff("docs/README.md", {1, 2, 3})})
                          .thread("c102a", "docs/README.md", 2, 1, {typo})
                          .build());
  d.changes.push_back(ChangeBuilder("103", "alpha", "1003", ts("2024-03-01T08:00:00"))
                          .status(ChangeStatus::abandoned)
                          .patchset(1, ts("2024-03-01T08:00:00"), {diff("src/Cart.java", {})})
                          .thread("c103a", "src/Cart.java", 1, 1,
                                  {make_comment("c103a", "", "alice", ts("2024-03-04T10:00:00"), "Why remove this?", 1)})
                          .build());
  return d;
}

}  // namespace cra::testing
