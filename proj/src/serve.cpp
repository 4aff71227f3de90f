#include "boilerfield/serve.hpp"

#include <algorithm>

#include "boilerfield/dom.hpp"
#include "boilerfield/error.hpp"
#include "boilerfield/json_io.hpp"
#include "boilerfield/pipeline.hpp"
#include "httplib.h"

namespace boilerfield {

namespace {

constexpr const char* kStubScript =
    "// The tagging UI has not been built; start tag-serve with --ui-dir.\n"
    "console.warn('boilerfield: tagging UI not available');\n";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(dump_stable(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, Json{{"error", message}});
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

bool is_valid_page_id(const std::string& id) {
  if (id.empty() || id.find("..") != std::string::npos) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
           c == '-';
  });
}

std::string inject_tagging_script(const std::string& html, const std::string& page_id) {
  std::string out = html;
  if (!out.empty() && out.back() != '\n') out.push_back('\n');
  out += "<script src=\"/ui/tagger.js\" data-page-id=\"" + html_escape(page_id) + "\" " + kUiAttribute +
         "></script>\n";
  return out;
}

TagServer::TagServer(TagServerConfig config) : config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  // httplib's default SO_REUSEPORT would let a second server share a port
  // that is already listening.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  routes();
}

TagServer::~TagServer() { stop(); }

std::mutex& TagServer::page_lock(const std::string& id) {
  const std::lock_guard guard(locks_guard_);
  auto& slot = page_locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void TagServer::routes() {
  auto& s = *server_;
  const auto snapshot_path = [this](const std::string& id) -> std::optional<std::filesystem::path> {
    for (const char* ext : {".html", ".htm"}) {
      auto p = config_.pages_dir / (id + ext);
      if (std::filesystem::is_regular_file(p)) return p;
    }
    return std::nullopt;
  };

  s.Get("/", [this](const httplib::Request&, httplib::Response& res) {
    std::vector<std::string> ids;
    for (const auto& f : expand_inputs({config_.pages_dir})) ids.push_back(page_id_for(f));
    std::string body = "<!DOCTYPE html><html><head><meta charset=\"utf-8\"><title>pages</title></head><body><ul>\n";
    for (const auto& id : ids) {
      const bool tagged = std::filesystem::exists(config_.truth_dir / (id + ".json"));
      body += "<li><a href=\"/page/" + html_escape(id) + "\">" + html_escape(id) + "</a>" +
              (tagged ? " (tagged)" : "") + "</li>\n";
    }
    body += "</ul></body></html>\n";
    res.set_content(body, "text/html; charset=utf-8");
  });

  s.Get(R"(/page/([^/]+))", [snapshot_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto path = is_valid_page_id(id) ? snapshot_path(id) : std::nullopt;
    if (!path) return send_error(res, 404, "unknown page " + id);
    res.set_content(inject_tagging_script(read_file(*path), id), "text/html");
  });

  s.Get(R"(/api/blocks/([^/]+))", [snapshot_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto path = is_valid_page_id(id) ? snapshot_path(id) : std::nullopt;
    if (!path) return send_error(res, 404, "unknown page " + id);
    try {
      send_json(res, 200, blocks_to_json(id, extract_text_blocks(parse_document(read_file(*path)))));
    } catch (const Error& e) {
      send_error(res, 422, e.what());
    }
  });

  s.Get(R"(/truth/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto path = config_.truth_dir / (id + ".json");
    if (!is_valid_page_id(id) || !std::filesystem::is_regular_file(path))
      return send_error(res, 404, "no ground truth for " + id);
    const std::lock_guard guard(page_lock(id));
    res.set_content(read_file(path), "application/json");
  });

  s.Post(R"(/truth/([^/]+))", [this, snapshot_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!is_valid_page_id(id) || !snapshot_path(id)) return send_error(res, 404, "unknown page " + id);
    GroundTruthPage page;
    try {
      page = truth_from_json(Json::parse(req.body));
    } catch (const Json::exception& e) {
      return send_error(res, 400, std::string("invalid JSON: ") + e.what());
    } catch (const SchemaError& e) {
      return send_error(res, 400, e.what());
    }
    if (page.page_id != id) return send_error(res, 400, "page_id '" + page.page_id + "' does not match URL");
    try {
      std::filesystem::create_directories(config_.truth_dir);
      const std::lock_guard guard(page_lock(id));
      write_file_atomic(config_.truth_dir / (id + ".json"), dump_stable(to_json(page)));
    } catch (const std::exception& e) {
      return send_error(res, 500, e.what());
    }
    res.status = 204;
  });

  s.Get(R"(/ui/([A-Za-z0-9._-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[1];
    if (config_.ui_dir && is_valid_page_id(name)) {
      const auto path = *config_.ui_dir / name;
      if (std::filesystem::is_regular_file(path)) {
        const bool js = path.extension() == ".js";
        res.set_content(read_file(path), js ? "text/javascript" : "application/octet-stream");
        return;
      }
    }
    if (name == "tagger.js") return res.set_content(kStubScript, "text/javascript");
    send_error(res, 404, "no such asset");
  });
}

int TagServer::bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
  return port;
}

void TagServer::serve() {
  {
    const std::lock_guard guard(state_);
    if (stop_requested_) return;
    serving_ = true;
  }
  server_->listen_after_bind();
}

void TagServer::stop() {
  {
    const std::lock_guard guard(state_);
    stop_requested_ = true;
    if (!serving_) return;
  }
  // httplib ignores stop() until the accept loop is running.
  server_->wait_until_ready();
  server_->stop();
}

std::string fetch_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  const std::string scheme = url.substr(0, scheme_end);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw Error("this build has no TLS support; cannot fetch " + url);
#endif
  if (scheme != "http" && scheme != "https") throw Error("unsupported URL scheme: " + scheme);
  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  const auto res = client.Get(path, {{"User-Agent", "boilerfield-fetch/1.0"}});
  if (!res) throw Error("request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw Error("request to " + url + " returned HTTP " + std::to_string(res->status));
  return res->body;
}

}  // namespace boilerfield
