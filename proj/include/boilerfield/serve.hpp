#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace boilerfield {

struct TagServerConfig {
  std::filesystem::path pages_dir;  // <id>.html snapshots
  std::filesystem::path truth_dir;  // POSTed truth lands in <id>.json
  /// Directory holding the built tagging UI (tagger.js); a stub script is
  /// served when absent.
  std::optional<std::filesystem::path> ui_dir;
  std::string host = "127.0.0.1";
  int port = 8765;
};

/// Marker attribute on every element the tagging UI adds to a page.
inline constexpr const char* kUiAttribute = "data-boilerfield-ui";

/// Page ids are file stems restricted to [A-Za-z0-9._-] without "..".
bool is_valid_page_id(const std::string& id);

/// Appends the tagging script tag to the snapshot. Appending after all
/// content leaves every pre-existing node and path unchanged.
std::string inject_tagging_script(const std::string& html, const std::string& page_id);

/// Local HTTP service for the tagging workflow:
///   GET  /                  page index
///   GET  /page/<id>         snapshot with the tagging script injected
///   GET  /api/blocks/<id>   server-side block list (dom_path, text_hash, text)
///   GET  /truth/<id>        stored ground truth, 404 if none
///   POST /truth/<id>        validate and store ground truth -> 204
///   GET  /ui/<file>         tagging UI assets
class TagServer {
 public:
  explicit TagServer(TagServerConfig config);
  ~TagServer();
  TagServer(const TagServer&) = delete;
  TagServer& operator=(const TagServer&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port.
  /// Throws Error if the address is unavailable.
  int bind();
  /// Blocks serving requests until `stop()`.
  void serve();
  /// Safe from any thread, before or during `serve()`.
  void stop();

 private:
  std::mutex& page_lock(const std::string& id);
  void routes();

  TagServerConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex state_;
  bool serving_ = false;
  bool stop_requested_ = false;
  std::mutex locks_guard_;
  std::map<std::string, std::unique_ptr<std::mutex>> page_locks_;
};

/// Plain GET (no script execution); follows redirects. Throws Error on
/// transport failure or a non-2xx status.
std::string fetch_url(const std::string& url);

}  // namespace boilerfield
