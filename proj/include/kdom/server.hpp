#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kdom/game.hpp"
#include "kdom/wire.hpp"

namespace kdom::server {

using nlohmann::json;

/// HTTP status plus JSON body. Errors carry {"error": code, "message": text}.
struct Response {
  int status = 200;
  json body;
};

/// Error codes and their HTTP statuses.
///   malformed 400, bad_token 403, unknown_game 404, game_full 409,
///   not_running 409, not_your_turn 409, illegal_move 422
Response error(int status, const std::string& code, const std::string& message);

struct HistoryEntry {
  int player;
  Move move;
};

/// Sends callback notifications. The default posts JSON over HTTP with short
/// timeouts; tests substitute their own.
using Notifier = std::function<bool(const std::string& url, const json& payload)>;
Notifier http_notifier();

struct ServiceOptions {
  std::optional<std::filesystem::path> log_dir;  // one JSON-lines file per game
  Notifier notifier;                             // empty: http_notifier()
};

/// All games of one server process. Thread-safe; requests on one game are
/// serialised by that game's mutex.
class GameService {
 public:
  explicit GameService(ServiceOptions options = {});
  ~GameService();
  GameService(const GameService&) = delete;
  GameService& operator=(const GameService&) = delete;

  Response create_game(const json& body);
  Response list_games() const;
  Response join(const std::string& id);
  Response state(const std::string& id) const;
  Response post_move(const std::string& id, const json& body);
  Response register_callback(const std::string& id, const json& body);

  /// Snapshot of a game's engine state and history, for replay checks.
  std::optional<std::pair<GameState, std::vector<HistoryEntry>>> inspect(const std::string& id) const;

  /// Blocks until every queued notification has been attempted.
  void flush_notifications();

 private:
  struct Game {
    std::string id;
    std::uint64_t seed = 0;
    GameState state;
    wire::Status status = wire::Status::Waiting;
    std::vector<std::string> tokens;                    // index = player
    std::map<int, std::string> callbacks;               // player -> url
    std::vector<HistoryEntry> history;
    long notified_ply = -1;                             // last ply a notification was queued for
    mutable std::mutex mutex;
  };

  std::shared_ptr<Game> find(const std::string& id) const;
  std::optional<int> player_for(const Game& g, const json& body, Response& err) const;
  void maybe_notify(Game& g);
  void log_line(const Game& g, const json& line) const;
  void dispatch_loop();

  ServiceOptions options_;
  mutable std::shared_mutex games_mutex_;
  std::map<std::string, std::shared_ptr<Game>> games_;
  std::uint64_t next_id_ = 1;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::pair<std::string, json>> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread dispatcher_;
};

/// 128 random bits as 32 lowercase hex digits.
std::string random_token();

}  // namespace kdom::server
