#pragma once

#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "kdom/server.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace kdom::server {

/// REST front end for a GameService:
///   POST /games                 {"players": 4, "seed"?: n}
///   GET  /games
///   POST /games/{id}/join
///   GET  /games/{id}/state
///   POST /games/{id}/moves      move document plus "token"
///   POST /games/{id}/callback   {"token": t, "url": "http://..."}
class HttpServer {
 public:
  explicit HttpServer(GameService& service);
  ~HttpServer();

  /// Binds to host:port; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

/// Blocking client for the REST interface. Transport failures throw
/// std::runtime_error; HTTP error statuses are returned.
class Client {
 public:
  explicit Client(const std::string& base_url);
  ~Client();

  Response create_game(std::optional<std::uint64_t> seed = std::nullopt);
  Response list_games();
  Response join(const std::string& id);
  Response state(const std::string& id);
  Response post_move(const std::string& id, const std::string& token, const Move& move);
  Response post_raw(const std::string& path, const std::string& body);
  Response register_callback(const std::string& id, const std::string& token, const std::string& url);

 private:
  std::unique_ptr<httplib::Client> http_;
};

}  // namespace kdom::server
