#include "kdom/server.hpp"

#include <fstream>
#include <iostream>
#include <random>

namespace kdom::server {

Response error(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

std::string random_token() {
  static thread_local std::random_device device;
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (int word = 0; word < 4; ++word) {
    std::uint32_t bits = device();
    for (int i = 0; i < 8; ++i, bits >>= 4) out.push_back(digits[bits & 0xF]);
  }
  return out;
}

GameService::GameService(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.notifier) options_.notifier = http_notifier();
  if (options_.log_dir) std::filesystem::create_directories(*options_.log_dir);
  dispatcher_ = std::thread([this] { dispatch_loop(); });
}

GameService::~GameService() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  dispatcher_.join();
}

std::shared_ptr<GameService::Game> GameService::find(const std::string& id) const {
  std::shared_lock lock(games_mutex_);
  const auto it = games_.find(id);
  return it == games_.end() ? nullptr : it->second;
}

Response GameService::create_game(const json& body) {
  if (!body.is_null() && !body.is_object()) return error(400, "malformed", "body must be a JSON object");
  int players = kPlayers;
  std::optional<std::uint64_t> seed;
  if (body.is_object()) {
    if (body.contains("players")) {
      if (!body["players"].is_number_integer()) return error(400, "malformed", "players must be an integer");
      players = body["players"].get<int>();
    }
    if (body.contains("seed") && !body["seed"].is_null()) {
      const auto& v = body["seed"];
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        return error(400, "malformed", "seed must be a non-negative integer");
      }
      seed = body["seed"].get<std::uint64_t>();
    }
  }
  if (players != kPlayers) return error(400, "unsupported_players", "only 4-player games are supported");
  if (!seed) {
    std::random_device device;
    seed = (std::uint64_t{device()} << 32) | device();
  }

  auto game = std::make_shared<Game>();
  game->seed = *seed;
  game->state = new_game(*seed);
  {
    std::unique_lock lock(games_mutex_);
    // The counter keeps ids distinct; the suffix keeps log files from
    // different server runs apart.
    game->id = "g" + std::to_string(next_id_++) + "-" + random_token().substr(0, 8);
    log_line(*game, {{"event", "create"}, {"gameId", game->id}, {"seed", game->seed}});
    games_[game->id] = game;
  }
  return {201, {{"gameId", game->id}, {"status", wire::to_string(game->status)}}};
}

Response GameService::list_games() const {
  json games = json::array();
  std::shared_lock lock(games_mutex_);
  for (const auto& [id, g] : games_) {
    std::lock_guard game_lock(g->mutex);
    games.push_back({{"gameId", id},
                     {"status", wire::to_string(g->status)},
                     {"players", g->tokens.size()}});
  }
  return {200, {{"games", games}}};
}

Response GameService::join(const std::string& id) {
  const auto g = find(id);
  if (!g) return error(404, "unknown_game", "no game '" + id + "'");
  std::lock_guard lock(g->mutex);
  if (g->status != wire::Status::Waiting) return error(409, "game_full", "game already has 4 players");
  const int player = static_cast<int>(g->tokens.size());
  g->tokens.push_back(random_token());
  if (g->tokens.size() == kPlayers) {
    g->status = wire::Status::Running;
    maybe_notify(*g);
  }
  return {200, {{"gameId", id}, {"token", g->tokens.back()}, {"player", player}}};
}

Response GameService::state(const std::string& id) const {
  const auto g = find(id);
  if (!g) return error(404, "unknown_game", "no game '" + id + "'");
  std::lock_guard lock(g->mutex);
  json doc = wire::state_document(id, g->status, g->state);
  doc["players"] = g->tokens.size();
  if (g->status == wire::Status::Finished) {
    // The deal is no longer secret once the game is over.
    doc["seed"] = g->seed;
    json history = json::array();
    for (const auto& h : g->history) history.push_back({{"player", h.player}, {"move", wire::move_to_json(h.move)}});
    doc["history"] = history;
  }
  return {200, doc};
}

std::optional<int> GameService::player_for(const Game& g, const json& body, Response& err) const {
  const auto it = body.find("token");
  if (it == body.end() || !it->is_string()) {
    err = error(400, "malformed", "token missing");
    return std::nullopt;
  }
  for (std::size_t p = 0; p < g.tokens.size(); ++p) {
    if (g.tokens[p] == it->get<std::string>()) return static_cast<int>(p);
  }
  err = error(403, "bad_token", "token does not belong to this game");
  return std::nullopt;
}

Response GameService::post_move(const std::string& id, const json& body) {
  const auto g = find(id);
  if (!g) return error(404, "unknown_game", "no game '" + id + "'");
  if (!body.is_object()) return error(400, "malformed", "body must be a JSON object");
  Move move;
  try {
    move = wire::move_from_json(body);
  } catch (const wire::WireError& e) {
    return error(400, "malformed", e.what());
  }

  std::lock_guard lock(g->mutex);
  Response err;
  const auto player = player_for(*g, body, err);
  if (!player) return err;
  if (g->status != wire::Status::Running) return error(409, "not_running", "game is " + wire::to_string(g->status));
  if (g->state.current_player() != *player) return error(409, "not_your_turn", "it is not your turn");
  if (!is_legal(g->state, move)) return error(422, "illegal_move", "illegal move " + to_string(move));

  apply_move_unchecked(g->state, move);
  g->history.push_back({*player, move});
  log_line(*g, {{"event", "move"}, {"player", *player}, {"move", wire::move_to_json(move)}});
  if (g->state.finished) {
    g->status = wire::Status::Finished;
    log_line(*g, {{"event", "finish"}, {"scores", scores(g->state)}});
  }
  maybe_notify(*g);
  return {200, wire::state_document(id, g->status, g->state)};
}

Response GameService::register_callback(const std::string& id, const json& body) {
  const auto g = find(id);
  if (!g) return error(404, "unknown_game", "no game '" + id + "'");
  if (!body.is_object()) return error(400, "malformed", "body must be a JSON object");
  const auto url = body.find("url");
  if (url == body.end() || !url->is_string()) return error(400, "malformed", "url missing");
  const std::string& u = url->get_ref<const std::string&>();
  const auto rest = u.starts_with("http://") ? u.substr(7) : std::string();
  if (rest.empty() || rest.front() == '/' || rest.front() == ':') return error(400, "malformed", "url must be http://host[:port][/path]");

  std::lock_guard lock(g->mutex);
  Response err;
  const auto player = player_for(*g, body, err);
  if (!player) return err;
  g->callbacks[*player] = u;
  // A seat that registers on its own turn is told straight away.
  maybe_notify(*g);
  return {200, {{"gameId", id}, {"player", *player}, {"url", u}}};
}

std::optional<std::pair<GameState, std::vector<HistoryEntry>>> GameService::inspect(const std::string& id) const {
  const auto g = find(id);
  if (!g) return std::nullopt;
  std::lock_guard lock(g->mutex);
  return std::make_pair(g->state, g->history);
}

void GameService::maybe_notify(Game& g) {
  if (g.status != wire::Status::Running) return;
  const auto ply = static_cast<long>(g.history.size());
  const int player = g.state.current_player();
  const auto it = g.callbacks.find(player);
  if (it == g.callbacks.end() || g.notified_ply >= ply) return;
  g.notified_ply = ply;
  json payload = {{"gameId", g.id}, {"player", player}, {"round", g.state.round}, {"ply", ply}};
  {
    std::lock_guard lock(queue_mutex_);
    queue_.emplace_back(it->second, std::move(payload));
  }
  queue_cv_.notify_one();
}

void GameService::dispatch_loop() {
  std::unique_lock lock(queue_mutex_);
  while (true) {
    queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) return;  // stopping with nothing left
    auto [url, payload] = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    bool ok = false;
    try {
      ok = options_.notifier(url, payload);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) std::clog << "kdom-server: callback to " << url << " failed for " << payload.dump() << '\n';
    lock.lock();
    busy_ = false;
    idle_cv_.notify_all();
  }
}

void GameService::flush_notifications() {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void GameService::log_line(const Game& g, const json& line) const {
  if (!options_.log_dir) return;
  std::ofstream out(*options_.log_dir / (g.id + ".jsonl"), std::ios::app);
  out << line.dump() << '\n';
}

}  // namespace kdom::server
