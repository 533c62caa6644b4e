#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "doctest.h"
#include "httplib.h"
#include "kdom/http.hpp"
#include "kdom/server.hpp"
#include "kdom/wire.hpp"
#include "test_util.hpp"

using namespace kdom;
using namespace kdom::server;
using wire::json;

namespace {

struct RecordingNotifier {
  std::mutex mutex;
  std::map<std::string, std::vector<json>> calls;  // url -> payloads
  bool succeed = true;

  Notifier notifier() {
    return [this](const std::string& url, const json& payload) {
      std::lock_guard lock(mutex);
      calls[url].push_back(payload);
      return succeed;
    };
  }
};

struct Seats {
  std::string id;
  std::vector<std::string> tokens;
};

Seats open_game(GameService& service, std::uint64_t seed) {
  const auto created = service.create_game({{"players", 4}, {"seed", seed}});
  REQUIRE(created.status == 201);
  Seats seats{created.body["gameId"], {}};
  for (int p = 0; p < kPlayers; ++p) {
    const auto joined = service.join(seats.id);
    REQUIRE(joined.status == 200);
    CHECK(joined.body["player"] == p);
    seats.tokens.push_back(joined.body["token"]);
  }
  return seats;
}

json move_body(const Move& m, const std::string& token) {
  json body = wire::move_to_json(m);
  body["token"] = token;
  return body;
}

// Plays random legal moves through the service until the game ends.
void play_out(GameService& service, const Seats& seats, Rng& rng) {
  while (true) {
    const auto doc = service.state(seats.id).body;
    if (doc["status"] == "finished") return;
    const int player = doc["currentPlayer"];
    const auto& moves = doc["possibleMoves"];
    const json& pick = moves[rng.below(static_cast<std::uint32_t>(moves.size()))];
    json body = pick;
    body["token"] = seats.tokens[static_cast<std::size_t>(player)];
    REQUIRE(service.post_move(seats.id, body).status == 200);
  }
}

GameState replay(std::uint64_t seed, const std::vector<HistoryEntry>& history) {
  GameState s = new_game(seed);
  for (const auto& h : history) {
    REQUIRE(s.current_player() == h.player);
    s = apply_move(s, h.move);
  }
  return s;
}

}  // namespace

TEST_CASE("move documents round-trip") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const GameState s = testing::random_midgame(seed);
    if (s.finished) continue;
    for (const auto& m : legal_moves(s)) CHECK(wire::move_from_json(wire::move_to_json(m)) == m);
  }
  const auto place = json::parse(R"({"placement": {"tile1": {"x": 1, "y": 0}, "tile2": {"x": 2, "y": 0}}, "selection": 7})");
  const Move m = wire::move_from_json(place);
  CHECK(m.kind == PlacementKind::Place);
  CHECK(m.placement.a == Position{1, 0});
  CHECK(m.placement.b == Position{2, 0});
  CHECK(m.selection == 7);
  CHECK(wire::move_from_json(json::parse(R"({"placement": "discard", "selection": null})")) == Move::discard());
  CHECK(wire::move_from_json(json::parse(R"({"placement": null, "selection": 12})")) == Move::select(12));
}

TEST_CASE("malformed move documents are rejected") {
  for (const char* bad : {R"([])", R"({})", R"({"placement": null})", R"({"selection": 3})",
                          R"({"placement": "pass", "selection": 3})", R"({"placement": null, "selection": 49})",
                          R"({"placement": null, "selection": "3"})", R"({"placement": {"tile1": {"x": 1}}, "selection": 1})",
                          R"({"placement": {"tile1": {"x": 1, "y": 0}, "tile2": {"x": 1000, "y": 0}}, "selection": 1})",
                          R"({"placement": 5, "selection": 1})"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(wire::move_from_json(json::parse(bad)), wire::WireError);
  }
}

TEST_CASE("state documents carry the full public state") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    Rng rng(seed);
    const int plies = static_cast<int>(rng.below(kRounds * kPlayers + 1));
    int played = 0;
    const GameState s = testing::play_random(new_game(seed), rng, [&](const GameState&) { return played++ >= plies; });
    const auto status = s.finished ? wire::Status::Finished : wire::Status::Running;
    const json doc = wire::state_document("g", status, s);
    for (const char* key : {"gameId", "status", "round", "currentPlayer", "kingdoms", "scores", "previousDraft",
                            "currentDraft", "possibleMoves", "usedDominoes"}) {
      CHECK(doc.contains(key));
    }
    CHECK(doc.dump().find("seed") == std::string::npos);

    std::vector<Move> from_doc;
    for (const auto& m : doc["possibleMoves"]) from_doc.push_back(wire::move_from_json(m));
    CHECK(from_doc == (s.finished ? std::vector<Move>{} : legal_moves(s)));
    CHECK(doc["scores"].size() == kPlayers);
    for (std::size_t p = 0; p < kPlayers; ++p) {
      CHECK(doc["scores"][p]["total"] == score_kingdom(s.kingdoms[p], s.finished).total);
    }

    // The document alone rebuilds what an in-process agent would see.
    CHECK(wire::state_from_document(doc) == public_view(s));
  }
}

TEST_CASE("a waiting game shows no drafts") {
  const json doc = wire::state_document("g", wire::Status::Waiting, new_game(1));
  CHECK(doc["status"] == "waiting");
  CHECK(doc["currentDraft"].empty());
  CHECK(doc["previousDraft"].empty());
  CHECK(doc["possibleMoves"].empty());
  CHECK(doc["currentPlayer"].is_null());
  CHECK_THROWS_AS(wire::state_from_document(doc), wire::WireError);
}

TEST_CASE("inconsistent state documents are rejected") {
  const GameState s = testing::random_midgame(40);
  REQUIRE_FALSE(s.finished);
  const json good = wire::state_document("g", wire::Status::Running, s);
  auto tweak = [&](auto&& edit) {
    json doc = good;
    edit(doc);
    return doc;
  };
  CHECK_THROWS_AS(wire::state_from_document(tweak([](json& d) { d.erase("kingdoms"); })), wire::WireError);
  CHECK_THROWS_AS(wire::state_from_document(tweak([](json& d) { d["currentPlayer"] = 9; })), wire::WireError);
  CHECK_THROWS_AS(wire::state_from_document(tweak([](json& d) { d["status"] = "paused"; })), wire::WireError);
  CHECK_THROWS_AS(wire::state_from_document(tweak([](json& d) { d["usedDominoes"].push_back(0); })), wire::WireError);
  CHECK_THROWS_AS(wire::state_from_document(tweak([](json& d) {
                    d["kingdoms"][0]["tiles"].push_back({{"x", 0}, {"y", 0}, {"terrain", "wheat"}, {"crowns", 0}});
                  })),
                  wire::WireError);
}

TEST_CASE("game lifecycle") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});

  const auto a = service.create_game({{"players", 4}});
  const auto b = service.create_game(nullptr);
  REQUIRE(a.status == 201);
  REQUIRE(b.status == 201);
  CHECK(a.body["status"] == "waiting");
  CHECK(a.body["gameId"] != b.body["gameId"]);
  CHECK(service.create_game({{"players", 3}}).status == 400);
  CHECK(service.create_game({{"players", "four"}}).status == 400);
  CHECK(service.create_game(json::array()).status == 400);
  CHECK(service.create_game({{"seed", -1}}).status == 400);
  CHECK(service.create_game({{"seed", 5}}).status == 201);

  const auto listed = service.list_games().body["games"];
  std::set<std::string> ids;
  for (const auto& g : listed) ids.insert(g["gameId"]);
  CHECK(ids.count(a.body["gameId"]) == 1);
  CHECK(ids.count(b.body["gameId"]) == 1);

  const std::string id = a.body["gameId"];
  CHECK(service.state(id).body["status"] == "waiting");
  std::set<std::string> tokens;
  for (int p = 0; p < kPlayers; ++p) {
    const auto j = service.join(id);
    REQUIRE(j.status == 200);
    CHECK(j.body["token"].get<std::string>().size() == 32);
    tokens.insert(j.body["token"]);
  }
  CHECK(tokens.size() == 4);
  const auto full = service.join(id);
  CHECK(full.status == 409);
  CHECK(full.body["error"] == "game_full");

  const auto running = service.state(id).body;
  CHECK(running["status"] == "running");
  CHECK(running["round"] == 1);
  CHECK(running["currentPlayer"] == 0);
  CHECK(running["possibleMoves"].size() == 4);

  CHECK(service.state("nope").status == 404);
  CHECK(service.join("nope").status == 404);
  CHECK(service.post_move("nope", move_body(Move::select(1), "t")).status == 404);
}

TEST_CASE("move errors are distinguishable and leave the state alone") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});
  const Seats seats = open_game(service, 5);
  const json before = service.state(seats.id).body;
  const Move legal = wire::move_from_json(before["possibleMoves"][0]);

  const auto bad_token = service.post_move(seats.id, move_body(legal, "0123456789abcdef0123456789abcdef"));
  CHECK(bad_token.status == 403);
  CHECK(bad_token.body["error"] == "bad_token");

  const auto wrong_turn = service.post_move(seats.id, move_body(legal, seats.tokens[1]));
  CHECK(wrong_turn.status == 409);
  CHECK(wrong_turn.body["error"] == "not_your_turn");

  int undrafted = 1;
  while (before["currentDraft"].dump().find("\"domino\":" + std::to_string(undrafted) + ",") != std::string::npos) ++undrafted;
  const auto illegal = service.post_move(seats.id, move_body(Move::select(undrafted), seats.tokens[0]));
  CHECK(illegal.status == 422);
  CHECK(illegal.body["error"] == "illegal_move");
  const auto placing_in_round_1 =
      service.post_move(seats.id, move_body(Move::place({Position{1, 0}, Position{2, 0}}, legal.selection), seats.tokens[0]));
  CHECK(placing_in_round_1.status == 422);

  const auto malformed = service.post_move(seats.id, {{"token", seats.tokens[0]}, {"placement", 3}});
  CHECK(malformed.status == 400);
  CHECK(malformed.body["error"] == "malformed");
  CHECK(service.post_move(seats.id, json::array()).status == 400);
  CHECK(service.post_move(seats.id, wire::move_to_json(legal)).status == 400);  // no token

  CHECK(service.state(seats.id).body == before);
  CHECK(service.post_move(seats.id, move_body(legal, seats.tokens[0])).status == 200);
  CHECK(service.state(seats.id).body["currentPlayer"] == 1);
}

TEST_CASE("a full game replays exactly from its seed and history") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Seats seats = open_game(service, seed);
    Rng rng(seed);
    play_out(service, seats, rng);
    const auto [final_state, history] = *service.inspect(seats.id);
    CHECK(final_state.finished);
    CHECK(history.size() == kRounds * kPlayers);
    CHECK(final_state.pile_size() == 0);
    CHECK(replay(seed, history) == final_state);

    const json doc = service.state(seats.id).body;
    CHECK(doc["status"] == "finished");
    CHECK(doc["possibleMoves"].empty());
    CHECK(doc["seed"] == seed);
    CHECK(doc["history"].size() == history.size());
    CHECK(doc["usedDominoes"].size() == 48);
    for (std::size_t p = 0; p < kPlayers; ++p) CHECK(doc["scores"][p]["total"] == scores(final_state)[p]);

    const auto late = service.post_move(seats.id, move_body(Move::select(1), seats.tokens[0]));
    CHECK(late.status == 409);
    CHECK(late.body["error"] == "not_running");
  }
}

TEST_CASE("callbacks fire once per own turn") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});
  const auto created = service.create_game({{"seed", 21}});
  const std::string id = created.body["gameId"];
  std::vector<std::string> tokens;
  for (int p = 0; p < kPlayers; ++p) tokens.push_back(service.join(id).body["token"]);
  // Seats 0..2 register; seat 3 never does.
  for (int p = 0; p < 3; ++p) {
    const auto r = service.register_callback(id, {{"token", tokens[static_cast<std::size_t>(p)]}, {"url", "http://agent/" + std::to_string(p)}});
    CHECK(r.status == 200);
  }
  CHECK(service.register_callback(id, {{"token", "nope"}, {"url", "http://agent/x"}}).status == 403);
  CHECK(service.register_callback(id, {{"token", tokens[3]}, {"url", "ftp://agent"}}).status == 400);
  CHECK(service.register_callback(id, {{"token", tokens[3]}}).status == 400);

  Rng rng(3);
  play_out(service, {id, tokens}, rng);
  service.flush_notifications();
  std::lock_guard lock(rec.mutex);
  for (int p = 0; p < 3; ++p) {
    const auto& calls = rec.calls["http://agent/" + std::to_string(p)];
    CHECK(calls.size() == kRounds);
    std::set<long> plies;
    for (const auto& c : calls) {
      CHECK(c["player"] == p);
      plies.insert(c["ply"].get<long>());
    }
    CHECK(plies.size() == kRounds);
  }
  CHECK(rec.calls.size() == 3);
}

TEST_CASE("registering on your own turn notifies at once") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});
  const Seats seats = open_game(service, 8);
  CHECK(service.register_callback(seats.id, {{"token", seats.tokens[0]}, {"url", "http://me"}}).status == 200);
  // Registering again in the same turn does not repeat the notification.
  CHECK(service.register_callback(seats.id, {{"token", seats.tokens[0]}, {"url", "http://me"}}).status == 200);
  service.flush_notifications();
  std::lock_guard lock(rec.mutex);
  CHECK(rec.calls["http://me"].size() == 1);
}

TEST_CASE("failing callbacks do not disturb the game") {
  RecordingNotifier rec;
  rec.succeed = false;
  GameService service({std::nullopt, rec.notifier()});
  const Seats seats = open_game(service, 9);
  for (const auto& t : seats.tokens) service.register_callback(seats.id, {{"token", t}, {"url", "http://down"}});
  Rng rng(4);
  play_out(service, seats, rng);
  service.flush_notifications();
  CHECK(service.state(seats.id).body["status"] == "finished");
}

TEST_CASE("random request streams never break engine invariants") {
  RecordingNotifier rec;
  GameService service({std::nullopt, rec.notifier()});
  Rng rng(2024);
  for (int game = 0; game < 6; ++game) {
    const Seats seats = open_game(service, 100 + static_cast<std::uint64_t>(game));
    // Moves borrowed from unrelated states make plausible but mostly illegal requests.
    const GameState other = testing::random_midgame(500 + static_cast<std::uint64_t>(game));
    const auto foreign = other.finished ? std::vector<Move>{Move::select(3)} : legal_moves(other);
    int accepted = 0;
    for (int step = 0; step < 400; ++step) {
      const json doc = service.state(seats.id).body;
      if (doc["status"] == "finished") break;
      json body;
      switch (rng.below(5)) {
        case 0: body = doc["possibleMoves"][rng.below(static_cast<std::uint32_t>(doc["possibleMoves"].size()))]; break;
        case 1: body = wire::move_to_json(foreign[rng.below(static_cast<std::uint32_t>(foreign.size()))]); break;
        case 2: body = {{"placement", {{"tile1", {{"x", static_cast<int>(rng.below(11)) - 5}, {"y", 0}}},
                                       {"tile2", {{"x", static_cast<int>(rng.below(11)) - 5}, {"y", 1}}}}},
                        {"selection", rng.below(50)}};
                break;
        case 3: body = {{"placement", "discard"}, {"selection", nullptr}}; break;
        default: body = {{"junk", true}}; break;
      }
      body["token"] = rng.below(8) == 0 ? std::string("forged") : seats.tokens[rng.below(4)];
      const auto r = service.post_move(seats.id, body);
      CHECK((r.status == 200 || r.status == 400 || r.status == 403 || r.status == 409 || r.status == 422));
      accepted += r.status == 200 ? 1 : 0;
      const auto snapshot = service.inspect(seats.id);
      CHECK_NOTHROW(check_invariants(snapshot->first));
      CHECK(static_cast<int>(snapshot->second.size()) == accepted);
    }
    const auto [state, history] = *service.inspect(seats.id);
    CHECK(replay(100 + static_cast<std::uint64_t>(game), history) == state);
  }
}

TEST_CASE("game logs record seed and history") {
  const auto dir = std::filesystem::temp_directory_path() / ("kdom-log-" + random_token().substr(0, 8));
  RecordingNotifier rec;
  std::string id;
  {
    GameService service({dir, rec.notifier()});
    const Seats seats = open_game(service, 77);
    id = seats.id;
    Rng rng(77);
    play_out(service, seats, rng);
  }
  std::ifstream in(dir / (id + ".jsonl"));
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  const json header = json::parse(line);
  CHECK(header["event"] == "create");
  CHECK(header["seed"] == 77);
  GameState s = new_game(header["seed"]);
  int moves = 0;
  json last;
  while (std::getline(in, line)) {
    last = json::parse(line);
    if (last["event"] != "move") break;
    CHECK(last["player"] == s.current_player());
    s = apply_move(s, wire::move_from_json(last["move"]));
    ++moves;
  }
  CHECK(moves == kRounds * kPlayers);
  CHECK(last["event"] == "finish");
  CHECK(last["scores"] == json(scores(s)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("the REST interface serves a full game") {
  GameService service;
  HttpServer http(service);
  const int port = http.bind("127.0.0.1", 0);
  http.start();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  // A callback receiver counting notifications per seat.
  httplib::Server receiver;
  std::mutex seen_mutex;
  std::map<int, int> seen;
  receiver.Post("/turn", [&](const httplib::Request& req, httplib::Response& res) {
    const auto doc = json::parse(req.body);
    std::lock_guard lock(seen_mutex);
    ++seen[doc["player"].get<int>()];
    res.set_content("{}", "application/json");
  });
  const int receiver_port = receiver.bind_to_any_port("127.0.0.1");
  std::thread receiver_thread([&] { receiver.listen_after_bind(); });
  receiver.wait_until_ready();

  auto owned = std::make_unique<Client>(base);
  Client& client = *owned;
  const auto created = client.create_game(31);
  REQUIRE(created.status == 201);
  const std::string id = created.body["gameId"];
  std::vector<std::string> tokens;
  for (int p = 0; p < kPlayers; ++p) tokens.push_back(client.join(id).body["token"]);
  CHECK(client.join(id).status == 409);
  CHECK(client.state("missing").status == 404);
  CHECK(client.post_raw("/games/" + id + "/moves", "{not json").status == 400);
  CHECK(client.post_raw("/nowhere", "{}").status == 404);

  const std::string hook = "http://127.0.0.1:" + std::to_string(receiver_port) + "/turn";
  CHECK(client.register_callback(id, tokens[0], hook).status == 200);
  CHECK(client.register_callback(id, tokens[1], hook).status == 200);
  // Nothing listens on port 1; the game must not care.
  CHECK(client.register_callback(id, tokens[2], "http://127.0.0.1:1/turn").status == 200);

  const auto first = client.state(id).body;
  const Move m0 = wire::move_from_json(first["possibleMoves"][0]);
  CHECK(client.post_move(id, "forged", m0).status == 403);
  CHECK(client.post_move(id, tokens[3], m0).status == 409);
  CHECK(client.post_move(id, tokens[0], Move::place({Position{1, 0}, Position{2, 0}}, m0.selection)).status == 422);

  Rng rng(31);
  std::vector<HistoryEntry> history;
  while (true) {
    const auto doc = client.state(id).body;
    if (doc["status"] == "finished") break;
    const GameState view = wire::state_from_document(doc);
    const Move m = random_move(view, rng);
    const int player = doc["currentPlayer"];
    REQUIRE(client.post_move(id, tokens[static_cast<std::size_t>(player)], m).status == 200);
    history.push_back({player, m});
  }
  const auto final_doc = client.state(id).body;
  const GameState replayed = replay(31, history);
  CHECK(replayed == service.inspect(id)->first);
  CHECK(wire::state_document(id, wire::Status::Finished, replayed)["kingdoms"] == final_doc["kingdoms"]);
  CHECK(final_doc["history"].size() == history.size());

  service.flush_notifications();
  {
    std::lock_guard lock(seen_mutex);
    CHECK(seen[0] == kRounds);
    CHECK(seen[1] == kRounds);
    CHECK(seen.count(2) == 0);
    CHECK(seen.count(3) == 0);
  }
  owned.reset();  // close the keep-alive connection so stop() need not wait it out
  receiver.stop();
  receiver_thread.join();
  http.stop();
}
