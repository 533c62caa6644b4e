#include "kdom/http.hpp"

#include <stdexcept>

#include "httplib.h"

namespace kdom::server {
namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), kJson);
}

// Empty bodies parse as null; anything else must be valid JSON.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json(nullptr);
  auto doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded()) {
    reply(res, error(400, "malformed", "body is not valid JSON"));
    return std::nullopt;
  }
  return doc;
}

Response to_response(const httplib::Result& r) {
  if (!r) throw std::runtime_error("http request failed: " + httplib::to_string(r.error()));
  Response out;
  out.status = r->status;
  out.body = r->body.empty() ? json(nullptr) : json::parse(r->body, nullptr, false);
  if (out.body.is_discarded()) throw std::runtime_error("server sent invalid JSON: " + r->body);
  return out;
}

}  // namespace

Notifier http_notifier() {
  return [](const std::string& url, const json& payload) {
    // url = http://host[:port][/path]
    const auto rest = url.substr(url.find("://") + 3);
    const auto slash = rest.find('/');
    const std::string origin = url.substr(0, url.find("://") + 3) + rest.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
    httplib::Client client(origin);
    client.set_connection_timeout(1, 0);
    client.set_read_timeout(1, 0);
    client.set_write_timeout(1, 0);
    const auto r = client.Post(path, payload.dump(), kJson);
    return r && r->status >= 200 && r->status < 300;
  };
}

HttpServer::HttpServer(GameService& service) : http_(std::make_unique<httplib::Server>()) {
  auto& http = *http_;
  // Without this, keep-alive request/response pairs stall on delayed ACKs.
  http.set_tcp_nodelay(true);
  http.Post("/games", [&service](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, service.create_game(*body));
  });
  http.Get("/games", [&service](const httplib::Request&, httplib::Response& res) { reply(res, service.list_games()); });
  http.Post(R"(/games/([^/]+)/join)", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.join(req.matches[1]));
  });
  http.Get(R"(/games/([^/]+)/state)", [&service](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.state(req.matches[1]));
  });
  http.Post(R"(/games/([^/]+)/moves)", [&service](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, service.post_move(req.matches[1], *body));
  });
  http.Post(R"(/games/([^/]+)/callback)", [&service](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) reply(res, service.register_callback(req.matches[1], *body));
  });
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) reply(res, error(res.status, "not_found", "no such endpoint"));
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    reply(res, error(500, "internal", "internal error"));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = http_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!http_->bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::run() { http_->listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void HttpServer::stop() {
  http_->stop();
  if (thread_.joinable()) thread_.join();
}

Client::Client(const std::string& base_url) : http_(std::make_unique<httplib::Client>(base_url)) {
  http_->set_connection_timeout(5, 0);
  http_->set_read_timeout(60, 0);
  http_->set_keep_alive(true);
  http_->set_tcp_nodelay(true);
}

Client::~Client() = default;

Response Client::create_game(std::optional<std::uint64_t> seed) {
  json body = {{"players", kPlayers}};
  if (seed) body["seed"] = *seed;
  return to_response(http_->Post("/games", body.dump(), kJson));
}

Response Client::list_games() { return to_response(http_->Get("/games")); }

Response Client::join(const std::string& id) { return to_response(http_->Post("/games/" + id + "/join", "", kJson)); }

Response Client::state(const std::string& id) { return to_response(http_->Get("/games/" + id + "/state")); }

Response Client::post_move(const std::string& id, const std::string& token, const Move& move) {
  json body = wire::move_to_json(move);
  body["token"] = token;
  return to_response(http_->Post("/games/" + id + "/moves", body.dump(), kJson));
}

Response Client::post_raw(const std::string& path, const std::string& body) {
  return to_response(http_->Post(path, body, kJson));
}

Response Client::register_callback(const std::string& id, const std::string& token, const std::string& url) {
  return to_response(http_->Post("/games/" + id + "/callback", json{{"token", token}, {"url", url}}.dump(), kJson));
}

}  // namespace kdom::server
