#include <csignal>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "kdom/http.hpp"

namespace {

kdom::server::HttpServer* running = nullptr;

void on_signal(int) {
  if (running) running->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kingdomino game server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_dir;
  app.add_option("--host", host, "Listen address")->envname("KDOM_SERVER_HOST")->capture_default_str();
  app.add_option("--port", port, "Listen port; 0 picks a free one")
      ->envname("KDOM_SERVER_PORT")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  app.add_option("--log-dir", log_dir, "Directory for per-game JSON-lines logs")->envname("KDOM_LOG_DIR");
  CLI11_PARSE(app, argc, argv);

  try {
    kdom::server::ServiceOptions options;
    if (!log_dir.empty()) options.log_dir = log_dir;
    kdom::server::GameService service(std::move(options));
    kdom::server::HttpServer http(service);
    const int bound = http.bind(host, port);
    std::cout << "listening on http://" << host << ':' << bound << std::endl;
    running = &http;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    http.run();
    running = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
