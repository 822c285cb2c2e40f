#include <httplib.h>

#include "claimwise/service.hpp"

namespace claimwise::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

// Runs a handler, mapping library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    send_error(res, e.status(), e.code(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "invalid-payload", e.what());
  } catch (const ValidationError& e) {
    send_error(res, 400, "validation", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

}  // namespace

std::unique_ptr<httplib::Server> make_http_server(Service& service, std::string token) {
  auto server = std::make_unique<httplib::Server>();

  if (!token.empty()) {
    server->set_pre_routing_handler([token](const httplib::Request& req, httplib::Response& res) {
      if (req.get_header_value("X-Session-Token") != token) {
        send_error(res, 401, "unauthorized", "missing or wrong X-Session-Token");
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });
  }

  server->Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      const auto count = body.at("task_count").get<std::int64_t>();
      if (count < 0) throw ServiceError("invalid-task-count", 400, "task_count must be >= 1");
      const auto session = service.create_session(body.at("annotator_id").get<std::string>(),
                                                  static_cast<std::size_t>(count));
      send_json(res, 201, session);
    });
  });

  server->Get(R"(/sessions/([^/]+)/tasks/(\d+))",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const auto index = std::stoull(req.matches[2].str());
                  send_json(res, 200, service.get_task(req.matches[1].str(), index));
                });
              });

  server->Post("/annotations", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto annotation = json::parse(req.body).get<Annotation>();
      send_json(res, 201, service.submit_annotation(annotation));
    });
  });

  server->Get("/export", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<Mode> mode;
      if (req.has_param("mode") && !req.get_param_value("mode").empty()) {
        mode = mode_from_string(req.get_param_value("mode"));
      }
      const auto records = service.export_preferences(mode);
      std::string body;
      for (const auto& r : records) body += json(r).dump() + "\n";
      if (records.empty()) res.set_header("X-Export-Warning", "empty export");
      res.status = 200;
      res.set_content(body, "application/x-ndjson");
    });
  });

  server->Get("/metrics", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, to_json(service.metrics())); });
  });

  return server;
}

}  // namespace claimwise::service
