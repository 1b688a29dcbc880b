#pragma once

#include "bdiplay/session.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace bdiplay::service {

// JSON over HTTP:
//   POST /api/sessions                     {story, prior_session?}
//   GET  /api/sessions/{id}                session view
//   GET  /api/sessions/{id}/actions        available actions
//   POST /api/sessions/{id}/actions        {verb, subject, object?} or {key}; Idempotency-Key header
//   POST /api/sessions/{id}/questionnaire  {answers: [10 ints], familiar?}
//   GET  /api/stories
//   GET  /api/traces?story=&finished=      line-delimited traces
//   GET  /api/health
// Errors carry {code, message}. Anything else is served from `static_dir` when given.
class HttpApi {
public:
    explicit HttpApi(SessionStore& store, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    // Binding fails (returns false / -1) when the port is taken or invalid.
    bool bind(const std::string& host, int port);
    int bind_any_port(const std::string& host);
    // Blocks until stop().
    bool serve();
    void stop();
    bool running() const;

private:
    SessionStore& store_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace bdiplay::service
