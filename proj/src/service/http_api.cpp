#include "bdiplay/http_api.hpp"

#include "httplib.h"

namespace bdiplay::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, {{"code", code}, {"message", message}}, status);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ServiceError(400, "bad_request", "body must be a JSON object");
    return j;
}

// Runs `fn`, mapping failures onto {code, message} responses.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.status(), e.code(), e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::invalid_argument& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

story::Action action_from_body(const json& body) {
    if (body.contains("key")) {
        auto a = story::parse_action_key(body.at("key").get<std::string>());
        if (!a) throw ServiceError(400, "bad_request", "unparseable action key");
        return *a;
    }
    return action_from_json(body);
}

json actions_json(const std::vector<story::Action>& actions) {
    json out = json::array();
    for (const auto& a : actions) {
        auto ja = bdiplay::to_json(a);
        ja["key"] = a.key();
        out.push_back(ja);
    }
    return out;
}

}  // namespace

HttpApi::HttpApi(SessionStore& store, std::optional<std::filesystem::path> static_dir)
    : store_(store), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    // The library default adds SO_REUSEPORT, which lets a second server share a
    // port that is already in use.
    srv.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });

    srv.Get("/api/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

    srv.Get("/api/stories", guarded([this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto* def : store_.stories().all())
            out.push_back({{"id", def->id()}, {"title", def->title()}, {"start", def->start().value_or("")}});
        send_json(res, out);
    }));

    srv.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        if (!body.contains("story")) throw ServiceError(400, "bad_request", "missing 'story'");
        std::optional<std::string> prior;
        if (body.contains("prior_session") && !body["prior_session"].is_null())
            prior = body["prior_session"].get<std::string>();
        auto s = store_.create_session(body["story"].get<std::string>(), prior);
        send_json(res, to_json(store_.get_state(s.id)), 201);
    }));

    srv.Get(R"(/api/sessions/([A-Za-z0-9_-]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, to_json(store_.get_state(req.matches[1])));
    }));

    srv.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/actions)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, {{"actions", actions_json(store_.available(req.matches[1]))}});
            }));

    srv.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/actions)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 std::optional<std::string> token;
                 if (req.has_header("Idempotency-Key")) token = req.get_header_value("Idempotency-Key");
                 else if (body.contains("idempotency_key")) token = body["idempotency_key"].get<std::string>();
                 auto r = store_.post_action(req.matches[1], action_from_body(body), token);
                 send_json(res, {{"triggered", r.triggered}, {"view", to_json(r.view)}, {"replayed", r.replayed}});
             }));

    srv.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/questionnaire)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto body = parse_body(req);
                 if (!body.contains("answers") || !body["answers"].is_array())
                     throw ServiceError(400, "invalid_answers", "'answers' must be an array of integers");
                 std::vector<int> answers;
                 for (const auto& a : body["answers"]) {
                     if (!a.is_number_integer()) throw ServiceError(400, "invalid_answers", "answers must be integers");
                     answers.push_back(a.get<int>());
                 }
                 std::optional<bool> familiar;
                 if (body.contains("familiar") && !body["familiar"].is_null()) familiar = body["familiar"].get<bool>();
                 send_json(res, profile_export(store_.post_questionnaire(req.matches[1], answers, familiar)));
             }));

    srv.Get("/api/traces", guarded([this](const httplib::Request& req, httplib::Response& res) {
        TraceFilter filter;
        if (req.has_param("story")) filter.story_id = req.get_param_value("story");
        if (req.has_param("finished")) {
            auto v = req.get_param_value("finished");
            filter.finished_only = v == "1" || v == "true";
        }
        std::string out;
        for (const auto& t : store_.export_human_traces(filter)) out += trace_line(t) + "\n";
        res.set_content(out, "application/x-ndjson");
    }));

    if (static_dir) srv.set_mount_point("/", static_dir->string());

    srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send_error(res, res.status, res.status == 404 ? "not_found" : "error", "request failed");
    });
}

HttpApi::~HttpApi() { stop(); }

bool HttpApi::bind(const std::string& host, int port) {
    if (port <= 0 || port > 65535) return false;
    return server_->bind_to_port(host, port);
}

int HttpApi::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpApi::serve() { return server_->listen_after_bind(); }

void HttpApi::stop() {
    if (server_) server_->stop();
}

bool HttpApi::running() const { return server_->is_running(); }

}  // namespace bdiplay::service
