#pragma once

#include "bdiplay/trace.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdiplay::service {

// Errors surfaced to clients as {code, message} with an HTTP status.
class ServiceError : public std::runtime_error {
public:
    ServiceError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status_(status), code_(std::move(code)) {}
    int status() const { return status_; }
    const std::string& code() const { return code_; }

private:
    int status_;
    std::string code_;
};

class StoryRegistry {
public:
    // Loads every *.json file directly under `dir` as a story.
    static StoryRegistry load_dir(const std::filesystem::path& dir);

    void add(story::StoryDefinition def);
    const story::StoryDefinition* find(std::string_view id) const;
    const story::StoryDefinition& get(std::string_view id) const;  // throws ServiceError
    std::vector<const story::StoryDefinition*> all() const;

private:
    std::map<std::string, std::shared_ptr<const story::StoryDefinition>, std::less<>> stories_;
};

struct Session {
    std::string id;
    std::string story_id;
    story::GameState state;
    std::string created;
    std::string updated;
    int game_index = 1;
    std::optional<std::string> prior_session;
    std::optional<profile::LikertResponse> questionnaire;
    std::optional<profile::PlayerProfile> profile;
    std::vector<TimedAction> actions;
    std::optional<std::string> ending;
};

// What a client may see: undiscovered plot points appear only as a count.
struct SessionView {
    std::string session_id;
    std::string story_id;
    int game_index = 1;
    std::string location;
    std::string description;
    std::vector<std::string> items;
    std::vector<std::string> characters;
    std::vector<std::string> inventory;
    std::vector<story::Action> actions;
    std::size_t discovered_count = 0;
    bool ended = false;
    std::optional<std::string> ending;
    long tick = 0;
    bool questionnaire_done = false;
};

struct ActionResult {
    std::vector<std::string> triggered;
    SessionView view;
    bool replayed = false;  // idempotency token seen before; nothing applied
};

struct TraceFilter {
    std::optional<std::string> story_id;
    bool finished_only = false;
};

// Sessions persisted as append-only event files (<data>/sessions/<id>.jsonl)
// plus an index (<data>/index.jsonl). Opening a store replays every session
// through the engine. Operations on one session are serialized; different
// sessions proceed independently.
class SessionStore {
public:
    SessionStore(const StoryRegistry& stories, std::filesystem::path data_dir);
    ~SessionStore();
    SessionStore(const SessionStore&) = delete;
    SessionStore& operator=(const SessionStore&) = delete;

    const StoryRegistry& stories() const { return stories_; }

    Session create_session(const std::string& story_id, const std::optional<std::string>& prior_session = {});
    Session snapshot(const std::string& session_id) const;
    SessionView get_state(const std::string& session_id) const;
    std::vector<story::Action> available(const std::string& session_id) const;

    ActionResult post_action(const std::string& session_id, const story::Action& action,
                             const std::optional<std::string>& idempotency_token = {});

    // Builds the profile from the answers, then applies the replay rule for the
    // session's game index. `familiar` replaces the familiarity answer.
    profile::PlayerProfile post_questionnaire(const std::string& session_id, const std::vector<int>& answers,
                                              std::optional<bool> familiar = {});

    // Sessions in creation order, formatted as human traces.
    std::vector<Trace> export_human_traces(const TraceFilter& filter = {}) const;

    std::size_t size() const;

private:
    struct Entry;

    std::shared_ptr<Entry> entry(const std::string& session_id) const;
    void load();
    void append(Entry& e, const nlohmann::json& event);

    const StoryRegistry& stories_;
    std::filesystem::path dir_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::vector<std::string> order_;
};

SessionView make_view(const story::StoryDefinition& def, const Session& s);
nlohmann::json to_json(const SessionView& v);
Trace to_trace(const Session& s);

// 128 random bits as 32 lowercase hex characters.
std::string new_session_id();

}  // namespace bdiplay::service
