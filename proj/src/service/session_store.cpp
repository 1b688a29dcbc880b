#include "bdiplay/session.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <random>

namespace bdiplay::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_iso() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ServiceError unknown_session(const std::string& id) { return {404, "unknown_session", "no session '" + id + "'"}; }

}  // namespace

// ---- stories

StoryRegistry StoryRegistry::load_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("story directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    StoryRegistry reg;
    for (const auto& f : files) reg.add(story::load_story_file(f.string()));
    return reg;
}

void StoryRegistry::add(story::StoryDefinition def) {
    auto id = def.id();
    if (stories_.contains(id)) throw std::runtime_error("duplicate story id '" + id + "'");
    stories_.emplace(id, std::make_shared<const story::StoryDefinition>(std::move(def)));
}

const story::StoryDefinition* StoryRegistry::find(std::string_view id) const {
    auto it = stories_.find(id);
    return it == stories_.end() ? nullptr : it->second.get();
}

const story::StoryDefinition& StoryRegistry::get(std::string_view id) const {
    if (auto* d = find(id)) return *d;
    throw ServiceError(404, "unknown_story", "no story '" + std::string(id) + "'");
}

std::vector<const story::StoryDefinition*> StoryRegistry::all() const {
    std::vector<const story::StoryDefinition*> out;
    for (const auto& [id, def] : stories_) out.push_back(def.get());
    return out;
}

// ---- views

std::string new_session_id() {
    static thread_local std::random_device rd;
    static const char* hex = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t word = rd();
        for (int k = 0; k < 8; ++k, word >>= 4) id += hex[word & 0xf];
    }
    return id;
}

SessionView make_view(const story::StoryDefinition& def, const Session& s) {
    SessionView v;
    v.session_id = s.id;
    v.story_id = s.story_id;
    v.game_index = s.game_index;
    v.location = s.state.current_location;
    if (const auto* loc = def.location(s.state.current_location)) v.description = loc->description;
    v.items = story::visible_items(def, s.state);
    v.characters = story::present_characters(def, s.state);
    v.inventory.assign(s.state.inventory.begin(), s.state.inventory.end());
    v.actions = story::available_actions(def, s.state);
    v.discovered_count = s.state.discovered.size();
    v.ending = story::is_terminal(def, s.state);
    v.ended = v.ending.has_value();
    v.tick = s.state.tick;
    v.questionnaire_done = s.questionnaire.has_value();
    return v;
}

json to_json(const SessionView& v) {
    json actions = json::array();
    for (const auto& a : v.actions) {
        auto ja = bdiplay::to_json(a);
        ja["key"] = a.key();
        actions.push_back(ja);
    }
    return {{"session_id", v.session_id},
            {"story", v.story_id},
            {"game_index", v.game_index},
            {"location", v.location},
            {"description", v.description},
            {"items", v.items},
            {"characters", v.characters},
            {"inventory", v.inventory},
            {"actions", actions},
            {"discovered_count", v.discovered_count},
            {"ended", v.ended},
            {"ending", v.ending ? json(*v.ending) : json(nullptr)},
            {"tick", v.tick},
            {"questionnaire_done", v.questionnaire_done}};
}

Trace to_trace(const Session& s) {
    Trace t;
    t.session_id = s.id;
    t.story_id = s.story_id;
    t.agent_kind = AgentKind::Human;
    t.profile_used = s.profile;
    t.actions = s.actions;
    t.plot_points = s.state.discovered;
    t.ending = s.ending;
    return t;
}

// ---- store

struct SessionStore::Entry {
    mutable std::mutex mu;
    Session session;
    const story::StoryDefinition* def = nullptr;
    std::map<std::string, std::vector<std::string>> tokens;  // idempotency token -> triggered
    fs::path file;
};

SessionStore::SessionStore(const StoryRegistry& stories, fs::path data_dir)
    : stories_(stories), dir_(std::move(data_dir)) {
    fs::create_directories(dir_ / "sessions");
    load();
}

SessionStore::~SessionStore() = default;

std::size_t SessionStore::size() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
}

std::shared_ptr<SessionStore::Entry> SessionStore::entry(const std::string& session_id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw unknown_session(session_id);
    return it->second;
}

void SessionStore::append(Entry& e, const json& event) {
    std::ofstream out(e.file, std::ios::app);
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw ServiceError(500, "storage_error", "cannot write " + e.file.string());
}

void SessionStore::load() {
    std::ifstream index(dir_ / "index.jsonl");
    std::string line;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        auto ji = json::parse(line);
        auto e = std::make_shared<Entry>();
        Session& s = e->session;
        s.id = ji.at("id").get<std::string>();
        e->file = dir_ / "sessions" / (s.id + ".jsonl");
        std::ifstream in(e->file);
        if (!in) throw std::runtime_error("session file missing: " + e->file.string());
        std::string ev_line;
        while (std::getline(in, ev_line)) {
            if (ev_line.empty()) continue;
            auto ev = json::parse(ev_line);
            auto type = ev.at("type").get<std::string>();
            if (type == "created") {
                s.story_id = ev.at("story").get<std::string>();
                e->def = &stories_.get(s.story_id);
                s.state = story::initial_state(*e->def);
                s.game_index = ev.at("game_index").get<int>();
                if (ev.contains("prior") && !ev["prior"].is_null()) s.prior_session = ev["prior"].get<std::string>();
                s.created = s.updated = ev.at("time").get<std::string>();
            } else if (type == "action") {
                auto a = action_from_json(ev);
                auto step = story::apply_action(*e->def, s.state, a);
                s.state = std::move(step.new_state);
                if (s.state.tick != ev.at("tick").get<long>())
                    throw std::runtime_error("session " + s.id + ": tick mismatch on replay");
                s.actions.push_back({s.state.tick, a});
                if (ev.contains("token")) e->tokens[ev["token"].get<std::string>()] = step.triggered;
                s.updated = ev.at("time").get<std::string>();
            } else if (type == "questionnaire") {
                s.questionnaire = profile::LikertResponse{ev.at("answers").get<std::vector<int>>()};
                s.profile = profile_from_json(ev.at("profile"));
                s.updated = ev.at("time").get<std::string>();
            } else {
                throw std::runtime_error("session " + s.id + ": unknown event '" + type + "'");
            }
        }
        if (e->def == nullptr) throw std::runtime_error("session " + s.id + " has no creation event");
        s.ending = story::is_terminal(*e->def, s.state);
        order_.push_back(s.id);
        sessions_[s.id] = std::move(e);
    }
}

Session SessionStore::create_session(const std::string& story_id, const std::optional<std::string>& prior_session) {
    const auto& def = stories_.get(story_id);
    auto e = std::make_shared<Entry>();
    Session& s = e->session;
    if (prior_session) {
        auto prior = entry(*prior_session);
        std::lock_guard plock(prior->mu);
        if (prior->session.story_id != story_id)
            throw ServiceError(409, "story_mismatch", "prior session is for another story");
        if (!prior->session.ending)
            throw ServiceError(409, "prior_unfinished", "prior session " + *prior_session + " has not ended");
        s.game_index = prior->session.game_index + 1;
        s.prior_session = prior_session;
        // The profile carries over, with the replay rule applied.
        if (prior->session.questionnaire) {
            s.questionnaire = prior->session.questionnaire;
            s.profile = profile::apply_replay_rule(*prior->session.profile, s.game_index);
        }
    }
    s.story_id = story_id;
    s.state = story::initial_state(def);
    s.created = s.updated = now_iso();
    e->def = &def;

    std::unique_lock lock(mu_);
    do s.id = new_session_id();
    while (sessions_.contains(s.id));
    e->file = dir_ / "sessions" / (s.id + ".jsonl");
    append(*e, {{"type", "created"},
                {"story", story_id},
                {"game_index", s.game_index},
                {"prior", s.prior_session ? json(*s.prior_session) : json(nullptr)},
                {"time", s.created}});
    if (s.questionnaire) {
        append(*e, {{"type", "questionnaire"},
                    {"answers", s.questionnaire->answers},
                    {"profile", bdiplay::to_json(*s.profile)},
                    {"time", s.created}});
    }
    std::ofstream index(dir_ / "index.jsonl", std::ios::app);
    index << json{{"id", s.id}, {"story", story_id}, {"created", s.created}}.dump() << '\n';
    if (!index.flush()) throw ServiceError(500, "storage_error", "cannot write session index");
    order_.push_back(s.id);
    sessions_[s.id] = e;
    return s;
}

Session SessionStore::snapshot(const std::string& session_id) const {
    auto e = entry(session_id);
    std::lock_guard lock(e->mu);
    return e->session;
}

SessionView SessionStore::get_state(const std::string& session_id) const {
    auto e = entry(session_id);
    std::lock_guard lock(e->mu);
    return make_view(*e->def, e->session);
}

std::vector<story::Action> SessionStore::available(const std::string& session_id) const {
    auto e = entry(session_id);
    std::lock_guard lock(e->mu);
    return story::available_actions(*e->def, e->session.state);
}

ActionResult SessionStore::post_action(const std::string& session_id, const story::Action& action,
                                       const std::optional<std::string>& idempotency_token) {
    auto e = entry(session_id);
    std::lock_guard lock(e->mu);
    Session& s = e->session;
    if (idempotency_token) {
        auto it = e->tokens.find(*idempotency_token);
        if (it != e->tokens.end()) return {it->second, make_view(*e->def, s), true};
    }
    if (s.ending) throw ServiceError(409, "session_ended", "session has reached " + *s.ending);
    story::StepResult step;
    try {
        step = story::apply_action(*e->def, s.state, action);
    } catch (const story::IllegalActionError& err) {
        throw ServiceError(409, "illegal_action", err.what());
    }
    json ev = bdiplay::to_json(action);
    ev["type"] = "action";
    ev["tick"] = step.new_state.tick;
    ev["time"] = now_iso();
    if (idempotency_token) ev["token"] = *idempotency_token;
    append(*e, ev);

    s.state = std::move(step.new_state);
    s.actions.push_back({s.state.tick, action});
    s.updated = ev["time"].get<std::string>();
    s.ending = story::is_terminal(*e->def, s.state);
    if (idempotency_token) e->tokens[*idempotency_token] = step.triggered;
    return {step.triggered, make_view(*e->def, s), false};
}

profile::PlayerProfile SessionStore::post_questionnaire(const std::string& session_id, const std::vector<int>& answers,
                                                        std::optional<bool> familiar) {
    const auto& q = profile::Questionnaire::standard();
    profile::LikertResponse r{answers};
    try {
        r.check(q);
    } catch (const profile::InvalidResponseError& err) {
        throw ServiceError(400, "invalid_answers", err.what());
    }
    auto e = entry(session_id);
    std::lock_guard lock(e->mu);
    Session& s = e->session;
    auto built = familiar ? profile::build_profile(q, r, *familiar) : profile::build_profile(q, r);
    auto pp = profile::apply_replay_rule(built, s.game_index);
    auto time = now_iso();
    append(*e, {{"type", "questionnaire"}, {"answers", answers}, {"profile", bdiplay::to_json(pp)}, {"time", time}});
    s.questionnaire = r;
    s.profile = pp;
    s.updated = time;
    return pp;
}

std::vector<Trace> SessionStore::export_human_traces(const TraceFilter& filter) const {
    std::vector<std::shared_ptr<Entry>> entries;
    {
        std::shared_lock lock(mu_);
        for (const auto& id : order_) entries.push_back(sessions_.at(id));
    }
    std::vector<Trace> out;
    for (const auto& e : entries) {
        std::lock_guard lock(e->mu);
        const Session& s = e->session;
        if (filter.story_id && s.story_id != *filter.story_id) continue;
        if (filter.finished_only && !s.ending) continue;
        out.push_back(to_trace(s));
    }
    return out;
}

}  // namespace bdiplay::service
