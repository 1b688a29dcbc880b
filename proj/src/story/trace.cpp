#include "bdiplay/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace bdiplay {

using nlohmann::json;

std::string_view to_string(AgentKind k) {
    switch (k) {
        case AgentKind::Human: return "human";
        case AgentKind::Uninformed: return "uninformed";
        case AgentKind::Informed: return "informed";
    }
    return "?";
}

AgentKind parse_agent_kind(std::string_view s) {
    if (s == "human") return AgentKind::Human;
    if (s == "uninformed") return AgentKind::Uninformed;
    if (s == "informed") return AgentKind::Informed;
    throw std::invalid_argument("unknown agent kind: " + std::string(s));
}

json to_json(const profile::PlayerProfile& p) { return {{"f", p.f}, {"gE", p.gE}, {"pE", p.pE}, {"p", p.p}}; }

profile::PlayerProfile profile_from_json(const json& j) {
    profile::PlayerProfile p{j.at("f").get<double>(), j.at("gE").get<double>(), j.at("pE").get<double>(),
                             j.at("p").get<double>()};
    if (!p.valid()) throw std::invalid_argument("profile factors must lie in [0, 1]");
    return p;
}

json profile_export(const profile::PlayerProfile& p) {
    json j = to_json(p);
    auto b = profile::binarize(p);
    j["binarized"] = {{"f", int(b.f)}, {"gE", int(b.gE)}, {"pE", int(b.pE)}, {"p", int(b.p)}};
    return j;
}

json to_json(const story::Action& a) {
    json j{{"verb", std::string(story::to_string(a.verb))}, {"subject", a.subject}};
    if (a.object) j["object"] = *a.object;
    return j;
}

story::Action action_from_json(const json& j) {
    auto verb = story::parse_verb(j.at("verb").get<std::string>());
    if (!verb) throw std::invalid_argument("unknown verb: " + j.at("verb").get<std::string>());
    story::Action a{*verb, j.at("subject").get<std::string>(), std::nullopt};
    if (j.contains("object") && !j.at("object").is_null()) a.object = j.at("object").get<std::string>();
    if (story::requires_object(a.verb) != a.object.has_value())
        throw std::invalid_argument("action arity mismatch: " + a.key());
    return a;
}

json to_json(const Trace& t) {
    json actions = json::array();
    for (const auto& ta : t.actions) {
        json ja = to_json(ta.action);
        ja["tick"] = ta.tick;
        actions.push_back(std::move(ja));
    }
    return {
        {"session_id", t.session_id},
        {"story", t.story_id},
        {"agent_kind", std::string(to_string(t.agent_kind))},
        {"seed", t.seed ? json(*t.seed) : json(nullptr)},
        {"profile", t.profile_used ? to_json(*t.profile_used) : json(nullptr)},
        {"actions", std::move(actions)},
        {"plot_points", t.plot_points},
        {"ending", t.ending ? json(*t.ending) : json(nullptr)},
    };
}

Trace trace_from_json(const json& j) {
    Trace t;
    t.session_id = j.at("session_id").get<std::string>();
    t.story_id = j.value("story", std::string{});
    t.agent_kind = parse_agent_kind(j.at("agent_kind").get<std::string>());
    if (j.contains("seed") && !j.at("seed").is_null()) t.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("profile") && !j.at("profile").is_null()) t.profile_used = profile_from_json(j.at("profile"));
    for (const auto& ja : j.at("actions")) t.actions.push_back({ja.at("tick").get<long>(), action_from_json(ja)});
    t.plot_points = j.at("plot_points").get<std::vector<std::string>>();
    if (j.contains("ending") && !j.at("ending").is_null()) t.ending = j.at("ending").get<std::string>();
    return t;
}

std::string trace_line(const Trace& t) { return to_json(t).dump(); }

void write_traces(std::ostream& out, const std::vector<Trace>& traces) {
    for (const auto& t : traces) out << trace_line(t) << '\n';
}

std::vector<Trace> read_traces(std::istream& in) {
    std::vector<Trace> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(trace_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Trace> read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return read_traces(in);
}

bool replays_faithfully(const story::StoryDefinition& def, const Trace& t) {
    try {
        auto state = story::initial_state(def);
        for (const auto& ta : t.actions) state = story::apply_action(def, state, ta.action).new_state;
        return state.discovered == t.plot_points && story::is_terminal(def, state) == t.ending;
    } catch (const story::IllegalActionError&) {
        return false;
    }
}

}  // namespace bdiplay
