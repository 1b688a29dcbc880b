#include "bdiplay/archetypes.hpp"

#include <fstream>
#include <stdexcept>

namespace bdiplay::sim {

ArchetypeScripts load_archetypes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto j = nlohmann::json::parse(in);
    ArchetypeScripts out;
    out.story_id = j.at("story").get<std::string>();
    for (const auto& [name, steps] : j.at("archetypes").items()) {
        auto& script = out.scripts[name];
        for (const auto& key : steps) {
            auto a = story::parse_action_key(key.get<std::string>());
            if (!a) throw std::runtime_error("archetype " + name + ": bad action '" + key.get<std::string>() + "'");
            script.push_back(*a);
        }
    }
    return out;
}

Trace play_script(const story::StoryDefinition& def, const std::vector<story::Action>& script,
                  const std::string& session_id) {
    Trace t;
    t.session_id = session_id;
    t.story_id = def.id();
    t.agent_kind = AgentKind::Human;
    auto state = story::initial_state(def);
    for (const auto& a : script) {
        auto step = story::apply_action(def, state, a);
        state = std::move(step.new_state);
        t.actions.push_back({state.tick, a});
    }
    t.plot_points = state.discovered;
    t.ending = story::is_terminal(def, state);
    return t;
}

}  // namespace bdiplay::sim
