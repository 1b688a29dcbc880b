#pragma once

#include "bdiplay/trace.hpp"

#include <map>
#include <string>
#include <vector>

namespace bdiplay::sim {

// Scripted synthetic players: fixed action sequences standing in for human
// traces when no human data is at hand.
struct ArchetypeScripts {
    std::string story_id;
    std::map<std::string, std::vector<story::Action>> scripts;
};

ArchetypeScripts load_archetypes(const std::string& path);

// Plays `script` from the initial state and records it as a human trace.
// Throws story::IllegalActionError on the first illegal step.
Trace play_script(const story::StoryDefinition& def, const std::vector<story::Action>& script,
                  const std::string& session_id);

}  // namespace bdiplay::sim
