#pragma once

#include "bdiplay/agent.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace bdiplay::agent::detail {

bool is_available(const BeliefSet& b, const story::Action& a);

// Uniform pick; with novelty seeking, options the previous game used are
// discarded first when anything else remains.
template <typename T, typename KeyFn>
std::optional<T> pick(AgentState& agent, std::vector<T> options, KeyFn key) {
    if (options.empty()) return std::nullopt;
    if (agent.beliefs.novelty_seeking()) {
        std::vector<T> fresh;
        for (const auto& o : options)
            if (!agent.beliefs.previous_actions.contains(key(o))) fresh.push_back(o);
        if (!fresh.empty()) options = std::move(fresh);
    }
    return options[agent.rng.pick(options.size())];
}

std::optional<story::Action> pick_action(AgentState& agent, std::vector<story::Action> options);

// Breadth-first over known exits; ties among equally short first hops are
// broken at random. Returns the goto action for the first hop.
std::optional<story::Action> step_toward(AgentState& agent, const std::string& target);

// Nearest location (by known exits) satisfying `want`, ties at random.
std::optional<std::string> nearest(AgentState& agent, const std::function<bool(const std::string&)>& want);

StepOutcome navigate_to(AgentState& agent, const std::string& target);

// Unvisited places first, otherwise the least recently visited one.
std::optional<story::Action> wander(AgentState& agent);

// Where an in-specific action can be attempted, given what the agent believes;
// nullopt when its parts are not together anywhere (e.g. an item still lying
// elsewhere).
std::optional<std::string> place_for(const AgentState& agent, const story::Action& a);

}  // namespace bdiplay::agent::detail
