#include "internal.hpp"

#include <deque>

namespace bdiplay::agent {

using story::Action;
using story::Verb;

void perceive(AgentState& agent, const story::GameState& state, const std::vector<Action>& actions) {
    BeliefSet& b = agent.beliefs;
    const auto& def = *agent.story;
    auto note = [&](std::string percept) { b.pending_percepts.push_back(std::move(percept)); };

    b.tick = state.tick;
    b.current_location = state.current_location;
    if (b.known_locations.insert(state.current_location).second) note("location:" + state.current_location);
    if (b.visited.insert(state.current_location).second) note("visited:" + state.current_location);
    b.last_visit[state.current_location] = state.tick;

    for (const auto& a : actions) {
        if (a.verb == Verb::Goto) {
            b.known_exits[state.current_location].insert(a.subject);
            if (b.known_locations.insert(a.subject).second) note("location:" + a.subject);
        } else if (a.verb == Verb::Take) {
            b.takeable.insert(a.subject);
        }
    }

    // Items believed here but no longer visible have gone somewhere else.
    auto seen = story::visible_items(def, state);
    for (auto it = b.known_items.begin(); it != b.known_items.end();) {
        bool here = it->second == state.current_location;
        if (here && std::find(seen.begin(), seen.end(), it->first) == seen.end() && !state.inventory.contains(it->first))
            it = b.known_items.erase(it);
        else
            ++it;
    }
    for (const auto& id : seen) {
        auto [it, fresh] = b.known_items.insert_or_assign(id, state.current_location);
        if (fresh) note("item:" + id);
    }
    for (const auto& id : state.inventory) {
        if (!b.inventory.contains(id)) {
            ++b.progress;
            note("carried:" + id);
        }
        b.known_items[id] = "";
    }
    for (auto it = b.known_items.begin(); it != b.known_items.end();) {
        if (it->second.empty() && !state.inventory.contains(it->first))
            it = b.known_items.erase(it);
        else
            ++it;
    }
    b.inventory = state.inventory;

    for (const auto& c : story::present_characters(def, state)) {
        if (!b.known_characters.contains(c)) note("character:" + c);
        b.known_characters[c] = state.current_location;
    }

    for (std::size_t i = b.discovered.size(); i < state.discovered.size(); ++i) {
        ++b.progress;
        note("plot-point:" + state.discovered[i]);
    }
    b.discovered = state.discovered;
    b.available = actions;
}

namespace detail {

bool is_available(const BeliefSet& b, const Action& a) {
    return std::find(b.available.begin(), b.available.end(), a) != b.available.end();
}

std::optional<Action> pick_action(AgentState& agent, std::vector<Action> options) {
    return pick(agent, std::move(options), [](const Action& a) { return a.key(); });
}

namespace {

// Distances from `from` over known exits.
std::map<std::string, int> distances(const BeliefSet& b, const std::string& from) {
    std::map<std::string, int> dist{{from, 0}};
    std::deque<std::string> queue{from};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        auto it = b.known_exits.find(cur);
        if (it == b.known_exits.end()) continue;
        for (const auto& next : it->second) {
            if (dist.contains(next)) continue;
            dist[next] = dist[cur] + 1;
            queue.push_back(next);
        }
    }
    return dist;
}

}  // namespace

std::optional<Action> step_toward(AgentState& agent, const std::string& target) {
    const BeliefSet& b = agent.beliefs;
    if (b.current_location == target) return std::nullopt;
    auto exits = b.known_exits.find(b.current_location);
    if (exits == b.known_exits.end()) return std::nullopt;
    std::vector<Action> best;
    int best_d = -1;
    for (const auto& hop : exits->second) {
        Action go{Verb::Goto, hop, std::nullopt};
        if (!is_available(b, go)) continue;
        auto dist = distances(b, hop);
        auto it = dist.find(target);
        if (it == dist.end()) continue;
        if (best_d < 0 || it->second < best_d) {
            best_d = it->second;
            best.clear();
        }
        if (it->second == best_d) best.push_back(go);
    }
    return pick_action(agent, std::move(best));
}

std::optional<std::string> nearest(AgentState& agent, const std::function<bool(const std::string&)>& want) {
    auto dist = distances(agent.beliefs, agent.beliefs.current_location);
    std::vector<std::string> best;
    int best_d = -1;
    for (const auto& [loc, d] : dist) {
        if (loc == agent.beliefs.current_location || !want(loc)) continue;
        if (best_d < 0 || d < best_d) {
            best_d = d;
            best.clear();
        }
        if (d == best_d) best.push_back(loc);
    }
    return pick(agent, std::move(best), [](const std::string& loc) { return "goto " + loc; });
}

StepOutcome navigate_to(AgentState& agent, const std::string& target) {
    if (agent.beliefs.current_location == target) return StepOutcome::achieved();
    if (auto a = step_toward(agent, target)) return StepOutcome::act(*a);
    return StepOutcome::failed();
}

std::optional<Action> wander(AgentState& agent) {
    const BeliefSet& b = agent.beliefs;
    auto unvisited = nearest(agent, [&](const std::string& loc) { return !b.visited.contains(loc); });
    if (unvisited) {
        if (auto a = step_toward(agent, *unvisited)) return a;
    }
    // Least recently visited reachable place.
    std::vector<std::string> stale;
    long oldest = 0;
    auto reach = distances(b, b.current_location);
    for (const auto& [loc, d] : reach) {
        if (loc == b.current_location) continue;
        auto it = b.last_visit.find(loc);
        long t = it == b.last_visit.end() ? -1 : it->second;
        if (stale.empty() || t < oldest) {
            oldest = t;
            stale.clear();
        }
        if (t == oldest) stale.push_back(loc);
    }
    if (auto dest = pick(agent, std::move(stale), [](const std::string& loc) { return "goto " + loc; })) {
        if (auto a = step_toward(agent, *dest)) return a;
    }
    std::vector<Action> gotos;
    for (const auto& a : b.available)
        if (a.verb == Verb::Goto) gotos.push_back(a);
    return pick_action(agent, std::move(gotos));
}

std::optional<std::string> place_for(const AgentState& agent, const Action& a) {
    const BeliefSet& b = agent.beliefs;
    const auto& def = *agent.story;
    std::optional<std::string> where;
    auto need = [&](const std::string& id) {
        std::string loc;
        if (def.item(id)) {
            auto it = b.known_items.find(id);
            if (it == b.known_items.end()) return false;
            if (it->second.empty()) return true;  // carried
            loc = it->second;
        } else if (def.character(id)) {
            auto it = b.known_characters.find(id);
            if (it == b.known_characters.end()) return false;
            loc = it->second;
        } else {
            return false;
        }
        if (where && *where != loc) return false;
        where = loc;
        return true;
    };
    if (!need(a.subject)) return std::nullopt;
    if (a.object && a.verb != Verb::Ask && !need(*a.object)) return std::nullopt;
    return where.value_or(b.current_location);
}

}  // namespace detail
}  // namespace bdiplay::agent
