#include "bdiplay/engine.hpp"

#include <algorithm>
#include <tuple>

namespace bdiplay::story {

bool GameState::has_discovered(std::string_view pp) const {
    return std::find(discovered.begin(), discovered.end(), pp) != discovered.end();
}

IllegalActionError::IllegalActionError(const Action& a)
    : std::logic_error("illegal action in current state: " + a.key()) {}

GameState initial_state(const StoryDefinition& def) {
    if (!def.start()) throw MissingStartError();
    GameState s;
    s.current_location = *def.start();
    s.visited.insert(s.current_location);
    for (const auto& it : def.world().items) s.item_locations[it.id] = it.location;
    return s;
}

bool holds(const Condition& c, const GameState& s) {
    bool v = false;
    switch (c.kind) {
        case Condition::Kind::Has: v = s.inventory.contains(c.arg); break;
        case Condition::Kind::Discovered: v = s.has_discovered(c.arg); break;
        case Condition::Kind::Flag: {
            auto it = s.flags.find(c.arg);
            v = it != s.flags.end() && it->second;
            break;
        }
        case Condition::Kind::At: v = s.current_location == c.arg; break;
        case Condition::Kind::Visited: v = s.visited.contains(c.arg); break;
    }
    return v != c.negated;
}

bool holds_all(const std::vector<Condition>& cs, const GameState& s) {
    return std::all_of(cs.begin(), cs.end(), [&](const Condition& c) { return holds(c, s); });
}

std::vector<std::string> visible_items(const StoryDefinition& def, const GameState& s) {
    std::vector<std::string> out;
    for (const auto& it : def.world().items) {
        auto loc = s.item_locations.find(it.id);
        if (loc != s.item_locations.end() && loc->second == s.current_location && !s.inventory.contains(it.id))
            out.push_back(it.id);
    }
    return out;
}

std::vector<std::string> present_characters(const StoryDefinition& def, const GameState& s) {
    std::vector<std::string> out;
    for (const auto& ch : def.world().characters)
        if (ch.location == s.current_location) out.push_back(ch.id);
    return out;
}

namespace {

bool item_reachable(const GameState& s, const std::string& id) {
    if (s.inventory.contains(id)) return true;
    auto it = s.item_locations.find(id);
    return it != s.item_locations.end() && !it->second.empty() && it->second == s.current_location;
}

// Is the entity named by a rule's subject/object at hand?
bool present(const StoryDefinition& def, const GameState& s, const std::string& id) {
    if (def.item(id)) return item_reachable(s, id);
    if (const Character* ch = def.character(id)) return ch->location == s.current_location;
    if (def.location(id)) return s.current_location == id;
    return false;
}

bool rule_offered(const StoryDefinition& def, const GameState& s, const ActionRule& r) {
    if (is_generic(r.verb) || s.fired_rules.contains(r.id)) return false;
    if (!present(def, s, r.subject)) return false;
    if (r.object && r.verb != Verb::Ask && !present(def, s, *r.object)) return false;
    return holds_all(r.requires_, s);
}

auto sort_key(const Action& a) { return std::tuple(to_string(a.verb), a.subject, a.object); }

}  // namespace

std::vector<Action> available_actions(const StoryDefinition& def, const GameState& state) {
    std::vector<Action> out;
    if (is_terminal(def, state)) return out;

    if (const Location* here = def.location(state.current_location)) {
        for (const auto& ex : here->exits)
            if (holds_all(ex.requires_, state)) out.push_back({Verb::Goto, ex.to, std::nullopt});
    }
    for (const auto& id : visible_items(def, state)) {
        out.push_back({Verb::Examine, id, std::nullopt});
        if (def.item(id)->takeable) out.push_back({Verb::Take, id, std::nullopt});
    }
    for (const auto& id : state.inventory) out.push_back({Verb::Examine, id, std::nullopt});
    for (const auto& id : present_characters(def, state)) out.push_back({Verb::Talk, id, std::nullopt});
    for (const auto& r : def.world().action_rules)
        if (rule_offered(def, state, r)) out.push_back(r.action());

    std::sort(out.begin(), out.end(), [](const Action& a, const Action& b) { return sort_key(a) < sort_key(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_available(const StoryDefinition& def, const GameState& state, const Action& a) {
    auto acts = available_actions(def, state);
    return std::find(acts.begin(), acts.end(), a) != acts.end();
}

StepResult apply_action(const StoryDefinition& def, const GameState& state, const Action& action) {
    if (!is_available(def, state, action)) throw IllegalActionError(action);

    StepResult res{state, {}};
    GameState& next = res.new_state;
    ++next.tick;

    // Rule conditions are judged against the state before the action.
    std::vector<const ActionRule*> firing;
    for (const ActionRule* r : def.rules_for(action))
        if (!state.fired_rules.contains(r->id) && holds_all(r->requires_, state)) firing.push_back(r);

    switch (action.verb) {
        case Verb::Goto:
            next.current_location = action.subject;
            next.visited.insert(action.subject);
            break;
        case Verb::Take:
            next.inventory.insert(action.subject);
            next.item_locations[action.subject].clear();
            break;
        default: break;
    }

    for (const ActionRule* r : firing) {
        next.fired_rules.insert(r->id);
        for (const auto& e : r->effects) {
            switch (e.kind) {
                case Effect::Kind::Give:
                    next.inventory.insert(e.arg);
                    next.item_locations[e.arg].clear();
                    break;
                case Effect::Kind::Remove:
                    next.inventory.erase(e.arg);
                    next.item_locations[e.arg].clear();
                    break;
                case Effect::Kind::Place:
                    next.inventory.erase(e.arg);
                    next.item_locations[e.arg] = e.location;
                    break;
                case Effect::Kind::Set: next.flags[e.arg] = true; break;
                case Effect::Kind::Clear: next.flags[e.arg] = false; break;
                case Effect::Kind::Move:
                    next.current_location = e.arg;
                    next.visited.insert(e.arg);
                    break;
            }
        }
        for (const auto& t : r->triggers) {
            if (next.has_discovered(t)) continue;
            const PlotPoint* pp = def.graph().find(t);
            bool ready = std::all_of(pp->predecessors.begin(), pp->predecessors.end(),
                                     [&](const std::string& pred) { return state.has_discovered(pred); });
            if (!ready) continue;
            next.discovered.push_back(t);
            res.triggered.push_back(t);
        }
    }
    return res;
}

std::optional<std::string> is_terminal(const StoryDefinition& def, const GameState& state) {
    const auto& endings = def.graph().endings();
    for (const auto& pp : state.discovered)
        if (endings.contains(pp)) return pp;
    return std::nullopt;
}

}  // namespace bdiplay::story
