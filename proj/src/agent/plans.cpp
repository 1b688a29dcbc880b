#include "internal.hpp"

namespace bdiplay::agent {

using story::Action;
using story::Verb;
using namespace detail;

namespace {

bool always(const BeliefSet&) { return true; }

template <auto Member, bool High>
bool factor_is(const BeliefSet& b) {
    return b.binary && ((*b.binary).*Member) == High;
}

std::vector<std::string> unexamined_here(const AgentState& agent, bool important_only) {
    const BeliefSet& b = agent.beliefs;
    std::vector<std::string> out;
    for (const auto& [item, loc] : b.known_items) {
        if (loc != b.current_location || b.examined.contains(item)) continue;
        if (important_only && !agent.story->item(item)->importance_hint) continue;
        if (is_available(b, {Verb::Examine, item, std::nullopt})) out.push_back(item);
    }
    return out;
}

std::optional<Action> examine_one(AgentState& agent, std::vector<std::string> items) {
    auto pick_item = pick(agent, std::move(items), [](const std::string& i) { return "examine " + i; });
    if (!pick_item) return std::nullopt;
    return Action{Verb::Examine, *pick_item, std::nullopt};
}

std::optional<Action> talk_to_someone_here(AgentState& agent) {
    std::vector<Action> talks;
    for (const auto& a : agent.beliefs.available)
        if (a.verb == Verb::Talk && !agent.beliefs.talked.contains(a.subject)) talks.push_back(a);
    return pick_action(agent, std::move(talks));
}

// ---- explore-room

StepOutcome explore_room(AgentState& agent, const Goal& g, bool important_only, bool talk, bool carried_too) {
    if (agent.beliefs.current_location != g.target) return navigate_to(agent, g.target);
    if (auto a = examine_one(agent, unexamined_here(agent, important_only))) return StepOutcome::act(*a);
    if (talk) {
        if (auto a = talk_to_someone_here(agent)) return StepOutcome::act(*a);
    }
    if (carried_too) {
        std::vector<std::string> carried;
        for (const auto& item : agent.beliefs.inventory)
            if (!agent.beliefs.examined.contains(item)) carried.push_back(item);
        if (auto a = examine_one(agent, std::move(carried))) return StepOutcome::act(*a);
    }
    return StepOutcome::achieved();
}

const Plan kExploreRoomDefault{
    "explore-room/look-around", GoalKind::ExploreRoom, true, always,
    [](AgentState& a, const Goal& g) { return explore_room(a, g, false, true, false); }};

const Plan kExploreRoomExhaustive{
    "explore-room/exhaustive", GoalKind::ExploreRoom, false,
    factor_is<&profile::BinaryProfile::pE, true>,
    [](AgentState& a, const Goal& g) { return explore_room(a, g, false, true, true); }};

const Plan kExploreRoomGlance{
    "explore-room/glance", GoalKind::ExploreRoom, false,
    factor_is<&profile::BinaryProfile::pE, false>,
    [](AgentState& a, const Goal& g) { return explore_room(a, g, true, false, false); }};

// ---- navigate

std::optional<Action> unvisited_neighbour(AgentState& agent) {
    std::vector<Action> fresh;
    for (const auto& a : agent.beliefs.available)
        if (a.verb == Verb::Goto && !agent.beliefs.visited.contains(a.subject)) fresh.push_back(a);
    return pick_action(agent, std::move(fresh));
}

const Plan kNavigateDefault{
    "navigate/unexplored-first", GoalKind::Navigate, true, always,
    [](AgentState& a, const Goal& g) {
        if (a.beliefs.current_location == g.target) return StepOutcome::achieved();
        if (auto go = unvisited_neighbour(a)) return StepOutcome::act(*go);
        return navigate_to(a, g.target);
    }};

const Plan kNavigateExhaustive{
    "navigate/exhaustive", GoalKind::Navigate, false,
    factor_is<&profile::BinaryProfile::pE, true>,
    [](AgentState& a, const Goal& g) {
        if (a.beliefs.current_location == g.target) return StepOutcome::achieved();
        if (auto go = unvisited_neighbour(a)) return StepOutcome::act(*go);
        auto other = nearest(a, [&](const std::string& loc) { return !a.beliefs.visited.contains(loc); });
        if (other) {
            if (auto go = step_toward(a, *other)) return StepOutcome::act(*go);
        }
        return navigate_to(a, g.target);
    }};

const Plan kNavigateDirect{"navigate/direct", GoalKind::Navigate, false,
                           factor_is<&profile::BinaryProfile::pE, false>,
                           [](AgentState& a, const Goal& g) { return navigate_to(a, g.target); }};

// ---- decide-object

StepOutcome fetch(AgentState& agent, const Goal& g, bool inspect_first) {
    const BeliefSet& b = agent.beliefs;
    if (b.inventory.contains(g.target)) return StepOutcome::achieved();
    auto it = b.known_items.find(g.target);
    if (it == b.known_items.end()) return StepOutcome::achieved();  // gone
    if (b.current_location != it->second) {
        if (inspect_first && b.examined.contains(g.target) && !agent.story->item(g.target)->importance_hint)
            return StepOutcome::achieved();
        return navigate_to(agent, it->second);
    }
    if (inspect_first) {
        if (!b.examined.contains(g.target)) return StepOutcome::act({Verb::Examine, g.target, std::nullopt});
        if (!agent.story->item(g.target)->importance_hint) return StepOutcome::achieved();  // leave it
    }
    Action take{Verb::Take, g.target, std::nullopt};
    if (is_available(b, take)) return StepOutcome::act(take);
    return StepOutcome::achieved();
}

const Plan kDecideDefault{"decide-object/take-everything", GoalKind::DecideObject, true,
                          always,
                          [](AgentState& a, const Goal& g) { return fetch(a, g, false); }};

const Plan kDecideDiscerning{"decide-object/discerning", GoalKind::DecideObject, false,
                             factor_is<&profile::BinaryProfile::gE, true>,
                             [](AgentState& a, const Goal& g) { return fetch(a, g, true); }};

const Plan kDecideGrab{"decide-object/grab", GoalKind::DecideObject, false,
                       factor_is<&profile::BinaryProfile::gE, false>,
                       [](AgentState& a, const Goal& g) { return fetch(a, g, false); }};

// ---- interact-npc

const Plan kInteractDefault{
    "interact-npc/talk", GoalKind::InteractNpc, true, always,
    [](AgentState& a, const Goal& g) {
        if (a.beliefs.talked.contains(g.target)) return StepOutcome::achieved();
        auto it = a.beliefs.known_characters.find(g.target);
        if (it == a.beliefs.known_characters.end()) return StepOutcome::failed();
        if (a.beliefs.current_location != it->second) return navigate_to(a, it->second);
        Action talk{Verb::Talk, g.target, std::nullopt};
        if (is_available(a.beliefs, talk)) return StepOutcome::act(talk);
        return StepOutcome::failed();
    }};

// ---- in-specific

StepOutcome attempt(AgentState& agent, const Goal& g) {
    const BeliefSet& b = agent.beliefs;
    if (b.performed.contains(g.target)) return StepOutcome::achieved();
    auto action = story::parse_action_key(g.target);
    if (!action) return StepOutcome::failed();
    auto place = place_for(agent, *action);
    if (!place) return StepOutcome::blocked();
    if (b.current_location == *place) {
        if (is_available(b, *action)) return StepOutcome::act(*action);
        return StepOutcome::blocked();
    }
    // Nothing learned since the last failed attempt: no reason to walk back.
    if (g.blocked_at_progress && *g.blocked_at_progress == b.progress) return StepOutcome::blocked();
    auto step = navigate_to(agent, *place);
    if (step.kind == StepKind::Failed) return StepOutcome::blocked();
    return step;
}

const Plan kInSpecificDefault{"in-specific/attempt", GoalKind::InSpecific, true, always,
                              attempt};

const Plan kInSpecificPersist{"in-specific/persist", GoalKind::InSpecific, false,
                              factor_is<&profile::BinaryProfile::p, true>, attempt};

const Plan kInSpecificSwitch{"in-specific/switch", GoalKind::InSpecific, false,
                             factor_is<&profile::BinaryProfile::p, false>, attempt};

}  // namespace

std::vector<const Plan*> plan_library(bool informed) {
    std::vector<const Plan*> lib{&kExploreRoomDefault, &kNavigateDefault, &kDecideDefault, &kInteractDefault,
                                 &kInSpecificDefault};
    if (informed) {
        lib.insert(lib.end(), {&kExploreRoomExhaustive, &kExploreRoomGlance, &kNavigateExhaustive, &kNavigateDirect,
                               &kDecideDiscerning, &kDecideGrab, &kInSpecificPersist, &kInSpecificSwitch});
    }
    return lib;
}

}  // namespace bdiplay::agent
