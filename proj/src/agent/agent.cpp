#include "internal.hpp"

#include <cmath>
#include <stdexcept>

namespace bdiplay::agent {

using story::Action;
using story::Verb;

long AgentConfig::budget() const {
    if (persistence_budget > 0) return persistence_budget;
    return (max_ticks + 4) / 5;
}

void AgentConfig::check() const {
    if (max_ticks <= 0) throw std::invalid_argument("max_ticks must be positive");
    if (persistence_budget < 0) throw std::invalid_argument("persistence_budget must be positive");
    if (budget() > max_ticks) throw std::invalid_argument("persistence_budget exceeds max_ticks");
}

std::string_view to_string(GoalKind k) {
    switch (k) {
        case GoalKind::ExploreRoom: return "explore-room";
        case GoalKind::Navigate: return "navigate";
        case GoalKind::InteractNpc: return "interact-npc";
        case GoalKind::DecideObject: return "decide-object";
        case GoalKind::InSpecific: return "in-specific";
    }
    return "?";
}

Goal* AgentState::goal(std::string_view id) {
    for (auto& g : goals)
        if (g.id == id) return &g;
    return nullptr;
}

const Goal* AgentState::goal(std::string_view id) const {
    for (const auto& g : goals)
        if (g.id == id) return &g;
    return nullptr;
}

const Plan* AgentState::plan(std::string_view id) const {
    for (const Plan* p : library)
        if (p->id == id) return p;
    return nullptr;
}

namespace {

// Base priorities: in-specific > decide-object > interact-npc > navigate > explore-room.
int base_priority(GoalKind k) {
    switch (k) {
        case GoalKind::InSpecific: return 50;
        case GoalKind::DecideObject: return 40;
        case GoalKind::InteractNpc: return 30;
        case GoalKind::Navigate: return 20;
        case GoalKind::ExploreRoom: return 10;
    }
    return 0;
}

constexpr int kExploreBoost = 40;
constexpr int kFamiliarPenalty = 45;
constexpr int kDeferredFinale = 1;

bool low_persistence(const AgentState& a) { return a.beliefs.binary && !a.beliefs.binary->p; }

std::string goal_key(GoalKind k, const std::string& target) { return std::string(to_string(k)) + ":" + target; }

// Adopts a goal unless one with the same key is active or achieved, or was
// dropped recently (within one budget) and nothing has been learned since.
Goal* adopt(AgentState& agent, GoalKind kind, const std::string& target, std::vector<Goal>& fresh) {
    auto key = goal_key(kind, target);
    int count = 0;
    for (const auto& g : agent.goals) {
        if (g.key != key) continue;
        ++count;
        if (g.status != GoalStatus::Dropped) return nullptr;
        bool cooling = agent.beliefs.tick <= g.dropped_tick + agent.config.budget();
        if (g.dropped_at_progress && *g.dropped_at_progress == agent.beliefs.progress && cooling) return nullptr;
    }
    Goal g;
    g.key = key;
    g.id = key + "#" + std::to_string(count + 1);
    g.kind = kind;
    g.target = target;
    g.priority = base_priority(kind);
    g.acquired_tick = agent.beliefs.tick;
    g.seq = agent.next_seq++;
    agent.goals.push_back(g);
    fresh.push_back(g);
    return &agent.goals.back();
}

bool achieved(const AgentState& agent, const Goal& g) {
    const BeliefSet& b = agent.beliefs;
    switch (g.kind) {
        case GoalKind::Navigate: return b.current_location == g.target;
        case GoalKind::DecideObject: return b.inventory.contains(g.target) || !b.known_items.contains(g.target);
        case GoalKind::InteractNpc: return b.talked.contains(g.target);
        case GoalKind::InSpecific: return b.performed.contains(g.target);
        case GoalKind::ExploreRoom: return false;  // plan decides
    }
    return false;
}

bool entity_known(const AgentState& agent, const std::string& id) {
    const auto& def = *agent.story;
    if (def.item(id)) return agent.beliefs.known_items.contains(id);
    if (def.character(id)) return agent.beliefs.known_characters.contains(id);
    return false;
}

bool stalled(const AgentState& agent, const Goal& g) {
    long progress = agent.beliefs.progress;
    return (g.blocked_at_progress && *g.blocked_at_progress == progress) ||
           (g.failed_at_progress && *g.failed_at_progress == progress);
}

}  // namespace

AgentState init_agent(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                      const AgentConfig& config, std::optional<Trace> previous_trace) {
    config.check();
    AgentState agent;
    agent.story = &def;
    agent.config = config;
    agent.rng = Rng(config.seed);
    agent.library = plan_library(profile.has_value());

    BeliefSet& b = agent.beliefs;
    if (!def.start()) throw story::MissingStartError();
    b.current_location = *def.start();
    b.known_locations.insert(b.current_location);
    b.profile = profile;
    if (profile) b.binary = profile::binarize(*profile);
    if (previous_trace) {
        for (const auto& ta : previous_trace->actions) b.previous_actions.insert(ta.action.key());
        b.previous_trace = std::move(previous_trace);
    }

    std::vector<Goal> fresh;
    adopt(agent, GoalKind::ExploreRoom, b.current_location, fresh);
    return agent;
}

std::vector<Goal> trigger_goals(AgentState& agent) {
    BeliefSet& b = agent.beliefs;
    const auto& def = *agent.story;

    for (auto& g : agent.goals)
        if (g.status == GoalStatus::Active && achieved(agent, g)) g.status = GoalStatus::Achieved;

    std::vector<Goal> fresh;
    for (const auto& loc : b.visited) adopt(agent, GoalKind::ExploreRoom, loc, fresh);

    for (const auto& [item, loc] : b.known_items)
        if (!loc.empty() && b.takeable.contains(item)) adopt(agent, GoalKind::DecideObject, item, fresh);

    for (const auto& [ch, loc] : b.known_characters)
        if (!b.talked.contains(ch)) adopt(agent, GoalKind::InteractNpc, ch, fresh);

    for (const auto& r : def.world().action_rules) {
        if (story::is_generic(r.verb)) continue;
        auto key = r.action().key();
        if (b.performed.contains(key)) continue;
        bool known = entity_known(agent, r.subject);
        if (r.verb == Verb::Ask) known = known && b.talked.contains(r.subject);
        else if (r.object) known = known && entity_known(agent, *r.object);
        if (!known) continue;
        if (Goal* g = adopt(agent, GoalKind::InSpecific, key, fresh)) {
            for (const auto& t : r.triggers)
                if (def.graph().endings().contains(t)) g->finale = true;
            if (g->finale) fresh.back().finale = true;
        }
    }

    // A direct (low pE) player only heads somewhere new when nothing else is pending.
    bool eager = !b.binary || b.binary->pE;
    bool idle = std::none_of(agent.goals.begin(), agent.goals.end(), [&](const Goal& g) {
        return g.status == GoalStatus::Active && g.kind != GoalKind::Navigate && !stalled(agent, g);
    });
    for (const auto& loc : b.known_locations) {
        if (b.visited.contains(loc)) continue;
        // Replaying players head for places the last game never reached.
        bool unseen = b.novelty_seeking() && !b.previous_actions.contains("goto " + loc);
        if (eager || idle || unseen) adopt(agent, GoalKind::Navigate, loc, fresh);
    }

    b.pending_percepts.clear();
    return fresh;
}

int effective_priority(const AgentState& agent, const Goal& g) {
    int p = g.priority;
    const BeliefSet& b = agent.beliefs;
    if (!b.informed()) return p;
    // Explorers keep playing while anything else is left to do.
    if (g.finale && b.binary->pE) return kDeferredFinale;
    // A replaying player already knows where this ending leads.
    if (g.finale && b.novelty_seeking() && b.previous_actions.contains(g.target)) return kDeferredFinale;
    bool exploring = g.kind == GoalKind::Navigate || g.kind == GoalKind::ExploreRoom;
    if (exploring && low_persistence(agent) && agent.explore_boost_until >= b.tick) p += kExploreBoost;
    if (g.kind == GoalKind::InSpecific && b.novelty_seeking() && b.previous_actions.contains(g.target))
        p -= kFamiliarPenalty;
    return p;
}

std::vector<const Plan*> applicable_plans(const AgentState& agent, const Goal& g) {
    std::vector<const Plan*> out;
    if (g.status != GoalStatus::Active) return out;
    if (g.failed_at_progress && *g.failed_at_progress == agent.beliefs.progress) return out;
    for (const Plan* p : agent.library)
        if (p->goal_kind == g.kind && p->context(agent.beliefs)) out.push_back(p);
    return out;
}

namespace {

// Active goals with an applicable plan, best first. Goals stuck since the
// last change in beliefs come after the rest. Equal priority is ordered by
// acquisition (most recent first when persistence is low); goals acquired on
// the same tick are shuffled.
std::vector<Goal*> ranked(AgentState& agent) {
    struct Entry {
        Goal* goal;
        bool stuck;
        int priority;
    };
    std::vector<Entry> entries;
    for (auto& g : agent.goals)
        if (!applicable_plans(agent, g).empty()) entries.push_back({&g, stalled(agent, g), effective_priority(agent, g)});
    bool recent_first = low_persistence(agent);
    auto same_rank = [](const Entry& x, const Entry& y) {
        return x.stuck == y.stuck && x.priority == y.priority && x.goal->acquired_tick == y.goal->acquired_tick;
    };
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& x, const Entry& y) {
        if (x.stuck != y.stuck) return !x.stuck;
        if (x.priority != y.priority) return x.priority > y.priority;
        long tx = x.goal->acquired_tick, ty = y.goal->acquired_tick;
        if (tx != ty) return recent_first ? tx > ty : tx < ty;
        return x.goal->seq < y.goal->seq;
    });
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i + 1;
        while (j < entries.size() && same_rank(entries[j], entries[i])) ++j;
        for (std::size_t k = j - 1; k > i; --k) std::swap(entries[k], entries[i + agent.rng.pick(k - i + 1)]);
        i = j;
    }
    std::vector<Goal*> out;
    for (const auto& e : entries) out.push_back(e.goal);
    return out;
}

const Plan* choose_plan(AgentState& agent, const Goal& g) {
    auto plans = applicable_plans(agent, g);
    if (plans.empty()) return nullptr;
    std::vector<const Plan*> specific;
    for (const Plan* p : plans)
        if (!p->is_default) specific.push_back(p);
    auto& pool = specific.empty() ? plans : specific;
    return pool.size() == 1 ? pool.front() : pool[agent.rng.pick(pool.size())];
}

void log_step(AgentState& agent, const Goal* g, const Plan* p, const std::optional<Action>& a) {
    if (!agent.config.record_log) return;
    agent.log.push_back({agent.beliefs.tick, g ? g->id : "idle", p ? p->id : "", a ? a->key() : "", {}});
}

}  // namespace

std::optional<Intention> select_intention(AgentState& agent) {
    auto order = ranked(agent);
    if (order.empty()) {
        agent.intention.reset();
        return std::nullopt;
    }
    // Commitment: keep the current intention, blocked or not, until it ends or
    // a higher priority goal that can progress appears.
    if (agent.intention) {
        Goal* cur = agent.goal(agent.intention->goal_id);
        bool live = cur && std::find(order.begin(), order.end(), cur) != order.end();
        if (live) {
            Goal* top = order.front();
            int pt = effective_priority(agent, *top), pc = effective_priority(agent, *cur);
            bool yield = top != cur && !stalled(agent, *top) && pt > pc;
            if (!yield) return agent.intention;
        }
    }
    const Plan* plan = choose_plan(agent, *order.front());
    agent.intention = Intention{order.front()->id, plan->id};
    return agent.intention;
}

std::optional<Action> execute_step(AgentState& agent, const story::GameState& state,
                                   const std::vector<Action>& actions) {
    (void)state;
    auto legal = [&](const Action& a) { return std::find(actions.begin(), actions.end(), a) != actions.end(); };

    select_intention(agent);
    for (int guard = 0; guard < 64; ++guard) {
        if (!agent.intention && !select_intention(agent)) {
            // Idle: make somewhere to go the new goal.
            auto go = detail::wander(agent);
            std::vector<Goal> fresh;
            Goal* g = go ? adopt(agent, GoalKind::Navigate, go->subject, fresh) : nullptr;
            if (g == nullptr) {
                log_step(agent, nullptr, nullptr, go);
                return go && legal(*go) ? go : std::nullopt;
            }
            continue;
        }
        Goal* goal = agent.goal(agent.intention->goal_id);
        const Plan* plan = agent.plan(agent.intention->plan_id);
        StepOutcome out = plan->body(agent, *goal);
        goal = agent.goal(agent.intention->goal_id);

        switch (out.kind) {
            case StepKind::Act: {
                if (!legal(*out.action)) {
                    goal->failed_at_progress = agent.beliefs.progress;
                    agent.intention.reset();
                    return std::nullopt;
                }
                ++goal->attempt_ticks;
                if (out.action->verb == Verb::Goto) {
                    // Passing through: something useful right here comes first.
                    std::string moving_id = goal->id;
                    for (Goal* other : ranked(agent)) {
                        if (other->id == moving_id || other->kind == GoalKind::Navigate || stalled(agent, *other))
                            continue;
                        const Plan* op = choose_plan(agent, *other);
                        StepOutcome o = op->body(agent, *other);
                        if (o.kind == StepKind::Act && o.action->verb != Verb::Goto && legal(*o.action)) {
                            log_step(agent, other, op, o.action);
                            return o.action;
                        }
                    }
                    goal = agent.goal(moving_id);
                }
                log_step(agent, goal, plan, out.action);
                return out.action;
            }

            case StepKind::Achieved:
                goal->status = GoalStatus::Achieved;
                agent.intention.reset();
                continue;

            case StepKind::Failed:
                goal->failed_at_progress = agent.beliefs.progress;
                log_step(agent, goal, plan, std::nullopt);
                agent.intention.reset();
                return std::nullopt;

            case StepKind::Blocked: {
                goal->blocked_at_progress = agent.beliefs.progress;
                ++goal->attempt_ticks;
                std::string blocked_id = goal->id;
                // Detour: serve the other goals in rank order, else go somewhere.
                std::optional<Action> detour;
                for (Goal* other : ranked(agent)) {
                    if (other->id == blocked_id || stalled(agent, *other)) continue;
                    const Plan* op = choose_plan(agent, *other);
                    StepOutcome o = op->body(agent, *other);
                    if (o.kind == StepKind::Act && legal(*o.action)) {
                        detour = o.action;
                        break;
                    }
                    if (o.kind == StepKind::Achieved) other->status = GoalStatus::Achieved;
                    else if (o.kind == StepKind::Blocked) other->blocked_at_progress = agent.beliefs.progress;
                    else other->failed_at_progress = agent.beliefs.progress;
                }
                if (!detour) detour = detail::wander(agent);
                goal = agent.goal(blocked_id);
                log_step(agent, goal, plan, detour);
                if (detour && legal(*detour)) return detour;
                return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

std::vector<std::string> enforce_persistence(AgentState& agent) {
    std::vector<std::string> out;
    if (!low_persistence(agent)) return out;
    long budget = agent.config.budget();
    for (auto& g : agent.goals) {
        if (g.status != GoalStatus::Active || g.attempt_ticks < budget) continue;
        g.status = GoalStatus::Dropped;
        g.dropped_at_progress = agent.beliefs.progress;
        g.dropped_tick = agent.beliefs.tick;
        out.push_back(g.id);
        if (agent.intention && agent.intention->goal_id == g.id) agent.intention.reset();
    }
    if (!out.empty()) {
        agent.explore_boost_until = agent.beliefs.tick + budget;
        agent.dropped.insert(agent.dropped.end(), out.begin(), out.end());
        if (agent.config.record_log && !agent.log.empty()) {
            auto& drops = agent.log.back().drops;
            drops.insert(drops.end(), out.begin(), out.end());
        }
    }
    return out;
}

RunResult run_agent_detailed(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                             const AgentConfig& config, std::optional<Trace> previous_trace) {
    AgentState agent = init_agent(def, profile, config, std::move(previous_trace));
    auto state = story::initial_state(def);

    RunResult res;
    Trace& trace = res.trace;
    trace.story_id = def.id();
    trace.agent_kind = profile ? AgentKind::Informed : AgentKind::Uninformed;
    trace.profile_used = profile;
    trace.seed = config.seed;
    trace.session_id = std::string(to_string(trace.agent_kind)) + "-" + std::to_string(config.seed);

    while (state.tick < config.max_ticks && !story::is_terminal(def, state)) {
        auto actions = story::available_actions(def, state);
        if (actions.empty()) break;
        perceive(agent, state, actions);
        trigger_goals(agent);
        auto action = execute_step(agent, state, actions);
        if (!action) {
            // Plan failure: the tick still passes with a move somewhere.
            action = detail::wander(agent);
            if (!action || std::find(actions.begin(), actions.end(), *action) == actions.end())
                action = actions[agent.rng.pick(actions.size())];
        }
        auto step = story::apply_action(def, state, *action);
        trace.actions.push_back({state.tick, *action});
        state = std::move(step.new_state);

        BeliefSet& b = agent.beliefs;
        b.performed.insert(action->key());
        if (action->verb == Verb::Examine) b.examined.insert(action->subject);
        if (action->verb == Verb::Talk) b.talked.insert(action->subject);
        b.tick = state.tick;
        enforce_persistence(agent);
    }

    trace.plot_points = state.discovered;
    trace.ending = story::is_terminal(def, state);
    res.dropped_goals = agent.dropped;
    res.log = std::move(agent.log);
    return res;
}

Trace run_agent(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                const AgentConfig& config, std::optional<Trace> previous_trace) {
    return run_agent_detailed(def, profile, config, std::move(previous_trace)).trace;
}

nlohmann::json to_json(const LogRecord& r) {
    return {{"tick", r.tick}, {"goal", r.goal}, {"plan", r.plan}, {"action", r.action}, {"drops", r.drops}};
}

}  // namespace bdiplay::agent
