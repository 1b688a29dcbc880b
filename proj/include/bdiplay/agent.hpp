#pragma once

#include "bdiplay/engine.hpp"
#include "bdiplay/profile.hpp"
#include "bdiplay/trace.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace bdiplay::agent {

struct AgentConfig {
    std::uint64_t seed = 0;
    long max_ticks = 300;
    long persistence_budget = 0;  // 0 selects ceil(max_ticks / 5)
    bool record_log = false;

    long budget() const;
    void check() const;  // throws std::invalid_argument
};

enum class GoalKind { ExploreRoom, Navigate, InteractNpc, DecideObject, InSpecific };
enum class GoalStatus { Active, Achieved, Dropped };

std::string_view to_string(GoalKind k);

struct Goal {
    std::string id;      // "<kind>:<target>#<n>"
    std::string key;     // "<kind>:<target>", shared by re-adopted goals
    GoalKind kind = GoalKind::ExploreRoom;
    std::string target;  // location, character, item, or action key (in-specific)
    int priority = 0;
    long acquired_tick = 0;
    bool finale = false;     // in-specific goal whose action can end the story
    long attempt_ticks = 0;  // ticks spent as the selected intention
    GoalStatus status = GoalStatus::Active;
    long seq = 0;
    // Set when the goal could not progress; cleared by new beliefs.
    std::optional<long> blocked_at_progress;
    std::optional<long> failed_at_progress;
    std::optional<long> dropped_at_progress;
    long dropped_tick = 0;
};

struct BeliefSet {
    std::string current_location;
    std::set<std::string> known_locations;
    std::set<std::string> visited;
    std::map<std::string, std::set<std::string>> known_exits;
    std::map<std::string, std::string> known_items;  // item -> last seen location, "" when carried
    std::set<std::string> takeable;
    std::set<std::string> inventory;
    std::map<std::string, std::string> known_characters;  // character -> location
    std::set<std::string> talked;
    std::set<std::string> examined;
    std::set<std::string> performed;  // action keys this agent has executed
    std::vector<std::string> discovered;
    std::map<std::string, long> last_visit;
    std::vector<story::Action> available;
    long tick = 0;
    long progress = 0;  // bumps on every new plot point or newly carried item

    std::optional<profile::PlayerProfile> profile;
    std::optional<profile::BinaryProfile> binary;
    std::optional<Trace> previous_trace;
    std::set<std::string> previous_actions;
    std::deque<std::string> pending_percepts;

    bool informed() const { return binary.has_value(); }
    bool novelty_seeking() const { return binary && binary->f && previous_trace.has_value(); }
    bool operator==(const BeliefSet&) const = default;
};

struct AgentState;

enum class StepKind { Act, Achieved, Blocked, Failed };

struct StepOutcome {
    StepKind kind = StepKind::Failed;
    std::optional<story::Action> action;

    static StepOutcome act(story::Action a) { return {StepKind::Act, std::move(a)}; }
    static StepOutcome achieved() { return {StepKind::Achieved, std::nullopt}; }
    static StepOutcome blocked() { return {StepKind::Blocked, std::nullopt}; }
    static StepOutcome failed() { return {StepKind::Failed, std::nullopt}; }
};

struct Plan {
    std::string id;
    GoalKind goal_kind;
    bool is_default = false;
    std::function<bool(const BeliefSet&)> context;
    std::function<StepOutcome(AgentState&, const Goal&)> body;
};

// Default plans only (one per goal kind) when `informed` is false.
std::vector<const Plan*> plan_library(bool informed);

struct Intention {
    std::string goal_id;
    std::string plan_id;
};

struct LogRecord {
    long tick = 0;
    std::string goal;
    std::string plan;
    std::string action;
    std::vector<std::string> drops;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

private:
    std::mt19937_64 engine_;
};

struct AgentState {
    const story::StoryDefinition* story = nullptr;
    AgentConfig config;
    BeliefSet beliefs;
    std::vector<Goal> goals;
    std::vector<const Plan*> library;
    std::optional<Intention> intention;
    Rng rng{0};
    long next_seq = 0;
    long explore_boost_until = -1;
    std::vector<std::string> dropped;
    std::vector<LogRecord> log;

    Goal* goal(std::string_view id);
    const Goal* goal(std::string_view id) const;
    const Plan* plan(std::string_view id) const;
};

AgentState init_agent(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                      const AgentConfig& config, std::optional<Trace> previous_trace = std::nullopt);

void perceive(AgentState& agent, const story::GameState& state, const std::vector<story::Action>& actions);

std::vector<Goal> trigger_goals(AgentState& agent);

// Priority after profile modulation; see the agent notes in README.
int effective_priority(const AgentState& agent, const Goal& g);

std::vector<const Plan*> applicable_plans(const AgentState& agent, const Goal& g);

std::optional<Intention> select_intention(AgentState& agent);

// Returns the next action (always a member of `actions`), or nullopt when the
// selected plan failed. Failure is recorded on the goal; re-selection happens
// next tick.
std::optional<story::Action> execute_step(AgentState& agent, const story::GameState& state,
                                          const std::vector<story::Action>& actions);

std::vector<std::string> enforce_persistence(AgentState& agent);

struct RunResult {
    Trace trace;
    std::vector<std::string> dropped_goals;
    std::vector<LogRecord> log;
};

RunResult run_agent_detailed(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                             const AgentConfig& config, std::optional<Trace> previous_trace = std::nullopt);

Trace run_agent(const story::StoryDefinition& def, const std::optional<profile::PlayerProfile>& profile,
                const AgentConfig& config, std::optional<Trace> previous_trace = std::nullopt);

nlohmann::json to_json(const LogRecord& r);

}  // namespace bdiplay::agent
