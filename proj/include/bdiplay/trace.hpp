#pragma once

#include "bdiplay/engine.hpp"
#include "bdiplay/profile.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bdiplay {

enum class AgentKind { Human, Uninformed, Informed };

std::string_view to_string(AgentKind k);
AgentKind parse_agent_kind(std::string_view s);

struct TimedAction {
    long tick = 0;
    story::Action action;
    bool operator==(const TimedAction&) const = default;
};

struct Trace {
    std::string session_id;
    std::string story_id;
    AgentKind agent_kind = AgentKind::Human;
    std::optional<profile::PlayerProfile> profile_used;
    std::optional<std::uint64_t> seed;
    std::vector<TimedAction> actions;
    std::vector<std::string> plot_points;
    std::optional<std::string> ending;

    bool operator==(const Trace&) const = default;
};

nlohmann::json to_json(const profile::PlayerProfile& p);
profile::PlayerProfile profile_from_json(const nlohmann::json& j);

// Profile export document: {f, gE, pE, p, binarized}.
nlohmann::json profile_export(const profile::PlayerProfile& p);

nlohmann::json to_json(const story::Action& a);
story::Action action_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);

// One compact JSON object per line, keys sorted.
std::string trace_line(const Trace& t);
void write_traces(std::ostream& out, const std::vector<Trace>& traces);
std::vector<Trace> read_traces(std::istream& in);
std::vector<Trace> read_trace_file(const std::string& path);

// Re-applies the trace's actions from the initial state; true when the replay is
// legal throughout and reproduces the stored plot-point sequence and ending.
bool replays_faithfully(const story::StoryDefinition& def, const Trace& t);

}  // namespace bdiplay
