#pragma once

#include "bdiplay/story.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdiplay::story {

struct GameState {
    std::string current_location;
    std::set<std::string> inventory;
    std::vector<std::string> discovered;  // trigger order
    std::set<std::string> visited;
    std::map<std::string, bool> flags;
    // Where each world item currently is; "" means not (or no longer) in the world.
    // Inventory items are tracked in `inventory`, not here.
    std::map<std::string, std::string> item_locations;
    std::set<std::string> fired_rules;
    long tick = 0;

    bool has_discovered(std::string_view pp) const;
    bool operator==(const GameState&) const = default;
};

class IllegalActionError : public std::logic_error {
public:
    explicit IllegalActionError(const Action& a);
};

class MissingStartError : public std::runtime_error {
public:
    MissingStartError() : std::runtime_error("story declares no start location") {}
};

struct StepResult {
    GameState new_state;
    std::vector<std::string> triggered;
};

GameState initial_state(const StoryDefinition& def);

bool holds(const Condition& c, const GameState& s);
bool holds_all(const std::vector<Condition>& cs, const GameState& s);

// Items the player can see where they stand (world items here, not inventory).
std::vector<std::string> visible_items(const StoryDefinition& def, const GameState& s);
std::vector<std::string> present_characters(const StoryDefinition& def, const GameState& s);

// Sorted by verb, then subject, then object. Empty once an ending is discovered.
std::vector<Action> available_actions(const StoryDefinition& def, const GameState& state);

bool is_available(const StoryDefinition& def, const GameState& state, const Action& a);

// Throws IllegalActionError when `action` is not in available_actions(def, state).
StepResult apply_action(const StoryDefinition& def, const GameState& state, const Action& action);

// First ending in discovery order, if any.
std::optional<std::string> is_terminal(const StoryDefinition& def, const GameState& state);

}  // namespace bdiplay::story
