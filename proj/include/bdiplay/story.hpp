#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bdiplay::story {

enum class Verb { Goto, Examine, Take, Open, Read, Use, Give, Talk, Ask, Buy, Show };

std::string_view to_string(Verb v);
std::optional<Verb> parse_verb(std::string_view s);

// goto/examine/take/talk are offered whenever their subject is present;
// every other verb is offered only through an action rule.
bool is_generic(Verb v);
bool requires_object(Verb v);

struct Action {
    Verb verb = Verb::Examine;
    std::string subject;
    std::optional<std::string> object;

    std::string key() const;  // "verb subject [object]"
    friend auto operator<=>(const Action&, const Action&) = default;
};

// Parses the "verb subject [object]" form produced by Action::key().
std::optional<Action> parse_action_key(std::string_view key);

struct PlotPoint {
    std::string id;
    std::string label;
    std::set<std::string> predecessors;
    bool is_ending = false;
};

class PlotGraph {
public:
    PlotGraph() = default;
    explicit PlotGraph(std::vector<PlotPoint> points);

    const std::vector<PlotPoint>& points() const { return points_; }
    const PlotPoint* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    const std::set<std::string>& endings() const { return endings_; }
    std::vector<std::string> roots() const;

    // True when every element's predecessors appear before it in `order`.
    bool respects_precedence(const std::vector<std::string>& order) const;

private:
    std::vector<PlotPoint> points_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::set<std::string> endings_;
};

// A single condition over GameState. Textual form "kind:arg" with an optional
// leading '!' for negation, e.g. "has:crypt-key", "!pp:open-safe".
struct Condition {
    enum class Kind { Has, Discovered, Flag, At, Visited };
    Kind kind = Kind::Flag;
    std::string arg;
    bool negated = false;

    static Condition parse(std::string_view text);
    std::string text() const;
};

struct Effect {
    enum class Kind { Give, Remove, Place, Set, Clear, Move };
    Kind kind = Kind::Set;
    std::string arg;
    std::string location;  // Place only

    static Effect parse(std::string_view text);
    std::string text() const;
};

struct Exit {
    std::string to;
    std::vector<Condition> requires_;
    bool one_way = false;
};

struct Location {
    std::string id;
    std::string description;
    std::vector<Exit> exits;
    bool is_indoor = false;
};

struct Item {
    std::string id;
    std::string description;
    std::string location;  // empty: not in the world until an effect places it
    bool takeable = false;
    bool importance_hint = false;
};

struct Character {
    std::string id;
    std::string description;
    std::string location;
    std::vector<std::string> topics;
};

struct ActionRule {
    std::string id;
    Verb verb = Verb::Examine;
    std::string subject;
    std::optional<std::string> object;
    std::vector<Condition> requires_;
    std::vector<Effect> effects;
    std::vector<std::string> triggers;

    Action action() const { return {verb, subject, object}; }
};

struct WorldModel {
    std::vector<Location> locations;
    std::vector<Item> items;
    std::vector<Character> characters;
    std::vector<ActionRule> action_rules;
};

class StoryDefinition {
public:
    StoryDefinition() = default;
    StoryDefinition(std::string id, std::string title, std::optional<std::string> start,
                    WorldModel world, PlotGraph graph);

    const std::string& id() const { return id_; }
    const std::string& title() const { return title_; }
    const std::optional<std::string>& start() const { return start_; }
    const WorldModel& world() const { return world_; }
    const PlotGraph& graph() const { return graph_; }

    const Location* location(std::string_view id) const;
    const Item* item(std::string_view id) const;
    const Character* character(std::string_view id) const;
    std::vector<const ActionRule*> rules_for(const Action& a) const;

private:
    void build_index();

    std::string id_;
    std::string title_;
    std::optional<std::string> start_;
    WorldModel world_;
    PlotGraph graph_;
    std::map<std::string, std::size_t, std::less<>> loc_index_;
    std::map<std::string, std::size_t, std::less<>> item_index_;
    std::map<std::string, std::size_t, std::less<>> char_index_;
    std::multimap<std::string, std::size_t, std::less<>> rule_index_;
};

class StoryParseError : public std::runtime_error {
public:
    StoryParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnresolvedReferenceError : public std::runtime_error {
public:
    explicit UnresolvedReferenceError(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

StoryDefinition load_story(std::istream& source);
StoryDefinition load_story_file(const std::string& path);
StoryDefinition load_story_string(std::string_view text);

struct ValidationReport {
    bool acyclic = true;
    std::vector<std::string> cycle;        // one offending cycle, closed (first == last)
    std::vector<std::string> unreachable;  // not consumed by Kahn elimination
    std::vector<std::string> uncovered;    // no action rule triggers them
    std::vector<std::string> exit_problems;
    // Rules that could fire before a triggered plot point's predecessors are
    // discovered (their requires lack a matching "pp:" condition).
    std::vector<std::string> premature_rules;
    std::size_t ending_count = 0;

    bool valid() const;
    std::size_t problem_count() const;
    std::string describe() const;
};

ValidationReport validate_story(const StoryDefinition& def);

}  // namespace bdiplay::story
