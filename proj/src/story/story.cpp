#include "bdiplay/story.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace bdiplay::story {

using nlohmann::json;

namespace {

constexpr std::pair<Verb, std::string_view> kVerbNames[] = {
    {Verb::Goto, "goto"}, {Verb::Examine, "examine"}, {Verb::Take, "take"}, {Verb::Open, "open"},
    {Verb::Read, "read"}, {Verb::Use, "use"},         {Verb::Give, "give"}, {Verb::Talk, "talk"},
    {Verb::Ask, "ask"},   {Verb::Buy, "buy"},         {Verb::Show, "show"},
};

}  // namespace

std::string_view to_string(Verb v) {
    for (const auto& [verb, name] : kVerbNames)
        if (verb == v) return name;
    return "?";
}

std::optional<Verb> parse_verb(std::string_view s) {
    for (const auto& [verb, name] : kVerbNames)
        if (name == s) return verb;
    return std::nullopt;
}

bool is_generic(Verb v) {
    return v == Verb::Goto || v == Verb::Examine || v == Verb::Take || v == Verb::Talk;
}

bool requires_object(Verb v) {
    return v == Verb::Give || v == Verb::Ask || v == Verb::Show || v == Verb::Use;
}

std::string Action::key() const {
    std::string out{to_string(verb)};
    out += ' ';
    out += subject;
    if (object) {
        out += ' ';
        out += *object;
    }
    return out;
}

std::optional<Action> parse_action_key(std::string_view key) {
    std::istringstream in{std::string(key)};
    std::string verb, subject, object, extra;
    if (!(in >> verb >> subject)) return std::nullopt;
    auto v = parse_verb(verb);
    if (!v) return std::nullopt;
    Action a{*v, subject, std::nullopt};
    if (in >> object) a.object = object;
    if (in >> extra) return std::nullopt;
    return a;
}

// ---------------------------------------------------------------------------
// PlotGraph

PlotGraph::PlotGraph(std::vector<PlotPoint> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        index_.emplace(points_[i].id, i);
        if (points_[i].is_ending) endings_.insert(points_[i].id);
    }
}

const PlotPoint* PlotGraph::find(std::string_view id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &points_[it->second];
}

std::vector<std::string> PlotGraph::roots() const {
    std::vector<std::string> out;
    for (const auto& pp : points_)
        if (pp.predecessors.empty()) out.push_back(pp.id);
    return out;
}

bool PlotGraph::respects_precedence(const std::vector<std::string>& order) const {
    std::set<std::string> seen;
    for (const auto& id : order) {
        const PlotPoint* pp = find(id);
        if (pp == nullptr || seen.contains(id)) return false;
        for (const auto& pred : pp->predecessors)
            if (!seen.contains(pred)) return false;
        seen.insert(id);
    }
    return true;
}

// ---------------------------------------------------------------------------
// Conditions and effects

Condition Condition::parse(std::string_view text) {
    Condition c;
    if (!text.empty() && text.front() == '!') {
        c.negated = true;
        text.remove_prefix(1);
    }
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon + 1 >= text.size())
        throw std::invalid_argument("malformed condition: " + std::string(text));
    auto kind = text.substr(0, colon);
    c.arg = std::string(text.substr(colon + 1));
    if (kind == "has") c.kind = Kind::Has;
    else if (kind == "pp") c.kind = Kind::Discovered;
    else if (kind == "flag") c.kind = Kind::Flag;
    else if (kind == "at") c.kind = Kind::At;
    else if (kind == "visited") c.kind = Kind::Visited;
    else throw std::invalid_argument("unknown condition kind: " + std::string(kind));
    return c;
}

std::string Condition::text() const {
    std::string_view kind;
    switch (this->kind) {
        case Kind::Has: kind = "has"; break;
        case Kind::Discovered: kind = "pp"; break;
        case Kind::Flag: kind = "flag"; break;
        case Kind::At: kind = "at"; break;
        case Kind::Visited: kind = "visited"; break;
    }
    return (negated ? "!" : "") + std::string(kind) + ":" + arg;
}

Effect Effect::parse(std::string_view text) {
    Effect e;
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon + 1 >= text.size())
        throw std::invalid_argument("malformed effect: " + std::string(text));
    auto kind = text.substr(0, colon);
    std::string arg(text.substr(colon + 1));
    if (kind == "give") e.kind = Kind::Give;
    else if (kind == "remove") e.kind = Kind::Remove;
    else if (kind == "place") e.kind = Kind::Place;
    else if (kind == "set") e.kind = Kind::Set;
    else if (kind == "clear") e.kind = Kind::Clear;
    else if (kind == "move") e.kind = Kind::Move;
    else throw std::invalid_argument("unknown effect kind: " + std::string(kind));
    if (e.kind == Kind::Place) {
        auto at = arg.find('@');
        if (at == std::string::npos || at == 0 || at + 1 >= arg.size())
            throw std::invalid_argument("place effect needs item@location: " + std::string(text));
        e.location = arg.substr(at + 1);
        arg.resize(at);
    }
    e.arg = std::move(arg);
    return e;
}

std::string Effect::text() const {
    switch (kind) {
        case Kind::Give: return "give:" + arg;
        case Kind::Remove: return "remove:" + arg;
        case Kind::Place: return "place:" + arg + "@" + location;
        case Kind::Set: return "set:" + arg;
        case Kind::Clear: return "clear:" + arg;
        case Kind::Move: return "move:" + arg;
    }
    return {};
}

// ---------------------------------------------------------------------------
// StoryDefinition

StoryDefinition::StoryDefinition(std::string id, std::string title, std::optional<std::string> start,
                                 WorldModel world, PlotGraph graph)
    : id_(std::move(id)),
      title_(std::move(title)),
      start_(std::move(start)),
      world_(std::move(world)),
      graph_(std::move(graph)) {
    build_index();
}

void StoryDefinition::build_index() {
    for (std::size_t i = 0; i < world_.locations.size(); ++i) loc_index_.emplace(world_.locations[i].id, i);
    for (std::size_t i = 0; i < world_.items.size(); ++i) item_index_.emplace(world_.items[i].id, i);
    for (std::size_t i = 0; i < world_.characters.size(); ++i) char_index_.emplace(world_.characters[i].id, i);
    for (std::size_t i = 0; i < world_.action_rules.size(); ++i)
        rule_index_.emplace(world_.action_rules[i].action().key(), i);
}

const Location* StoryDefinition::location(std::string_view id) const {
    auto it = loc_index_.find(id);
    return it == loc_index_.end() ? nullptr : &world_.locations[it->second];
}

const Item* StoryDefinition::item(std::string_view id) const {
    auto it = item_index_.find(id);
    return it == item_index_.end() ? nullptr : &world_.items[it->second];
}

const Character* StoryDefinition::character(std::string_view id) const {
    auto it = char_index_.find(id);
    return it == char_index_.end() ? nullptr : &world_.characters[it->second];
}

std::vector<const ActionRule*> StoryDefinition::rules_for(const Action& a) const {
    std::vector<const ActionRule*> out;
    auto [lo, hi] = rule_index_.equal_range(a.key());
    for (auto it = lo; it != hi; ++it) out.push_back(&world_.action_rules[it->second]);
    std::sort(out.begin(), out.end());  // declaration order
    return out;
}

// ---------------------------------------------------------------------------
// Loading

StoryParseError::StoryParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("story parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

}  // namespace

UnresolvedReferenceError::UnresolvedReferenceError(std::vector<std::string> missing)
    : std::runtime_error("unresolved references: " + join(missing, ", ")), missing_(std::move(missing)) {}

namespace {

// Structural errors carry no source position; report them at line 0.
[[noreturn]] void structure_error(const std::string& msg) { throw StoryParseError(msg, 0, 0); }

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string get_string(const json& j, const char* key, const std::string& where, bool required = true) {
    if (!j.contains(key)) {
        if (required) structure_error(where + ": missing \"" + key + "\"");
        return {};
    }
    if (!j.at(key).is_string()) structure_error(where + ": \"" + key + "\" must be a string");
    return j.at(key).get<std::string>();
}

std::vector<std::string> get_strings(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return {};
    const auto& arr = j.at(key);
    if (!arr.is_array()) structure_error(where + ": \"" + key + "\" must be an array");
    std::vector<std::string> out;
    for (const auto& x : arr) {
        if (!x.is_string()) structure_error(where + ": \"" + key + "\" entries must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) structure_error(std::string("\"") + key + "\" must be a boolean");
    return j.at(key).get<bool>();
}

const json& get_array(const json& doc, const char* key) {
    static const json empty = json::array();
    if (!doc.contains(key)) return empty;
    if (!doc.at(key).is_array()) structure_error(std::string("\"") + key + "\" must be an array");
    return doc.at(key);
}

template <typename T, typename F>
std::vector<T> parse_all(const std::vector<std::string>& texts, const std::string& where, F parse) {
    std::vector<T> out;
    for (const auto& t : texts) {
        try {
            out.push_back(parse(t));
        } catch (const std::invalid_argument& e) {
            structure_error(where + ": " + e.what());
        }
    }
    return out;
}

StoryDefinition build(const json& doc) {
    if (!doc.is_object()) structure_error("story document must be a JSON object");

    std::vector<PlotPoint> points;
    for (const auto& jp : get_array(doc, "plot_points")) {
        PlotPoint pp;
        pp.id = get_string(jp, "id", "plot point");
        pp.label = get_string(jp, "label", "plot point " + pp.id, false);
        if (pp.label.empty()) pp.label = pp.id;
        auto preds = get_strings(jp, "predecessors", "plot point " + pp.id);
        pp.predecessors = {preds.begin(), preds.end()};
        pp.is_ending = get_bool(jp, "is_ending", false);
        points.push_back(std::move(pp));
    }
    if (points.empty()) structure_error("no plot points");

    WorldModel world;
    for (const auto& jl : get_array(doc, "locations")) {
        Location loc;
        loc.id = get_string(jl, "id", "location");
        const std::string where = "location " + loc.id;
        loc.description = get_string(jl, "description", where, false);
        loc.is_indoor = get_bool(jl, "is_indoor", false);
        if (jl.contains("exits")) {
            if (!jl.at("exits").is_array()) structure_error(where + ": \"exits\" must be an array");
            for (const auto& je : jl.at("exits")) {
                Exit ex;
                if (je.is_string()) {
                    ex.to = je.get<std::string>();
                } else if (je.is_object()) {
                    ex.to = get_string(je, "to", where + " exit");
                    ex.one_way = get_bool(je, "one_way", false);
                    ex.requires_ = parse_all<Condition>(get_strings(je, "requires", where), where, Condition::parse);
                } else {
                    structure_error(where + ": exits must be strings or objects");
                }
                loc.exits.push_back(std::move(ex));
            }
        }
        world.locations.push_back(std::move(loc));
    }

    for (const auto& ji : get_array(doc, "items")) {
        Item it;
        it.id = get_string(ji, "id", "item");
        it.description = get_string(ji, "description", "item " + it.id, false);
        if (ji.contains("location") && !ji.at("location").is_null())
            it.location = get_string(ji, "location", "item " + it.id);
        it.takeable = get_bool(ji, "takeable", false);
        it.importance_hint = get_bool(ji, "importance_hint", false);
        world.items.push_back(std::move(it));
    }

    for (const auto& jc : get_array(doc, "characters")) {
        Character ch;
        ch.id = get_string(jc, "id", "character");
        ch.description = get_string(jc, "description", "character " + ch.id, false);
        ch.location = get_string(jc, "location", "character " + ch.id);
        ch.topics = get_strings(jc, "topics", "character " + ch.id);
        world.characters.push_back(std::move(ch));
    }

    std::size_t n = 0;
    for (const auto& jr : get_array(doc, "action_rules")) {
        ActionRule r;
        r.id = get_string(jr, "id", "action rule", false);
        if (r.id.empty()) r.id = "rule-" + std::to_string(n);
        ++n;
        const std::string where = "action rule " + r.id;
        auto verb = parse_verb(get_string(jr, "verb", where));
        if (!verb) structure_error(where + ": unknown verb");
        r.verb = *verb;
        r.subject = get_string(jr, "subject", where);
        if (jr.contains("object") && !jr.at("object").is_null()) r.object = get_string(jr, "object", where);
        if (requires_object(r.verb) != r.object.has_value())
            structure_error(where + ": verb " + std::string(to_string(r.verb)) +
                            (r.object ? " takes no object" : " requires an object"));
        r.requires_ = parse_all<Condition>(get_strings(jr, "requires", where), where, Condition::parse);
        r.effects = parse_all<Effect>(get_strings(jr, "effects", where), where, Effect::parse);
        r.triggers = get_strings(jr, "triggers", where);
        world.action_rules.push_back(std::move(r));
    }

    std::optional<std::string> start;
    if (doc.contains("start") && !doc.at("start").is_null()) start = get_string(doc, "start", "story");

    return StoryDefinition(get_string(doc, "id", "story", false), get_string(doc, "title", "story", false),
                           std::move(start), std::move(world), PlotGraph(std::move(points)));
}

// Every id mentioned anywhere must name something declared.
void resolve(const StoryDefinition& def) {
    std::vector<std::string> missing;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok && std::find(missing.begin(), missing.end(), what) == missing.end()) missing.push_back(what);
    };
    const auto& g = def.graph();
    auto entity = [&](const std::string& id) {
        return def.location(id) || def.item(id) || def.character(id);
    };

    std::set<std::string> seen;
    for (const auto& pp : g.points()) {
        if (!seen.insert(pp.id).second) structure_error("duplicate plot point id " + pp.id);
        for (const auto& pred : pp.predecessors) need(g.contains(pred), "plot point " + pred);
    }
    if (def.start()) need(def.location(*def.start()) != nullptr, "location " + *def.start());

    auto check_condition = [&](const Condition& c) {
        switch (c.kind) {
            case Condition::Kind::Has: need(def.item(c.arg) != nullptr, "item " + c.arg); break;
            case Condition::Kind::Discovered: need(g.contains(c.arg), "plot point " + c.arg); break;
            case Condition::Kind::At:
            case Condition::Kind::Visited: need(def.location(c.arg) != nullptr, "location " + c.arg); break;
            case Condition::Kind::Flag: break;
        }
    };

    for (const auto& loc : def.world().locations) {
        for (const auto& ex : loc.exits) {
            need(def.location(ex.to) != nullptr, "location " + ex.to);
            for (const auto& c : ex.requires_) check_condition(c);
        }
    }
    for (const auto& it : def.world().items)
        if (!it.location.empty()) need(def.location(it.location) != nullptr, "location " + it.location);
    for (const auto& ch : def.world().characters) need(def.location(ch.location) != nullptr, "location " + ch.location);

    for (const auto& r : def.world().action_rules) {
        switch (r.verb) {
            case Verb::Goto: need(def.location(r.subject) != nullptr, "location " + r.subject); break;
            case Verb::Talk: need(def.character(r.subject) != nullptr, "character " + r.subject); break;
            case Verb::Ask:
                need(def.character(r.subject) != nullptr, "character " + r.subject);
                if (const Character* ch = def.character(r.subject); ch && r.object)
                    need(std::find(ch->topics.begin(), ch->topics.end(), *r.object) != ch->topics.end(),
                         "topic " + r.subject + "/" + *r.object);
                break;
            default: need(entity(r.subject), "entity " + r.subject); break;
        }
        if (r.object && r.verb != Verb::Ask) need(entity(*r.object), "entity " + *r.object);
        for (const auto& c : r.requires_) check_condition(c);
        for (const auto& e : r.effects) {
            switch (e.kind) {
                case Effect::Kind::Give:
                case Effect::Kind::Remove: need(def.item(e.arg) != nullptr, "item " + e.arg); break;
                case Effect::Kind::Place:
                    need(def.item(e.arg) != nullptr, "item " + e.arg);
                    need(def.location(e.location) != nullptr, "location " + e.location);
                    break;
                case Effect::Kind::Move: need(def.location(e.arg) != nullptr, "location " + e.arg); break;
                default: break;
            }
        }
        for (const auto& t : r.triggers) need(g.contains(t), "plot point " + t);
    }
    if (!missing.empty()) throw UnresolvedReferenceError(std::move(missing));
}

}  // namespace

StoryDefinition load_story_string(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw StoryParseError(e.what(), line, col);
    }
    StoryDefinition def;
    try {
        def = build(doc);
    } catch (const json::exception& e) {
        structure_error(e.what());
    }
    resolve(def);
    return def;
}

StoryDefinition load_story(std::istream& source) {
    std::ostringstream buf;
    buf << source.rdbuf();
    return load_story_string(buf.str());
}

StoryDefinition load_story_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open story file: " + path);
    return load_story(in);
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::valid() const { return problem_count() == 0; }

std::size_t ValidationReport::problem_count() const {
    return (acyclic ? 0 : 1) + unreachable.size() + uncovered.size() + exit_problems.size() +
           premature_rules.size() + (ending_count == 0 ? 1 : 0);
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    out << "acyclic: " << (acyclic ? "yes" : "no");
    if (!acyclic) out << " (cycle: " << join(cycle, " -> ") << ")";
    out << "\nendings: " << ending_count << "\n";
    if (!unreachable.empty()) out << "unreachable plot points: " << join(unreachable, ", ") << "\n";
    if (!uncovered.empty()) out << "plot points with no triggering rule: " << join(uncovered, ", ") << "\n";
    for (const auto& p : exit_problems) out << "exit: " << p << "\n";
    for (const auto& p : premature_rules) out << "rule: " << p << "\n";
    if (ending_count == 0) out << "no endings declared\n";
    out << (valid() ? "valid" : "invalid") << " (" << problem_count() << " problems)\n";
    return out.str();
}

namespace {

std::vector<std::string> find_cycle(const PlotGraph& g, const std::set<std::string>& candidates) {
    // Walk predecessor edges inside the leftover set; any walk must revisit a node.
    if (candidates.empty()) return {};
    std::vector<std::string> path;
    std::map<std::string, std::size_t> pos;
    std::string cur = *candidates.begin();
    while (!pos.contains(cur)) {
        pos[cur] = path.size();
        path.push_back(cur);
        const PlotPoint* pp = g.find(cur);
        std::string next;
        for (const auto& pred : pp->predecessors) {
            if (candidates.contains(pred)) {
                next = pred;
                break;
            }
        }
        cur = next;
    }
    std::vector<std::string> cycle(path.begin() + static_cast<long>(pos[cur]), path.end());
    std::reverse(cycle.begin(), cycle.end());  // edge direction: predecessor -> successor
    cycle.push_back(cycle.front());
    return cycle;
}

}  // namespace

ValidationReport validate_story(const StoryDefinition& def) {
    ValidationReport report;
    const auto& g = def.graph();
    report.ending_count = g.endings().size();

    // Kahn elimination.
    std::map<std::string, std::size_t> indegree;
    std::map<std::string, std::vector<std::string>> successors;
    for (const auto& pp : g.points()) {
        indegree[pp.id] = pp.predecessors.size();
        for (const auto& pred : pp.predecessors) successors[pred].push_back(pp.id);
    }
    std::vector<std::string> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.push_back(id);
    std::set<std::string> consumed;
    while (!ready.empty()) {
        std::string id = ready.back();
        ready.pop_back();
        consumed.insert(id);
        for (const auto& s : successors[id])
            if (--indegree[s] == 0) ready.push_back(s);
    }
    std::set<std::string> leftover;
    for (const auto& pp : g.points())
        if (!consumed.contains(pp.id)) {
            leftover.insert(pp.id);
            report.unreachable.push_back(pp.id);
        }
    if (!leftover.empty()) {
        // Nodes downstream of a cycle are also left over; look for the cycle among
        // nodes that still have a leftover predecessor.
        report.acyclic = false;
        report.cycle = find_cycle(g, leftover);
    }

    std::set<std::string> triggered;
    for (const auto& r : def.world().action_rules) triggered.insert(r.triggers.begin(), r.triggers.end());
    for (const auto& pp : g.points())
        if (!triggered.contains(pp.id)) report.uncovered.push_back(pp.id);

    for (const auto& r : def.world().action_rules) {
        for (const auto& t : r.triggers) {
            const PlotPoint* pp = g.find(t);
            if (pp == nullptr) continue;
            for (const auto& pred : pp->predecessors) {
                bool guarded = std::any_of(r.requires_.begin(), r.requires_.end(), [&](const Condition& c) {
                    return c.kind == Condition::Kind::Discovered && !c.negated && c.arg == pred;
                });
                if (!guarded) report.premature_rules.push_back(r.id + " triggers " + t + " without pp:" + pred);
            }
        }
    }

    for (const auto& loc : def.world().locations) {
        for (const auto& ex : loc.exits) {
            if (ex.one_way) continue;
            const Location* to = def.location(ex.to);
            if (to == nullptr) continue;
            bool back = std::any_of(to->exits.begin(), to->exits.end(),
                                    [&](const Exit& e) { return e.to == loc.id; });
            if (!back) report.exit_problems.push_back(loc.id + " -> " + ex.to + " has no return exit");
        }
    }
    return report;
}

}  // namespace bdiplay::story
