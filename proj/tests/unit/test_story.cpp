#include "doctest.h"

#include "bdiplay/engine.hpp"
#include "support.hpp"

#include "json.hpp"

#include <functional>
#include <random>
#include <set>
#include <tuple>

using namespace bdiplay::story;
using nlohmann::json;
using testing::anchorhead;
using testing::fixture;

namespace {

Action act(Verb v, std::string s, std::optional<std::string> o = std::nullopt) { return {v, std::move(s), std::move(o)}; }

GameState play(const StoryDefinition& def, const std::vector<Action>& actions) {
    auto s = initial_state(def);
    for (const auto& a : actions) s = apply_action(def, s, a).new_state;
    return s;
}

json linear_json() { return json::parse(testing::slurp(testing::fixture_path("linear.json"))); }

// One room, one examinable item per plot point; examining item k triggers k
// once its predecessors are discovered.
json graph_story(const std::vector<std::set<int>>& preds) {
    json j{{"id", "g"}, {"title", "g"}, {"start", "r"}};
    j["locations"] = json::array({{{"id", "r"}, {"description", "r"}, {"exits", json::array()}}});
    j["items"] = json::array();
    j["characters"] = json::array();
    j["plot_points"] = json::array();
    j["action_rules"] = json::array();
    int n = int(preds.size());
    for (int k = 0; k < n; ++k) {
        std::string id = "p" + std::to_string(k);
        json pp{{"id", id}, {"label", id}, {"predecessors", json::array()}};
        json rule{{"id", "r" + std::to_string(k)}, {"verb", "examine"}, {"subject", "i" + std::to_string(k)},
                  {"triggers", {id}}, {"requires", json::array()}};
        for (int p : preds[k]) {
            pp["predecessors"].push_back("p" + std::to_string(p));
            rule["requires"].push_back("pp:p" + std::to_string(p));
        }
        if (k == n - 1) pp["is_ending"] = true;
        j["plot_points"].push_back(pp);
        j["action_rules"].push_back(rule);
        j["items"].push_back({{"id", "i" + std::to_string(k)}, {"location", "r"}, {"description", "x"}});
    }
    return j;
}

bool has_cycle_oracle(const std::vector<std::set<int>>& preds) {
    int n = int(preds.size());
    std::vector<int> color(n, 0);
    std::function<bool(int)> visit = [&](int v) {
        color[v] = 1;
        for (int p : preds[v]) {
            if (color[p] == 1) return true;
            if (color[p] == 0 && visit(p)) return true;
        }
        color[v] = 2;
        return false;
    };
    for (int v = 0; v < n; ++v)
        if (color[v] == 0 && visit(v)) return true;
    return false;
}

bool contains(const std::vector<Action>& v, const Action& a) { return std::find(v.begin(), v.end(), a) != v.end(); }

}  // namespace

TEST_CASE("shipped story loads with the reference plot points and two endings") {
    const auto& def = anchorhead();
    std::set<std::string> non_endings;
    for (const auto& p : def.graph().points())
        if (!p.is_ending) non_endings.insert(p.id);
    const auto& ref = testing::reference_plot_points();
    CHECK(non_endings == std::set<std::string>(ref.begin(), ref.end()));
    CHECK(non_endings.size() == 26);
    CHECK(def.graph().endings() == std::set<std::string>{"ending-a", "ending-b"});
    CHECK(def.graph().respects_precedence(ref));
}

TEST_CASE("load errors") {
    SUBCASE("no plot points") {
        auto j = linear_json();
        j["plot_points"] = json::array();
        j["action_rules"] = json::array();
        try {
            load_story_string(j.dump());
            FAIL("expected a parse error");
        } catch (const StoryParseError& e) {
            CHECK(std::string(e.what()).find("no plot points") != std::string::npos);
        }
    }
    SUBCASE("unknown location") {
        auto j = linear_json();
        j["items"][0]["location"] = "attic";
        try {
            load_story_string(j.dump());
            FAIL("expected an unresolved reference");
        } catch (const UnresolvedReferenceError& e) {
            REQUIRE(e.missing().size() == 1);
            CHECK(e.missing()[0].find("attic") != std::string::npos);
        }
    }
    SUBCASE("malformed json reports a position") {
        try {
            load_story_string("{\n  \"id\": \"x\",\n  oops\n}");
            FAIL("expected a parse error");
        } catch (const StoryParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("missing start") {
        auto j = linear_json();
        j.erase("start");
        auto def = load_story_string(j.dump());
        CHECK_THROWS_AS(initial_state(def), MissingStartError);
    }
}

TEST_CASE("validation") {
    SUBCASE("shipped story is clean") {
        auto r = validate_story(anchorhead());
        CHECK(r.valid());
        CHECK(r.problem_count() == 0);
        CHECK(r.ending_count == 2);
    }
    SUBCASE("cycle is named") {
        auto r = validate_story(fixture("cyclic"));
        CHECK_FALSE(r.acyclic);
        CHECK_FALSE(r.valid());
        REQUIRE(r.cycle.size() == 3);
        CHECK(r.cycle.front() == r.cycle.back());
        CHECK(std::set<std::string>(r.cycle.begin(), r.cycle.end()) == std::set<std::string>{"a", "b"});
    }
    SUBCASE("uncovered plot point is named") {
        auto j = linear_json();
        j["action_rules"].erase(1);  // take-key
        auto r = validate_story(load_story_string(j.dump()));
        CHECK_FALSE(r.valid());
        CHECK(r.uncovered == std::vector<std::string>{"b"});
    }
    SUBCASE("fixtures are clean") {
        CHECK(validate_story(fixture("linear")).valid());
        CHECK(validate_story(fixture("detour")).valid());
    }
}

TEST_CASE("validation accepts a graph iff elimination consumes every node") {
    std::mt19937_64 rng(11);
    int cyclic = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + int(rng() % 5);
        std::vector<std::set<int>> preds(n);
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u)
                if (u != v && rng() % 5 == 0) preds[v].insert(u);
        bool cycle = has_cycle_oracle(preds);
        cyclic += cycle;
        auto r = validate_story(load_story_string(graph_story(preds).dump()));
        CHECK(r.acyclic == !cycle);
        CHECK(r.unreachable.empty() == !cycle);
    }
    CHECK(cyclic > 20);  // the generator exercises both branches
}

TEST_CASE("initial state") {
    auto s = initial_state(anchorhead());
    CHECK(s.current_location == "livingroom");
    CHECK(s.discovered.empty());
    CHECK(s.tick == 0);
    CHECK_FALSE(is_terminal(anchorhead(), s));
    auto acts = available_actions(anchorhead(), s);
    CHECK(contains(acts, act(Verb::Goto, "hall")));
    CHECK(contains(acts, act(Verb::Goto, "street")));
    CHECK(std::is_sorted(acts.begin(), acts.end(), [](const Action& a, const Action& b) {
        return std::tuple(to_string(a.verb), a.subject, a.object) < std::tuple(to_string(b.verb), b.subject, b.object);
    }));
}

TEST_CASE("rule preconditions follow the plot graph") {
    const auto& def = anchorhead();
    auto s = play(def, {act(Verb::Goto, "hall"), act(Verb::Goto, "study")});
    CHECK(s.current_location == "study");
    CHECK_FALSE(contains(available_actions(def, s), act(Verb::Open, "safe")));
    CHECK_THROWS_AS(apply_action(def, s, act(Verb::Open, "safe")), IllegalActionError);

    s = play(def, {act(Verb::Goto, "hall"), act(Verb::Goto, "bedroom"), act(Verb::Take, "paper-scrap"),
                   act(Verb::Goto, "hall"), act(Verb::Goto, "study")});
    CHECK(s.has_discovered("get-safe-combo"));
    REQUIRE(contains(available_actions(def, s), act(Verb::Open, "safe")));
    auto r = apply_action(def, s, act(Verb::Open, "safe"));
    CHECK(r.triggered == std::vector<std::string>{"open-safe"});
    CHECK(r.new_state.tick == s.tick + 1);
}

TEST_CASE("examine without a rule only advances the clock") {
    const auto& def = anchorhead();
    auto s = initial_state(def);
    auto r = apply_action(def, s, act(Verb::Examine, "umbrella"));
    CHECK(r.triggered.empty());
    auto expected = s;
    expected.tick = 1;
    CHECK(r.new_state == expected);
}

TEST_CASE("is_terminal") {
    const auto& def = anchorhead();
    auto s = initial_state(def);
    s.discovered = {"examine-album", "ending-a"};
    CHECK(is_terminal(def, s) == "ending-a");
    CHECK(available_actions(def, s).empty());
    s.discovered = {"ending-b", "ending-a"};
    CHECK(is_terminal(def, s) == "ending-b");
}

TEST_CASE("random walks stay legal, respect precedence and are pure") {
    for (const auto* def : {&anchorhead(), &fixture("linear"), &fixture("detour")}) {
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            std::mt19937_64 rng(seed);
            auto s = initial_state(*def);
            for (long step = 1; step <= 300; ++step) {
                auto acts = available_actions(*def, s);
                if (acts.empty()) break;
                const auto& a = acts[rng() % acts.size()];
                auto r = apply_action(*def, s, a);
                auto again = apply_action(*def, s, a);
                REQUIRE(again.new_state == r.new_state);
                REQUIRE(again.triggered == r.triggered);
                s = r.new_state;
                REQUIRE(s.tick == step);
                REQUIRE(def->graph().respects_precedence(s.discovered));
            }
        }
    }
}

TEST_CASE("the toy linear story has exactly one complete plot-point sequence") {
    const auto& def = fixture("linear");
    std::set<std::vector<std::string>> outcomes;
    std::function<void(const GameState&, int)> explore = [&](const GameState& s, int depth) {
        if (is_terminal(def, s)) {
            outcomes.insert(s.discovered);
            return;
        }
        if (depth == 0) return;
        for (const auto& a : available_actions(def, s)) explore(apply_action(def, s, a).new_state, depth - 1);
    };
    explore(initial_state(def), 8);
    CHECK(outcomes == std::set<std::vector<std::string>>{{"a", "b", "c"}});
}

TEST_CASE("action keys round-trip") {
    for (const auto& a : {act(Verb::Goto, "hall"), act(Verb::Give, "flask", "bum"), act(Verb::Ask, "bum", "photo")}) {
        auto back = parse_action_key(a.key());
        REQUIRE(back);
        CHECK(*back == a);
    }
    CHECK(act(Verb::Give, "flask", "bum").key() == "give flask bum");
    CHECK_FALSE(parse_action_key("dance wildly"));
}
