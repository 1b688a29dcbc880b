// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "bdiplay/archetypes.hpp"
#include "bdiplay/evaluation.hpp"
#include "bdiplay/session.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace bdiplay;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kNormalizationSeconds = 1.0;
constexpr double kJaccardSeconds = 5.0;
constexpr double kSoundnessSeconds = 60.0;
constexpr double kArchetypeSeconds = 120.0;
constexpr double kOracleTolerance = 1e-12;
constexpr int kSoundnessRuns = 1000;
constexpr double kMinEndingRate = 0.95;
constexpr int kSeparationSeeds = 100;
constexpr int kArchetypeRuns = 20;

const std::string kStoryDir = BDIPLAY_STORY_DIR;
const std::string kFixtureDir = BDIPLAY_FIXTURE_DIR;
const std::string kStoryFile = kStoryDir + "/anchorhead-day2.json";

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << (o.detail.empty() ? "" : " | " + o.detail) << std::endl;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

const story::StoryDefinition& anchorhead() {
    static const auto def = story::load_story_file(kStoryFile);
    return def;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("bdiplay-acceptance-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int shell(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

std::string quoted(const std::string& s) { return "'" + s + "'"; }

// Predecessor lists read straight from the story file, independent of the
// loaded plot graph.
std::map<std::string, std::vector<std::string>> raw_predecessors(const std::string& path) {
    auto j = json::parse(slurp(path));
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& pp : j.at("plot_points"))
        out[pp.at("id").get<std::string>()] = pp.value("predecessors", std::vector<std::string>{});
    return out;
}

bool precedence_oracle(const std::map<std::string, std::vector<std::string>>& preds,
                       const std::vector<std::string>& seq) {
    std::set<std::string> seen;
    for (const auto& id : seq) {
        if (!preds.contains(id) || seen.contains(id)) return false;
        for (const auto& p : preds.at(id))
            if (!seen.contains(p)) return false;
        seen.insert(id);
    }
    return true;
}

const sim::ArchetypeScripts& archetypes() {
    static const auto a = sim::load_archetypes(kStoryDir + "/archetypes/anchorhead-day2.json");
    return a;
}

// ---- criteria

Outcome normalization() {
    Stopwatch sw;
    int bad = 0;
    for (int p1 = 1; p1 <= 5; ++p1)
        for (int p2 = 1; p2 <= 5; ++p2)
            for (int n1 = 1; n1 <= 5; ++n1) {
                double v = profile::normalize_factor(p1, p2, n1);
                // p1 + p2 - n1 spans [-3, 9]; min-max scale it.
                double oracle = (double(p1 + p2 - n1) - -3.0) / (9.0 - -3.0);
                if (!(v >= 0.0 && v <= 1.0) || std::abs(v - oracle) > kOracleTolerance) ++bad;
            }
    bool spots = profile::normalize_factor(5, 5, 1) == 1.0 && profile::normalize_factor(1, 1, 5) == 0.0;
    double t = sw.seconds();
    return {bad == 0 && spots && t < kNormalizationSeconds,
            "125 triples, " + std::to_string(bad) + " out of range or off the oracle, spot values " +
                (spots ? "exact" : "wrong") + ", " + fmt(t) + " s (limit " + fmt(kNormalizationSeconds) + ")"};
}

Outcome jaccard_oracle() {
    std::vector<std::set<std::string>> sets(256);
    for (unsigned m = 0; m < 256; ++m)
        for (int i = 0; i < 8; ++i)
            if (m & (1u << i)) sets[m].insert(std::string(1, char('a' + i)));
    Stopwatch sw;
    long mismatches = 0, pairs = 0;
    for (unsigned a = 0; a < 256; ++a)
        for (unsigned b = 0; b < 256; ++b, ++pairs) {
            double oracle = (a | b) == 0 ? 1.0 : double(std::popcount(a & b)) / double(std::popcount(a | b));
            if (eval::jaccard(sets[a], sets[b]) != oracle) ++mismatches;
        }
    double t = sw.seconds();
    return {mismatches == 0 && pairs == 65536 && t < kJaccardSeconds,
            std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches, " + fmt(t) + " s (limit " +
                fmt(kJaccardSeconds) + ")"};
}

Outcome soundness() {
    const auto& def = anchorhead();
    auto preds = raw_predecessors(kStoryFile);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Stopwatch sw;
    int violations = 0, endings = 0, unfaithful = 0;
    for (int i = 0; i < kSoundnessRuns; ++i) {
        agent::AgentConfig c;
        c.seed = std::uint64_t(i);
        // Every tenth run is uninformed; the rest draw a fresh profile.
        std::optional<profile::PlayerProfile> p;
        if (i % 10 != 9) p = profile::PlayerProfile{u(rng), u(rng), u(rng), u(rng)};
        auto t = agent::run_agent(def, p, c);
        if (!precedence_oracle(preds, t.plot_points) || !def.graph().respects_precedence(t.plot_points)) ++violations;
        if (!replays_faithfully(def, t)) ++unfaithful;
        if (t.ending && def.graph().endings().contains(*t.ending) && t.actions.size() <= std::size_t(c.max_ticks)) ++endings;
    }
    double t = sw.seconds();
    double rate = double(endings) / kSoundnessRuns;
    return {violations == 0 && unfaithful == 0 && rate >= kMinEndingRate && t < kSoundnessSeconds,
            std::to_string(kSoundnessRuns) + " runs, " + std::to_string(violations) + " precedence violations, " +
                std::to_string(unfaithful) + " illegal, ending rate " + fmt(rate) + " (min " + fmt(kMinEndingRate) +
                "), " + fmt(t) + " s (limit " + fmt(kSoundnessSeconds) + ")"};
}

Outcome determinism() {
    TempDir dir;
    std::ofstream(dir.file("p.json")) << R"({"f": 0.9, "gE": 0.1, "pE": 0.7, "p": 0.3})";
    auto cmd = [&](const std::string& out) {
        return shell(quoted(BDIPLAY_CLI) + " simulate --story " + quoted(kStoryFile) + " --profile " +
                     quoted(dir.file("p.json")) + " --runs 20 --seed 42 --out " + quoted(dir.file(out)));
    };
    if (cmd("a.jsonl") != 0 || cmd("b.jsonl") != 0) return {false, "simulate exited nonzero"};
    auto a = slurp(dir.file("a.jsonl")), b = slurp(dir.file("b.jsonl"));
    auto lines = std::count(a.begin(), a.end(), '\n');
    return {!a.empty() && a == b && lines == 20,
            std::to_string(lines) + " traces, " + std::to_string(a.size()) + " bytes, " +
                (a == b ? "byte-identical" : "files differ")};
}

Outcome grid_integrity() {
    TempDir dir;
    auto human = sim::play_script(anchorhead(), archetypes().scripts.at("explorer"), "explorer");
    {
        std::ofstream f(dir.file("human.jsonl"));
        write_traces(f, std::vector<Trace>{human});
    }
    if (shell(quoted(BDIPLAY_CLI) + " gridsearch --story " + quoted(kStoryFile) + " --trace " +
              quoted(dir.file("human.jsonl")) + " --runs 10 --out " + quoted(dir.file("grid.csv")) + " --json " +
              quoted(dir.file("grid.json"))) != 0)
        return {false, "gridsearch exited nonzero"};

    // Argmax over the CSV rows; ties keep the earlier, smaller profile.
    std::ifstream csv(dir.file("grid.csv"));
    std::string line;
    std::getline(csv, line);
    std::set<std::string> profiles;
    std::string best_bits;
    double best_mean = -1;
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::istringstream in(line);
        for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
        auto bits = cells.at(0) + cells.at(1) + cells.at(2) + cells.at(3);
        profiles.insert(bits);
        double mean = std::stod(cells.at(5));
        if (mean > best_mean || (mean == best_mean && bits < best_bits)) {
            best_mean = mean;
            best_bits = bits;
        }
    }
    auto j = json::parse(slurp(dir.file("grid.json")));
    auto grid = eval::grid_from_json(j);
    // Independent second route: recompute each mean from the exported values.
    std::string json_bits;
    double json_mean = -1;
    for (const auto& bp : profile::enumerate_binary_profiles()) {
        const auto& vals = grid.reports.at(bp).values;
        double m = 0;
        for (double v : vals) m += v;
        m /= double(vals.size());
        if (m > json_mean + 1e-12) {
            json_mean = m;
            json_bits = bp.bits();
        }
    }
    bool ok = rows == 16 && profiles.size() == 16 && grid.reports.size() == 16 && best_bits == grid.best_profile.bits() &&
              best_mean == grid.best_mean && json_bits == best_bits;
    return {ok, std::to_string(rows) + " profiles, reported best " + grid.best_profile.bits() + " (mean " +
                    fmt(grid.best_mean, 17) + "), csv argmax " + best_bits + ", value argmax " + json_bits};
}

Outcome separation() {
    const auto& def = anchorhead();
    auto mean_pp = [&](profile::PlayerProfile p) {
        double total = 0;
        for (int s = 0; s < kSeparationSeeds; ++s) {
            agent::AgentConfig c;
            c.seed = std::uint64_t(s);
            total += double(agent::run_agent(def, p, c).plot_points.size());
        }
        return total / kSeparationSeeds;
    };
    double worst_margin = 1e9;
    std::string worst;
    for (int f = 0; f <= 1; ++f)
        for (int g = 0; g <= 1; ++g)
            for (int p = 0; p <= 1; ++p) {
                double hi = mean_pp({double(f), double(g), 1.0, double(p)});
                double lo = mean_pp({double(f), double(g), 0.0, double(p)});
                if (hi - lo < worst_margin) {
                    worst_margin = hi - lo;
                    worst = "f" + std::to_string(f) + " gE" + std::to_string(g) + " p" + std::to_string(p);
                }
            }

    // Drops on the detour story, explore preference held low.
    const auto detour = story::load_story_file(kFixtureDir + "/detour.json");
    int low_without_drop = 0, high_with_drop = 0, combos = 0;
    for (int f = 0; f <= 1; ++f)
        for (int g = 0; g <= 1; ++g) {
            ++combos;
            for (int s = 0; s < kSeparationSeeds; ++s) {
                agent::AgentConfig c;
                c.seed = std::uint64_t(s);
                if (agent::run_agent_detailed(detour, profile::PlayerProfile{double(f), double(g), 0, 0}, c).dropped_goals.empty())
                    ++low_without_drop;
                if (!agent::run_agent_detailed(detour, profile::PlayerProfile{double(f), double(g), 0, 1}, c).dropped_goals.empty())
                    ++high_with_drop;
            }
        }
    bool ok = worst_margin > 0 && low_without_drop == 0 && high_with_drop == 0;
    return {ok, "smallest pE margin " + fmt(worst_margin) + " plot points (" + worst + "), detour over " +
                    std::to_string(combos * kSeparationSeeds) + " seeds per side: " + std::to_string(low_without_drop) +
                    " p=0 runs without a drop, " + std::to_string(high_with_drop) + " p=1 runs with one"};
}

Outcome informed_vs_uninformed() {
    Stopwatch sw;
    eval::EvalConfig cfg;
    cfg.runs = kArchetypeRuns;
    bool ok = true;
    std::string detail;
    for (const auto& name : {"explorer", "completionist", "speedrunner"}) {
        auto human = sim::play_script(anchorhead(), archetypes().scripts.at(name), name);
        auto grid = eval::grid_search(anchorhead(), human, cfg);
        sim::SimulationSpec ua;
        ua.story = &anchorhead();
        ua.runs = cfg.runs;
        ua.seed_base = cfg.seed_base;
        auto uninformed = eval::similarity_to_batch(human, sim::run_batch(ua));
        const auto& best = grid.reports.at(grid.best_profile);
        bool here = best.q1 >= uninformed.q1 && best.q3 >= uninformed.q3;
        ok &= here;
        detail += std::string(detail.empty() ? "" : "; ") + name + " best " + grid.best_profile.bits() + " q1 " +
                  fmt(best.q1) + "/" + fmt(uninformed.q1) + " q3 " + fmt(best.q3) + "/" + fmt(uninformed.q3);
    }
    double t = sw.seconds();
    ok &= t < kArchetypeSeconds;
    return {ok, detail + " (informed/uninformed), " + fmt(t) + " s (limit " + fmt(kArchetypeSeconds) + ")"};
}

Outcome binarization() {
    using profile::BinaryProfile;
    bool boundary = profile::binarize({0.5, 0.5, 0.5, 0.5}) == BinaryProfile{} &&
                    profile::binarize({0, 0, 0, 0}) == BinaryProfile{};
    double above = std::nextafter(0.5, 1.0);
    bool above_ok = profile::binarize({above, above, above, above}) == BinaryProfile{true, true, true, true};
    int replay_bad = 0;
    for (int k = 0; k <= 100; ++k) {
        double f = k / 100.0;
        profile::PlayerProfile p{f, 0.3, 0.6, 0.9};
        for (int g = 1; g <= 4; ++g) {
            auto r = profile::apply_replay_rule(p, g);
            double want = (g >= 2 && f < 0.5) ? 1.0 : f;
            if (r.f != want || r.gE != p.gE || r.pE != p.pE || r.p != p.p) ++replay_bad;
        }
    }
    return {boundary && above_ok && replay_bad == 0,
            std::string("0.5 -> ") + (boundary ? "low" : "high") + ", nextafter(0.5) -> " + (above_ok ? "high" : "low") +
                ", replay rule mismatches " + std::to_string(replay_bad) + " of 404"};
}

Outcome replay_fidelity() {
    TempDir dir;
    service::StoryRegistry reg;
    reg.add(story::load_story_file(kStoryFile));
    std::vector<std::vector<std::string>> stored;
    {
        service::SessionStore store(reg, dir.path);
        for (const auto& [name, script] : archetypes().scripts) {
            auto s = store.create_session("anchorhead-day2");
            store.post_questionnaire(s.id, std::vector<int>(10, 3));
            for (const auto& a : script) store.post_action(s.id, a);
        }
        // Random legal play, some sessions cut short.
        std::mt19937_64 rng(7);
        for (int i = 0; i < 12; ++i) {
            auto s = store.create_session("anchorhead-day2");
            int steps = 40 + int(rng() % 200);
            for (int k = 0; k < steps; ++k) {
                auto acts = store.available(s.id);
                if (acts.empty()) break;
                store.post_action(s.id, acts[rng() % acts.size()]);
            }
        }
    }
    service::SessionStore reopened(reg, dir.path);
    auto traces = reopened.export_human_traces();
    int bad = 0;
    for (const auto& t : traces) {
        // Manual re-application alongside the library check.
        auto state = story::initial_state(anchorhead());
        bool legal = true;
        for (const auto& ta : t.actions) {
            try {
                state = story::apply_action(anchorhead(), state, ta.action).new_state;
            } catch (const story::IllegalActionError&) {
                legal = false;
                break;
            }
        }
        if (!legal || state.discovered != t.plot_points || !replays_faithfully(anchorhead(), t)) ++bad;
    }
    return {bad == 0 && traces.size() == 15,
            std::to_string(traces.size()) + " persisted traces, " + std::to_string(bad) + " not reproduced"};
}

}  // namespace

int main() {
    report("normalization", normalization);
    report("jaccard oracle", jaccard_oracle);
    report("plot-graph soundness", soundness);
    report("simulate determinism", determinism);
    report("grid search integrity", grid_integrity);
    report("profile behavioural separation", separation);
    report("informed vs uninformed quartiles", informed_vs_uninformed);
    report("binarization boundary and replay rule", binarization);
    report("trace replay fidelity", replay_fidelity);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
