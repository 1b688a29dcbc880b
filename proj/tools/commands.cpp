#include "commands.hpp"

#include "bdiplay/evaluation.hpp"
#include "bdiplay/http_api.hpp"
#include "bdiplay/session.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <thread>

namespace bdiplay::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Unreadable inputs and unwritable outputs; exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad data or a failed check; exit code 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path, const char* what) {
    if (!fs::is_regular_file(path)) throw IoError(std::string("no such ") + what + " file: " + path);
    std::ifstream in(path);
    if (!in) throw IoError(std::string("cannot read ") + what + " file: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

void close_out(std::ofstream& out, const std::string& path) {
    out.close();
    if (!out) throw IoError("write failed: " + path);
}

story::StoryDefinition read_story(const std::string& path) {
    auto in = open_in(path, "story");
    return story::load_story(in);
}

std::vector<Trace> read_traces(const std::string& path) {
    auto in = open_in(path, "trace");
    return bdiplay::read_traces(in);
}

// Either a profile ({f, gE, pE, p}) or questionnaire answers
// ({answers, familiar?, game_index?}).
profile::PlayerProfile profile_from_doc(const json& j) {
    if (!j.is_object()) throw DomainError("profile document must be a JSON object");
    if (!j.contains("answers")) return profile_from_json(j);
    profile::LikertResponse r{j.at("answers").get<std::vector<int>>()};
    const auto& q = profile::Questionnaire::standard();
    auto p = j.contains("familiar") ? profile::build_profile(q, r, j.at("familiar").get<bool>())
                                    : profile::build_profile(q, r);
    return profile::apply_replay_rule(p, j.value("game_index", 1));
}

std::string num(double x) { return json(x).dump(); }

agent::AgentConfig agent_config(long max_ticks, long budget) {
    agent::AgentConfig c;
    c.max_ticks = max_ticks;
    c.persistence_budget = budget;
    c.check();
    return c;
}

bool finished(const Trace& t) { return t.ending.has_value(); }

// ---- validate

int cmd_validate(const std::string& path, std::ostream& out) {
    auto def = read_story(path);
    auto report = story::validate_story(def);
    auto text = report.describe();
    while (!text.empty() && text.back() == '\n') text.pop_back();
    out << def.id() << ": " << text << "\n";
    return report.valid() ? kOk : kDomainFailure;
}

// ---- simulate

struct SimulateOpts {
    std::string story;
    std::string profile;
    bool uninformed = false;
    int runs = 20;
    std::uint64_t seed = 0;
    std::string out;
    std::string manifest;
    std::string log;
    long max_ticks = 300;
    long budget = 0;
    unsigned threads = 0;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
    auto def = read_story(o.story);
    sim::SimulationSpec spec;
    spec.story = &def;
    spec.runs = o.runs;
    spec.seed_base = o.seed;
    spec.threads = o.threads;
    spec.config = agent_config(o.max_ticks, o.budget);
    if (o.uninformed) {
        spec.agent_kind = AgentKind::Uninformed;
    } else {
        spec.agent_kind = AgentKind::Informed;
        auto in = open_in(o.profile, "profile");
        spec.profile = profile_from_doc(json::parse(in));
    }

    auto batch = sim::run_batch(spec);

    auto trace_out = open_out(o.out);
    write_traces(trace_out, batch.traces);
    close_out(trace_out, o.out);

    std::string manifest_path = o.manifest.empty() ? o.out + ".manifest.json" : o.manifest;
    auto manifest_out = open_out(manifest_path);
    manifest_out << sim::manifest(batch).dump(2) << "\n";
    close_out(manifest_out, manifest_path);

    if (!o.log.empty()) {
        // Runs are deterministic per seed, so replaying them with logging on
        // reproduces the batch.
        auto log_out = open_out(o.log);
        for (int i = 0; i < o.runs; ++i) {
            auto cfg = spec.config;
            cfg.seed = batch.seeds[i];
            cfg.record_log = true;
            auto run = agent::run_agent_detailed(def, spec.profile, cfg);
            for (const auto& rec : run.log) {
                json j = agent::to_json(rec);
                j["run"] = i;
                j["seed"] = cfg.seed;
                log_out << j.dump() << "\n";
            }
        }
        close_out(log_out, o.log);
    }

    auto endings = std::count_if(batch.traces.begin(), batch.traces.end(), finished);
    out << "wrote " << batch.traces.size() << " traces to " << o.out << " (" << endings << " reached an ending)\n";
    return kOk;
}

// ---- gridsearch

struct EvalOpts {
    std::string story;
    int runs = 20;
    std::uint64_t seed = 0;
    long max_ticks = 300;
    long budget = 0;
    unsigned threads = 0;
    bool include_unfinished = false;
    std::string out;
    std::string json_out;

    eval::EvalConfig config() const {
        eval::EvalConfig c;
        c.runs = runs;
        c.seed_base = seed;
        c.agent = agent_config(max_ticks, budget);
        c.threads = threads;
        return c;
    }
};

struct GridOpts : EvalOpts {
    std::string trace;
    std::string session;
};

const Trace& pick_human(const std::vector<Trace>& traces, const GridOpts& o) {
    if (traces.empty()) throw DomainError("trace file is empty: " + o.trace);
    if (!o.session.empty()) {
        for (const auto& t : traces)
            if (t.session_id == o.session) return t;
        throw DomainError("no trace with session id " + o.session);
    }
    std::vector<const Trace*> usable;
    for (const auto& t : traces)
        if (o.include_unfinished || finished(t)) usable.push_back(&t);
    if (usable.empty()) throw DomainError("no finished trace in " + o.trace + " (see --include-unfinished)");
    if (usable.size() > 1)
        throw DomainError(std::to_string(usable.size()) + " traces in " + o.trace + "; pick one with --session");
    return *usable.front();
}

void write_json(const std::string& path, const json& j) {
    if (path.empty()) return;
    auto f = open_out(path);
    f << j.dump(2) << "\n";
    close_out(f, path);
}

int cmd_gridsearch(const GridOpts& o, std::ostream& out) {
    auto def = read_story(o.story);
    auto traces = read_traces(o.trace);
    const Trace& human = pick_human(traces, o);
    auto result = eval::grid_search(def, human, o.config());

    auto csv = open_out(o.out);
    eval::write_csv(csv, result);
    close_out(csv, o.out);
    write_json(o.json_out, eval::to_json(result));

    out << "best " << result.best_profile.bits() << " mean " << num(result.best_mean) << " session "
        << human.session_id << "\n";
    return kOk;
}

// ---- compare

struct CompareOpts : EvalOpts {
    std::string traces;
    std::string profiles;
};

// One JSON document per line, each carrying session_id.
std::map<std::string, profile::PlayerProfile> read_profiles(const std::string& path) {
    auto in = open_in(path, "profiles");
    std::map<std::string, profile::PlayerProfile> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = json::parse(line);
            auto id = j.at("session_id").get<std::string>();
            if (!out.emplace(id, profile_from_doc(j)).second) throw DomainError("duplicate session id " + id);
        } catch (const json::exception& e) {
            throw DomainError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

int cmd_compare(const CompareOpts& o, std::ostream& out, std::ostream& err) {
    auto def = read_story(o.story);
    auto traces = read_traces(o.traces);
    auto profiles = read_profiles(o.profiles);

    std::vector<const Trace*> humans;
    std::vector<std::string> missing;
    for (const auto& t : traces) {
        if (!o.include_unfinished && !finished(t)) continue;
        humans.push_back(&t);
        if (!profiles.contains(t.session_id)) missing.push_back(t.session_id);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
        throw DomainError("no profile for session(s): " + list);
    }
    if (humans.size() < profiles.size())
        err << "note: " << profiles.size() - humans.size() << " profile(s) have no matching trace\n";

    std::vector<eval::ComparisonRow> rows;
    for (const Trace* t : humans) rows.push_back(eval::compare_methods(def, *t, profiles.at(t->session_id), o.config()));

    auto csv = open_out(o.out);
    eval::write_csv(csv, rows);
    close_out(csv, o.out);
    write_json(o.json_out, eval::to_json(rows));

    auto same = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.reported_equals_best; });
    out << rows.size() << " traces compared, reported profile is the best in " << same << "\n";
    return kOk;
}

// ---- export

struct ExportOpts {
    std::string stories;
    std::string data;
    std::string story;
    bool finished_only = false;
    std::string out;
    std::string profiles;
};

int cmd_export(const ExportOpts& o, std::ostream& out) {
    auto registry = service::StoryRegistry::load_dir(o.stories);
    service::SessionStore store(registry, o.data);
    service::TraceFilter filter;
    if (!o.story.empty()) filter.story_id = o.story;
    filter.finished_only = o.finished_only;
    auto traces = store.export_human_traces(filter);

    if (o.out.empty() || o.out == "-") {
        write_traces(out, traces);
    } else {
        auto f = open_out(o.out);
        write_traces(f, traces);
        close_out(f, o.out);
    }
    if (!o.profiles.empty()) {
        auto f = open_out(o.profiles);
        for (const auto& t : traces) {
            if (!t.profile_used) continue;
            json j = profile_export(*t.profile_used);
            j["session_id"] = t.session_id;
            f << j.dump() << "\n";
        }
        close_out(f, o.profiles);
    }
    if (!o.out.empty() && o.out != "-") out << "exported " << traces.size() << " traces to " << o.out << "\n";
    return kOk;
}

// ---- serve

struct ServeOpts {
    std::string stories;
    std::string data;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

int cmd_serve(const ServeOpts& o, std::ostream& out, std::ostream& err) {
    auto registry = service::StoryRegistry::load_dir(o.stories);
    if (registry.all().empty()) throw DomainError("no stories found in " + o.stories);
    service::SessionStore store(registry, o.data);
    std::optional<fs::path> static_dir;
    if (!o.static_dir.empty()) static_dir = o.static_dir;
    service::HttpApi api(store, static_dir);
    if (!api.bind(o.host, o.port)) {
        err << "error: cannot listen on " << o.host << ":" << o.port << "\n";
        return kUsageError;
    }
    out << "listening on http://" << o.host << ":" << o.port << " (" << store.size() << " sessions loaded)\n"
        << std::flush;

    // Signals go to a dedicated thread so shutdown runs outside a handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        api.stop();
    });
    bool ok = api.serve();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return ok ? kOk : kUsageError;
}

void add_eval_options(CLI::App* cmd, EvalOpts& o) {
    cmd->add_option("--story", o.story, "Story definition (JSON)")->required();
    cmd->add_option("--runs", o.runs, "Simulations per batch")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Seed of the first run; run i uses seed + i")->capture_default_str();
    cmd->add_option("--max-ticks", o.max_ticks, "Tick limit per run")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--persistence-budget", o.budget, "Ticks before a low-persistence agent drops a goal (0: max-ticks / 5)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", o.threads, "Worker threads (0: one per core)")->capture_default_str();
    cmd->add_flag("--include-unfinished", o.include_unfinished, "Also use human traces that reached no ending");
    cmd->add_option("--out", o.out, "CSV output")->required();
    cmd->add_option("--json", o.json_out, "Also write the result as JSON");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Player-model simulation and evaluation for interactive narratives", "bdiplay"};
    app.set_config("--config", "", "TOML file of option defaults; options on the command line win");
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a story definition; exit 0 iff it is clean");
    validate->add_option("story", validate_path, "Story definition (JSON)")->required();

    SimulateOpts so;
    auto* simulate = app.add_subcommand("simulate", "Run a batch of simulated players and write their traces");
    simulate->add_option("--story", so.story, "Story definition (JSON)")->required();
    auto* profile_opt = simulate->add_option("--profile", so.profile,
                                             "Profile (JSON {f, gE, pE, p} or {answers, familiar?, game_index?}) "
                                             "for an informed agent");
    auto* uninformed_opt = simulate->add_flag("--uninformed", so.uninformed, "Use the uninformed agent");
    profile_opt->excludes(uninformed_opt);
    simulate->add_option("--runs", so.runs, "Number of runs")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--seed", so.seed, "Seed of the first run; run i uses seed + i")->capture_default_str();
    simulate->add_option("--out", so.out, "Trace file (one JSON trace per line)")->required();
    simulate->add_option("--manifest", so.manifest, "Manifest path (default: <out>.manifest.json)");
    simulate->add_option("--log", so.log, "Agent event log (one JSON record per tick)");
    simulate->add_option("--max-ticks", so.max_ticks, "Tick limit per run")->capture_default_str()->check(CLI::PositiveNumber);
    simulate->add_option("--persistence-budget", so.budget, "Ticks before a low-persistence agent drops a goal (0: max-ticks / 5)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--threads", so.threads, "Worker threads (0: one per core)")->capture_default_str();

    GridOpts go;
    auto* grid = app.add_subcommand("gridsearch", "Score all 16 binary profiles against one human trace");
    add_eval_options(grid, go);
    grid->add_option("--trace", go.trace, "Human trace file")->required();
    grid->add_option("--session", go.session, "Session to use when the file holds several traces");

    CompareOpts co;
    auto* compare = app.add_subcommand("compare", "Reported vs best vs uninformed for every human trace");
    add_eval_options(compare, co);
    compare->add_option("--traces", co.traces, "Human trace file")->required();
    compare->add_option("--profiles", co.profiles, "Reported profiles, one JSON object with session_id per line")
        ->required();

    ExportOpts eo;
    auto* exporter = app.add_subcommand("export", "Write stored human sessions as traces");
    exporter->add_option("--stories", eo.stories, "Story directory")->required()->check(CLI::ExistingDirectory);
    exporter->add_option("--data", eo.data, "Session data directory")->required()->check(CLI::ExistingDirectory);
    exporter->add_option("--story", eo.story, "Only sessions of this story id");
    exporter->add_flag("--finished", eo.finished_only, "Only sessions that reached an ending");
    exporter->add_option("--out", eo.out, "Trace file (default: standard output)");
    exporter->add_option("--profiles", eo.profiles, "Also write reported profiles in the compare input format");

    ServeOpts vo;
    auto* serve = app.add_subcommand("serve", "Serve the play API and the web client");
    serve->add_option("--stories", vo.stories, "Story directory")->required()->check(CLI::ExistingDirectory);
    serve->add_option("--data", vo.data, "Session data directory (created if missing)")->required();
    serve->add_option("--host", vo.host, "Interface to bind")->capture_default_str();
    serve->add_option("--port", vo.port, "TCP port")->capture_default_str();
    serve->add_option("--static", vo.static_dir, "Web client directory served at /")->check(CLI::ExistingDirectory);

    try {
        // CLI11 takes the vector form in reverse order.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsageError;
    }
    if (simulate->parsed() && !so.uninformed && so.profile.empty()) {
        err << "simulate: one of --profile or --uninformed is required\n";
        return kUsageError;
    }

    try {
        if (validate->parsed()) return cmd_validate(validate_path, out);
        if (simulate->parsed()) return cmd_simulate(so, out);
        if (grid->parsed()) return cmd_gridsearch(go, out);
        if (compare->parsed()) return cmd_compare(co, out, err);
        if (exporter->parsed()) return cmd_export(eo, out);
        if (serve->parsed()) return cmd_serve(vo, out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const story::StoryParseError& e) {
        err << "error: story parse failed at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
        return kDomainFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainFailure;
    }
    return kUsageError;
}

}  // namespace bdiplay::cli
