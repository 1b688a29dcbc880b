#include "bdiplay/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bdiplay::sim {

void SimulationSpec::check() const {
    if (story == nullptr) throw std::invalid_argument("simulation needs a story");
    if (runs < 1) throw std::invalid_argument("runs must be at least 1");
    if (agent_kind == AgentKind::Human) throw std::invalid_argument("cannot simulate a human");
    if ((agent_kind == AgentKind::Informed) != profile.has_value())
        throw std::invalid_argument("a profile is required for informed agents and only for them");
    if (profile && !profile->valid()) throw std::invalid_argument("profile factors must lie in [0,1]");
    config.check();
}

SimulationBatch run_batch(const SimulationSpec& spec) {
    spec.check();
    auto report = story::validate_story(*spec.story);
    if (!report.valid()) throw InvalidStoryError("story does not validate: " + report.describe());

    auto start = std::chrono::steady_clock::now();
    SimulationBatch batch;
    batch.spec = spec;
    batch.traces.resize(spec.runs);
    for (int i = 0; i < spec.runs; ++i) batch.seeds.push_back(spec.seed_base + static_cast<std::uint64_t>(i));

    auto run_one = [&](int i) {
        agent::AgentConfig cfg = spec.config;
        cfg.seed = batch.seeds[i];
        std::optional<profile::PlayerProfile> pp;
        if (spec.agent_kind == AgentKind::Informed) pp = spec.profile;
        batch.traces[i] = agent::run_agent(*spec.story, pp, cfg);
    };

    unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(spec.runs));
    if (workers <= 1) {
        for (int i = 0; i < spec.runs; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mu;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < spec.runs; i = next++) {
                    try {
                        run_one(i);
                    } catch (...) {
                        std::lock_guard lock(error_mu);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }
    batch.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return batch;
}

nlohmann::json manifest(const SimulationBatch& batch) {
    const auto& s = batch.spec;
    nlohmann::json j;
    j["story"] = s.story->id();
    j["agent_kind"] = to_string(s.agent_kind);
    j["profile"] = s.profile ? to_json(*s.profile) : nlohmann::json(nullptr);
    j["runs"] = s.runs;
    j["seed_base"] = s.seed_base;
    j["max_ticks"] = s.config.max_ticks;
    j["persistence_budget"] = s.config.budget();
    j["seeds"] = batch.seeds;
    long endings = std::count_if(batch.traces.begin(), batch.traces.end(), [](const Trace& t) { return t.ending.has_value(); });
    j["endings_reached"] = endings;
    j["elapsed_ms"] = batch.elapsed_ms;
    return j;
}

}  // namespace bdiplay::sim
