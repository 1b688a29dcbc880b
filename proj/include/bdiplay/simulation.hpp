#pragma once

#include "bdiplay/agent.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace bdiplay::sim {

class InvalidStoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationSpec {
    const story::StoryDefinition* story = nullptr;
    AgentKind agent_kind = AgentKind::Uninformed;
    std::optional<profile::PlayerProfile> profile;  // required iff informed
    int runs = 20;
    std::uint64_t seed_base = 0;
    agent::AgentConfig config;
    unsigned threads = 0;  // 0 = hardware concurrency, 1 = sequential

    void check() const;  // throws std::invalid_argument
};

struct SimulationBatch {
    SimulationSpec spec;
    std::vector<Trace> traces;
    std::vector<std::uint64_t> seeds;
    double elapsed_ms = 0;
};

// Run i uses seed_base + i. Output order follows run index whatever the
// completion order. Throws InvalidStoryError if the story does not validate.
SimulationBatch run_batch(const SimulationSpec& spec);

// Batch settings, seeds and timings; written next to the trace file.
nlohmann::json manifest(const SimulationBatch& batch);

}  // namespace bdiplay::sim
