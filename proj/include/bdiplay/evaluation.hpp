#pragma once

#include "bdiplay/simulation.hpp"

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdiplay::eval {

class StoryMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// |a ∩ b| / |a ∪ b|, and 1.0 when both are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

std::set<std::string> plot_point_set(const Trace& t);

// Quantile of ascending `sorted` at probability `prob`, interpolating linearly
// between closest ranks (h = (n - 1) * prob). Throws on empty input.
double quantile(const std::vector<double>& sorted, double prob);

struct SimilarityReport {
    std::vector<double> values;  // one per batch trace, in batch order
    double mean = 0, min = 0, max = 0;
    double q1 = 0, median = 0, q3 = 0;

    // Summary statistics are left at zero for an empty input.
    static SimilarityReport from_values(std::vector<double> values);
    bool operator==(const SimilarityReport&) const = default;
};

SimilarityReport similarity_to_traces(const Trace& human, const std::vector<Trace>& traces);

// Throws StoryMismatchError when the human trace and the batch disagree on the story.
SimilarityReport similarity_to_batch(const Trace& human, const sim::SimulationBatch& batch);

struct EvalConfig {
    int runs = 20;
    std::uint64_t seed_base = 0;
    agent::AgentConfig agent;
    unsigned threads = 0;
};

struct GridSearchResult {
    std::map<profile::BinaryProfile, SimilarityReport> reports;  // all 16 profiles
    profile::BinaryProfile best_profile;
    double best_mean = 0;

    bool operator==(const GridSearchResult&) const = default;
};

// Every profile batch uses the same seeds. Ties on the mean go to the
// lexicographically smallest profile.
GridSearchResult grid_search(const story::StoryDefinition& def, const Trace& human, const EvalConfig& cfg);

// Argmax over the report map; the tie rule of grid_search.
std::pair<profile::BinaryProfile, double> best_of(const std::map<profile::BinaryProfile, SimilarityReport>& reports);

struct ComparisonRow {
    std::string session_id;
    profile::PlayerProfile reported_profile;
    SimilarityReport reported;
    profile::BinaryProfile best_profile;
    SimilarityReport best;
    SimilarityReport uninformed;
    bool reported_equals_best = false;

    bool operator==(const ComparisonRow&) const = default;
};

ComparisonRow compare_methods(const story::StoryDefinition& def, const Trace& human,
                              const profile::PlayerProfile& reported, const EvalConfig& cfg);

// ---- export

inline constexpr int kSchemaVersion = 1;

// run,jaccard: one row per value.
void write_csv(std::ostream& out, const SimilarityReport& r);
// f,gE,pE,p,n,mean,min,q1,median,q3,max,values: one row per profile, values ';'-joined.
void write_csv(std::ostream& out, const GridSearchResult& r);
// session_id,reported,best,reported_equals_best, then n,mean,min,q1,median,q3,max
// for each of reported_, best_ and uninformed_.
void write_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

nlohmann::json to_json(const SimilarityReport& r);
nlohmann::json to_json(const GridSearchResult& r);
nlohmann::json to_json(const std::vector<ComparisonRow>& rows);

SimilarityReport report_from_json(const nlohmann::json& j);
GridSearchResult grid_from_json(const nlohmann::json& j);
std::vector<ComparisonRow> comparison_from_json(const nlohmann::json& j);

}  // namespace bdiplay::eval
