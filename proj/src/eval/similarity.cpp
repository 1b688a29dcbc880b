#include "bdiplay/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bdiplay::eval {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::set<std::string> plot_point_set(const Trace& t) { return {t.plot_points.begin(), t.plot_points.end()}; }

double quantile(const std::vector<double>& sorted, double prob) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    double h = (static_cast<double>(sorted.size()) - 1) * prob;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SimilarityReport SimilarityReport::from_values(std::vector<double> values) {
    SimilarityReport r;
    r.values = std::move(values);
    if (r.values.empty()) return r;
    std::vector<double> s = r.values;
    std::sort(s.begin(), s.end());
    r.min = s.front();
    r.max = s.back();
    r.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    r.q1 = quantile(s, 0.25);
    r.median = quantile(s, 0.5);
    r.q3 = quantile(s, 0.75);
    return r;
}

SimilarityReport similarity_to_traces(const Trace& human, const std::vector<Trace>& traces) {
    auto h = plot_point_set(human);
    std::vector<double> values;
    values.reserve(traces.size());
    for (const auto& t : traces) {
        if (t.story_id != human.story_id)
            throw StoryMismatchError("trace " + t.session_id + " is from story '" + t.story_id + "', expected '" +
                                     human.story_id + "'");
        values.push_back(jaccard(h, plot_point_set(t)));
    }
    return SimilarityReport::from_values(std::move(values));
}

SimilarityReport similarity_to_batch(const Trace& human, const sim::SimulationBatch& batch) {
    if (batch.spec.story && batch.spec.story->id() != human.story_id)
        throw StoryMismatchError("human trace is from story '" + human.story_id + "', batch from '" +
                                 batch.spec.story->id() + "'");
    return similarity_to_traces(human, batch.traces);
}

}  // namespace bdiplay::eval
