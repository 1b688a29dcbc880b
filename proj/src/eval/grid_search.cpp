#include "bdiplay/evaluation.hpp"

namespace bdiplay::eval {

namespace {

sim::SimulationBatch batch_for(const story::StoryDefinition& def, std::optional<profile::PlayerProfile> pp,
                               const EvalConfig& cfg) {
    sim::SimulationSpec spec;
    spec.story = &def;
    spec.agent_kind = pp ? AgentKind::Informed : AgentKind::Uninformed;
    spec.profile = pp;
    spec.runs = cfg.runs;
    spec.seed_base = cfg.seed_base;
    spec.config = cfg.agent;
    spec.threads = cfg.threads;
    return sim::run_batch(spec);
}

void check_story(const story::StoryDefinition& def, const Trace& human) {
    if (human.story_id != def.id())
        throw StoryMismatchError("trace " + human.session_id + " is from story '" + human.story_id + "', not '" +
                                 def.id() + "'");
}

}  // namespace

std::pair<profile::BinaryProfile, double> best_of(const std::map<profile::BinaryProfile, SimilarityReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("no reports to choose from");
    auto best = reports.begin();
    for (auto it = reports.begin(); it != reports.end(); ++it)
        if (it->second.mean > best->second.mean) best = it;
    return {best->first, best->second.mean};
}

GridSearchResult grid_search(const story::StoryDefinition& def, const Trace& human, const EvalConfig& cfg) {
    check_story(def, human);
    GridSearchResult out;
    for (const auto& bp : profile::enumerate_binary_profiles())
        out.reports[bp] = similarity_to_batch(human, batch_for(def, bp.as_profile(), cfg));
    std::tie(out.best_profile, out.best_mean) = best_of(out.reports);
    return out;
}

ComparisonRow compare_methods(const story::StoryDefinition& def, const Trace& human,
                              const profile::PlayerProfile& reported, const EvalConfig& cfg) {
    check_story(def, human);
    ComparisonRow row;
    row.session_id = human.session_id;
    row.reported_profile = reported;
    row.reported = similarity_to_batch(human, batch_for(def, reported, cfg));
    auto grid = grid_search(def, human, cfg);
    row.best_profile = grid.best_profile;
    row.best = grid.reports.at(grid.best_profile);
    row.uninformed = similarity_to_batch(human, batch_for(def, std::nullopt, cfg));
    row.reported_equals_best = profile::binarize(reported) == grid.best_profile;
    return row;
}

}  // namespace bdiplay::eval
