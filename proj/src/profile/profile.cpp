#include "bdiplay/profile.hpp"

#include <algorithm>

namespace bdiplay::profile {

std::string_view short_name(Factor f) {
    switch (f) {
        case Factor::Familiarity: return "f";
        case Factor::GamingExperience: return "gE";
        case Factor::PreferenceToExplore: return "pE";
        case Factor::Persistence: return "p";
    }
    return "?";
}

Questionnaire::Questionnaire(std::vector<Statement> statements) : statements_(std::move(statements)) {}

const Questionnaire& Questionnaire::standard() {
    using enum Factor;
    using enum Polarity;
    static const Questionnaire q({
        {"My familiarity with the text-based game \"Anchorhead\" is", Familiarity, Positive},
        {"My gaming experience is", GamingExperience, Positive},
        {"I think about the consequences of my actions when playing", GamingExperience, Positive},
        {"I complete one quest at a time", GamingExperience, Negative},
        {"I explore all the places, elements and characters of the virtual world", PreferenceToExplore, Positive},
        {"I complete all quests, including those that aren't necessary to finish the game", PreferenceToExplore,
         Positive},
        {"I only do what is necessary to pass a level or complete a quest", PreferenceToExplore, Negative},
        {"If I fail a quest, I repeat it until I complete it", Persistence, Positive},
        {"I defer my other activities if I'm stuck on a task or mission while playing", Persistence, Positive},
        {"I give up on quests if I find more appealing ones", Persistence, Negative},
    });
    return q;
}

void LikertResponse::check(const Questionnaire& q) const {
    if (answers.size() != q.size()) {
        throw InvalidResponseError("expected " + std::to_string(q.size()) + " answers, got " +
                                   std::to_string(answers.size()));
    }
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i] < 1 || answers[i] > 5) {
            throw InvalidResponseError("answer " + std::to_string(i + 1) + " out of range 1..5: " +
                                       std::to_string(answers[i]));
        }
    }
}

double PlayerProfile::get(Factor x) const {
    switch (x) {
        case Factor::Familiarity: return f;
        case Factor::GamingExperience: return gE;
        case Factor::PreferenceToExplore: return pE;
        case Factor::Persistence: return p;
    }
    return 0.0;
}

void PlayerProfile::set(Factor x, double v) {
    switch (x) {
        case Factor::Familiarity: f = v; break;
        case Factor::GamingExperience: gE = v; break;
        case Factor::PreferenceToExplore: pE = v; break;
        case Factor::Persistence: p = v; break;
    }
}

bool PlayerProfile::valid() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    return in_unit(f) && in_unit(gE) && in_unit(pE) && in_unit(p);
}

bool BinaryProfile::get(Factor x) const {
    switch (x) {
        case Factor::Familiarity: return f;
        case Factor::GamingExperience: return gE;
        case Factor::PreferenceToExplore: return pE;
        case Factor::Persistence: return p;
    }
    return false;
}

int BinaryProfile::index() const { return (f ? 8 : 0) | (gE ? 4 : 0) | (pE ? 2 : 0) | (p ? 1 : 0); }

BinaryProfile BinaryProfile::from_index(int i) {
    return {(i & 8) != 0, (i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
}

std::string BinaryProfile::bits() const {
    return std::string{f ? '1' : '0', gE ? '1' : '0', pE ? '1' : '0', p ? '1' : '0'};
}

PlayerProfile BinaryProfile::as_profile() const {
    return {f ? 1.0 : 0.0, gE ? 1.0 : 0.0, pE ? 1.0 : 0.0, p ? 1.0 : 0.0};
}

namespace {

void check_likert(int v) {
    if (v < 1 || v > 5) throw InvalidResponseError("Likert value out of range 1..5: " + std::to_string(v));
}

}  // namespace

double normalize_factor(int p1, int p2, int n1) {
    check_likert(p1);
    check_likert(p2);
    check_likert(n1);
    return static_cast<double>(p1 + p2 - n1 + 3) / 12.0;
}

double normalize_single(int answer) {
    check_likert(answer);
    return static_cast<double>(answer - 1) / 4.0;
}

PlayerProfile build_profile(const Questionnaire& q, const LikertResponse& r) {
    r.check(q);
    PlayerProfile out;
    for (Factor x : {Factor::Familiarity, Factor::GamingExperience, Factor::PreferenceToExplore,
                     Factor::Persistence}) {
        std::vector<int> pos;
        std::vector<int> neg;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto& st = q.statements()[i];
            if (st.factor != x) continue;
            (st.polarity == Polarity::Positive ? pos : neg).push_back(r.answers[i]);
        }
        if (pos.size() == 2 && neg.size() == 1) {
            out.set(x, normalize_factor(pos[0], pos[1], neg[0]));
        } else if (pos.size() == 1 && neg.empty()) {
            out.set(x, normalize_single(pos[0]));
        } else {
            throw InvalidResponseError("questionnaire layout unsupported for factor " +
                                       std::string(short_name(x)));
        }
    }
    return out;
}

PlayerProfile build_profile(const Questionnaire& q, const LikertResponse& r, bool familiar) {
    PlayerProfile out = build_profile(q, r);
    out.f = familiar ? 1.0 : 0.0;
    return out;
}

BinaryProfile binarize(const PlayerProfile& profile) {
    auto high = [](double v) { return v > kBinarizeThreshold; };
    return {high(profile.f), high(profile.gE), high(profile.pE), high(profile.p)};
}

PlayerProfile apply_replay_rule(const PlayerProfile& profile, int game_index) {
    PlayerProfile out = profile;
    if (game_index >= 2 && out.f < 0.5) out.f = 1.0;
    return out;
}

std::vector<BinaryProfile> enumerate_binary_profiles() {
    std::vector<BinaryProfile> out;
    out.reserve(16);
    for (int i = 0; i < 16; ++i) out.push_back(BinaryProfile::from_index(i));
    return out;
}

}  // namespace bdiplay::profile
