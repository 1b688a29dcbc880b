#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bdiplay::profile {

enum class Factor { Familiarity, GamingExperience, PreferenceToExplore, Persistence };
enum class Polarity { Positive, Negative };

std::string_view short_name(Factor f);  // "f", "gE", "pE", "p"

struct Statement {
    std::string text;
    Factor factor;
    Polarity polarity;
};

class Questionnaire {
public:
    explicit Questionnaire(std::vector<Statement> statements);

    // The ten-statement player-profile questionnaire.
    static const Questionnaire& standard();

    const std::vector<Statement>& statements() const { return statements_; }
    std::size_t size() const { return statements_.size(); }

private:
    std::vector<Statement> statements_;
};

class InvalidResponseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Likert answers, 1 = strongly disagree (or very low), 5 = strongly agree (or very high).
struct LikertResponse {
    std::vector<int> answers;

    void check(const Questionnaire& q) const;  // throws InvalidResponseError
};

struct PlayerProfile {
    double f = 0.0;
    double gE = 0.0;
    double pE = 0.0;
    double p = 0.0;

    double get(Factor x) const;
    void set(Factor x, double v);
    bool valid() const;
    bool operator==(const PlayerProfile&) const = default;
};

struct BinaryProfile {
    bool f = false;
    bool gE = false;
    bool pE = false;
    bool p = false;

    bool get(Factor x) const;
    // Lexicographic rank over (f, gE, pE, p): (0,0,0,0) is 0, (1,1,1,1) is 15.
    int index() const;
    static BinaryProfile from_index(int i);
    std::string bits() const;  // e.g. "0101"
    PlayerProfile as_profile() const;

    auto operator<=>(const BinaryProfile&) const = default;
};

inline constexpr double kBinarizeThreshold = 0.5;

// (p1 + p2 - n1 + 3) / 12; each input must be in [1, 5].
double normalize_factor(int p1, int p2, int n1);

// Single-statement familiarity scaled linearly: (answer - 1) / 4.
double normalize_single(int answer);

PlayerProfile build_profile(const Questionnaire& q, const LikertResponse& r);

// Alternate familiarity input: a yes/no answer in place of the Likert statement.
PlayerProfile build_profile(const Questionnaire& q, const LikertResponse& r, bool familiar);

// Values <= 0.5 are low, values > 0.5 are high.
BinaryProfile binarize(const PlayerProfile& profile);

// From the second game on, a familiarity below 0.5 is raised to 1.
PlayerProfile apply_replay_rule(const PlayerProfile& profile, int game_index);

std::vector<BinaryProfile> enumerate_binary_profiles();

}  // namespace bdiplay::profile
