#include "doctest.h"

#include "bdiplay/profile.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace bdiplay::profile;

namespace {

// Min-max scaling of p1 + p2 - n1 with the extremes found by enumeration,
// an independent route to the closed form.
double minmax_oracle(int p1, int p2, int n1) {
    int lo = 100, hi = -100;
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b)
            for (int c = 1; c <= 5; ++c) {
                lo = std::min(lo, a + b - c);
                hi = std::max(hi, a + b - c);
            }
    return double(p1 + p2 - n1 - lo) / double(hi - lo);
}

LikertResponse uniform(int v) { return {std::vector<int>(10, v)}; }

}  // namespace

TEST_CASE("normalize_factor spot values") {
    CHECK(normalize_factor(5, 5, 1) == 1.0);
    CHECK(normalize_factor(1, 1, 5) == 0.0);
    CHECK(normalize_factor(4, 3, 2) == doctest::Approx(8.0 / 12.0).epsilon(1e-15));
    CHECK_THROWS_AS(normalize_factor(0, 3, 3), InvalidResponseError);
    CHECK_THROWS_AS(normalize_factor(3, 6, 3), InvalidResponseError);
}

TEST_CASE("normalize_factor over all 125 triples") {
    for (int p1 = 1; p1 <= 5; ++p1)
        for (int p2 = 1; p2 <= 5; ++p2)
            for (int n1 = 1; n1 <= 5; ++n1) {
                double v = normalize_factor(p1, p2, n1);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                CHECK(v == doctest::Approx(minmax_oracle(p1, p2, n1)).epsilon(1e-12));
                if (p1 < 5) CHECK(normalize_factor(p1 + 1, p2, n1) >= v);
                if (p2 < 5) CHECK(normalize_factor(p1, p2 + 1, n1) >= v);
                if (n1 < 5) CHECK(normalize_factor(p1, p2, n1 + 1) <= v);
            }
}

TEST_CASE("questionnaire shape") {
    const auto& q = Questionnaire::standard();
    REQUIRE(q.size() == 10);
    std::map<Factor, std::pair<int, int>> counts;
    for (const auto& s : q.statements()) {
        auto& c = counts[s.factor];
        (s.polarity == Polarity::Positive ? c.first : c.second)++;
    }
    CHECK(counts[Factor::Familiarity] == std::pair{1, 0});
    CHECK(counts[Factor::GamingExperience] == std::pair{2, 1});
    CHECK(counts[Factor::PreferenceToExplore] == std::pair{2, 1});
    CHECK(counts[Factor::Persistence] == std::pair{2, 1});
}

TEST_CASE("build_profile") {
    const auto& q = Questionnaire::standard();

    SUBCASE("maximum") {
        LikertResponse r;
        for (const auto& s : q.statements()) r.answers.push_back(s.polarity == Polarity::Positive ? 5 : 1);
        CHECK(build_profile(q, r) == PlayerProfile{1, 1, 1, 1});
    }
    SUBCASE("midpoint") {
        auto p = build_profile(q, uniform(3));
        CHECK(p.f == 0.5);
        CHECK(p.gE == 0.5);
        CHECK(p.pE == 0.5);
        CHECK(p.p == 0.5);
    }
    SUBCASE("all fives on the explore triple") {
        auto p = build_profile(q, uniform(5));
        CHECK(p.pE == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(p.f == 1.0);
    }
    SUBCASE("familiarity scales linearly") {
        for (int a = 1; a <= 5; ++a) {
            auto r = uniform(3);
            r.answers[0] = a;
            CHECK(build_profile(q, r).f == doctest::Approx((a - 1) / 4.0).epsilon(1e-15));
        }
    }
    SUBCASE("boolean familiarity") {
        auto r = uniform(3);
        CHECK(build_profile(q, r, true).f == 1.0);
        CHECK(build_profile(q, r, false).f == 0.0);
        CHECK(build_profile(q, r, true).gE == 0.5);
    }
    SUBCASE("rejects bad answers") {
        CHECK_THROWS_AS(build_profile(q, LikertResponse{{3, 3, 3}}), InvalidResponseError);
        auto r = uniform(3);
        r.answers[4] = 6;
        CHECK_THROWS_AS(build_profile(q, r), InvalidResponseError);
        r.answers[4] = 0;
        CHECK_THROWS_AS(build_profile(q, r), InvalidResponseError);
    }
}

TEST_CASE("binarize boundary") {
    CHECK(binarize({0.5, 0.5, 0.5, 0.5}) == BinaryProfile{false, false, false, false});
    CHECK(binarize({0.5000001, 0.5000001, 0.5000001, 0.5000001}) == BinaryProfile{true, true, true, true});
    double just_above = std::nextafter(0.5, 1.0);
    CHECK(binarize({just_above, 0.5, just_above, 0.5}) == BinaryProfile{true, false, true, false});
    CHECK(binarize({0, 0, 0, 0}) == BinaryProfile{});
    CHECK(binarize({1, 1, 1, 1}) == BinaryProfile{true, true, true, true});
}

TEST_CASE("replay rule") {
    CHECK(apply_replay_rule({0.4, 0.2, 0.2, 0.2}, 2).f == 1.0);
    CHECK(apply_replay_rule({0.4, 0.2, 0.2, 0.2}, 1).f == 0.4);
    CHECK(apply_replay_rule({0.7, 0.2, 0.2, 0.2}, 2).f == 0.7);
    CHECK(apply_replay_rule({0.5, 0.2, 0.2, 0.2}, 3).f == 0.5);
    CHECK(apply_replay_rule({0.0, 0.3, 0.6, 0.9}, 5) == PlayerProfile{1.0, 0.3, 0.6, 0.9});

    for (int step = 0; step <= 20; ++step) {
        PlayerProfile p{step / 20.0, 0.1, 0.2, 0.3};
        for (int g = 2; g <= 4; ++g) {
            auto once = apply_replay_rule(p, g);
            CHECK(apply_replay_rule(once, g) == once);
            CHECK(once.f >= 0.5);
        }
    }
}

TEST_CASE("enumerate_binary_profiles") {
    auto all = enumerate_binary_profiles();
    REQUIRE(all.size() == 16);
    CHECK(all.front() == BinaryProfile{});
    CHECK(all.back() == BinaryProfile{true, true, true, true});
    std::set<BinaryProfile> distinct(all.begin(), all.end());
    CHECK(distinct.size() == 16);
    for (int i = 0; i < 16; ++i) {
        CHECK(all[i].index() == i);
        CHECK(BinaryProfile::from_index(i) == all[i]);
        CHECK(binarize(all[i].as_profile()) == all[i]);
        if (i > 0) CHECK(all[i - 1] < all[i]);
    }
    CHECK(BinaryProfile{false, true, false, true}.bits() == "0101");
}
