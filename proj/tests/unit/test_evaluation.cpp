#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "talagen/error.hpp"
#include "talagen/evaluation.hpp"

using namespace talagen;

namespace {

Transcription of(const std::vector<double>& times, const char* label) {
    Transcription t;
    for (double x : times) t.events.push_back({x, label});
    return t;
}

}  // namespace

TEST_CASE("identical transcriptions score 1") {
    const Transcription t{{{0.0, "Dha"}, {0.5, "Na"}, {1.0, "Dha"}}};
    const auto e = eval_onsets(t, t);
    CHECK(e.average_f1 == 1.0);
    REQUIRE(e.classes.size() == 2);
    CHECK(e.classes[0].label == "Dha");
    CHECK(e.classes[0].matched == 2);
}

TEST_CASE("collar edges") {
    const std::vector<double> ref{1.0, 2.0, 3.0};
    std::vector<double> near, far;
    for (double r : ref) {
        near.push_back(r + 0.040);
        far.push_back(r + 0.060);
    }
    CHECK(eval_onsets(of(near, "Dha"), of(ref, "Dha")).average_f1 == 1.0);
    CHECK(eval_onsets(of(far, "Dha"), of(ref, "Dha")).average_f1 == 0.0);
    std::vector<double> early;
    for (double r : ref) early.push_back(r - 0.050);
    CHECK(eval_onsets(of(early, "Dha"), of(ref, "Dha")).average_f1 == 1.0);
}

TEST_CASE("labels must agree") {
    const auto e = eval_onsets(of({1.0}, "Na"), of({1.0}, "Dha"));
    CHECK(e.average_f1 == 0.0);
    REQUIRE(e.classes.size() == 2);
    CHECK(e.classes[1].label == "Na");
    CHECK(e.classes[1].reference == 0);
}

TEST_CASE("precision, recall and average over reference classes") {
    const Transcription ref{{{0.0, "Dha"}, {1.0, "Dha"}, {2.0, "Na"}}};
    const Transcription pred{{{0.0, "Dha"}, {2.0, "Na"}, {3.0, "Tin"}}};
    const auto e = eval_onsets(pred, ref);
    const auto& dha = e.classes[0];
    CHECK(dha.precision == 1.0);
    CHECK(dha.recall == 0.5);
    CHECK(dha.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(e.average_f1 == doctest::Approx((2.0 / 3.0 + 1.0) / 2.0));
}

TEST_CASE("empty inputs") {
    CHECK(eval_onsets({}, {}).average_f1 == 1.0);
    CHECK(eval_onsets(of({1.0}, "Dha"), {}).average_f1 == 0.0);
    CHECK(eval_onsets({}, of({1.0}, "Dha")).average_f1 == 0.0);
    CHECK_THROWS_AS(eval_onsets({}, {}, 0.0), Error);
}

TEST_CASE("greedy matching agrees with augmenting-path matching") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> t(0.0, 2.0);
    std::uniform_int_distribution<int> count(0, 25);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> pred(count(rng)), ref(count(rng));
        for (auto& x : pred) x = t(rng);
        for (auto& x : ref) x = t(rng);
        std::sort(pred.begin(), pred.end());
        std::sort(ref.begin(), ref.end());
        const double collar = trial % 2 ? 0.05 : 0.2;
        REQUIRE(match_onsets(pred, ref, collar) == oracle::kuhn_matching(pred, ref, collar));
    }
}
