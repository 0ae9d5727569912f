#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "oracles.hpp"
#include "talagen/frame_labels.hpp"

using namespace talagen;

namespace {

FrameLabelSequence seq(std::initializer_list<const char*> labels) {
    FrameLabelSequence s;
    for (const char* l : labels) s.labels.emplace_back(l);
    return s;
}

}  // namespace

TEST_CASE("smoothing examples") {
    CHECK(smooth_frame_labels(seq({"A", "B", "A"})).labels == seq({"A", "A", "A"}).labels);
    CHECK(smooth_frame_labels(seq({"A", "B", "B", "A"})).labels == seq({"A", "B", "B", "A"}).labels);
    CHECK(smooth_frame_labels(seq({"A"})).labels == seq({"A"}).labels);
    CHECK(smooth_frame_labels(seq({"A", "B"})).labels == seq({"A", "B"}).labels);
    // Updates are visible to later frames in the same pass.
    CHECK(smooth_frame_labels(seq({"A", "B", "A", "B", "A"})).labels == seq({"A", "A", "A", "A", "A"}).labels);
}

TEST_CASE("smoothing is idempotent and leaves no isolated frame, exhaustively up to length 12") {
    const char* symbols[] = {"A", "B", "C"};
    std::size_t checked = 0;
    for (std::size_t len = 1; len <= 12; ++len) {
        std::size_t total = 1;
        for (std::size_t k = 0; k < len; ++k) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            FrameLabelSequence s;
            std::size_t c = code;
            for (std::size_t k = 0; k < len; ++k, c /= 3) s.labels.emplace_back(symbols[c % 3]);
            const auto once = smooth_frame_labels(s);
            const auto twice = smooth_frame_labels(once);
            if (once != twice) {
                FAIL("not idempotent at length " << len << " code " << code);
            }
            for (std::size_t i = 1; i + 1 < len; ++i) {
                if (once.labels[i - 1] == once.labels[i + 1] && once.labels[i] != once.labels[i - 1]) {
                    FAIL("isolated frame remains at length " << len << " code " << code);
                }
            }
            if (len > 0 && (once.labels.front() != s.labels.front() || once.labels.back() != s.labels.back())) {
                FAIL("endpoint changed");
            }
            ++checked;
        }
    }
    CHECK(checked == 797160);  // sum of 3^len for len = 1..12
}

TEST_CASE("onsets from class changes") {
    const auto a = frame_labels_to_onsets(seq({"A", "A", "B", "B"}));
    REQUIRE(a.size() == 2);
    CHECK(a.events[0].onset_sec == doctest::Approx(0.00));
    CHECK(a.events[0].label == StrokeLabel("A"));
    CHECK(a.events[1].onset_sec == doctest::Approx(0.02));
    CHECK(a.events[1].label == StrokeLabel("B"));

    CHECK(frame_labels_to_onsets(seq({"No-stroke", "No-stroke"})).empty());

    const auto c = frame_labels_to_onsets(seq({"A", "No-stroke", "A"}));
    REQUIRE(c.size() == 2);
    CHECK(c.events[1].onset_sec == doctest::Approx(0.02));

    for (std::size_t len = 1; len < 20; ++len) {
        FrameLabelSequence constant;
        constant.labels.assign(len, "Dha");
        const auto t = frame_labels_to_onsets(constant);
        REQUIRE(t.size() == 1);
        CHECK(t.events[0].onset_sec == 0.0);
    }
}

TEST_CASE("stroke frame labels switch to No-stroke at the envelope boundary") {
    const int sr = 44100;
    const auto x = oracle::decaying_tone(sr, 300.0, 0.03, 0.4, 0.9);
    const auto labels = stroke_frame_labels(x, sr, "Dha");
    REQUIRE_FALSE(labels.labels.empty());
    CHECK(labels.labels.front() == "Dha");
    CHECK(labels.labels.back() == std::string(kNoStroke));
    std::size_t changes = 0;
    for (std::size_t i = 1; i < labels.labels.size(); ++i) changes += labels.labels[i] != labels.labels[i - 1];
    CHECK(changes == 1);
    const auto onsets = frame_labels_to_onsets(labels);
    REQUIRE(onsets.size() == 1);
    CHECK(onsets.events[0].label == StrokeLabel("Dha"));
}
