#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flare/errors.hpp"
#include "flare/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace flare;

namespace {
constexpr DecisionValue S = DecisionValue::Stay;
constexpr DecisionValue E = DecisionValue::Evacuate;
}  // namespace

TEST_CASE("confusion counts place stay as the positive class") {
    //                 predictions        actuals
    const ConfusionMatrix m = confusion({S, S, E, E, S, E}, {S, E, E, S, S, E});
    CHECK(m.tp == 2);  // stay predicted, stay actual (0, 4)
    CHECK(m.fp == 1);  // stay predicted, evacuate actual (1)
    CHECK(m.fn == 1);  // evacuate predicted, stay actual (3)
    CHECK(m.tn == 2);  // evacuate on both sides (2, 5)
    CHECK(m.n_pos() == 3);
    CHECK(m.n_neg() == 3);
    CHECK(m.total() == 6);

    CHECK_THROWS_AS(confusion({S}, {S, E}), LengthMismatch);
    CHECK_THROWS_AS(confusion({}, {}), EmptyInput);
}

TEST_CASE("metric formulas match a hand-worked example") {
    ConfusionMatrix m;
    m.tp = 6;
    m.fp = 2;
    m.fn = 3;
    m.tn = 9;
    const MetricsReport report = metrics_from_confusion(m);
    CHECK(report.stay.precision == doctest::Approx(0.75).epsilon(1e-15));          // 6/8
    CHECK(report.stay.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));        // 6/9
    CHECK(report.stay.f1 == doctest::Approx(12.0 / 17.0).epsilon(1e-15));
    CHECK(report.evacuate.precision == doctest::Approx(0.75).epsilon(1e-15));      // 9/12
    CHECK(report.evacuate.recall == doctest::Approx(9.0 / 11.0).epsilon(1e-15));   // 9/11
    CHECK(report.evacuate.f1 == doctest::Approx(18.0 / 23.0).epsilon(1e-15));
    CHECK(report.accuracy == doctest::Approx(0.75).epsilon(1e-15));                // 15/20
    CHECK(report.macro_f1 ==
          doctest::Approx((12.0 / 17.0 + 18.0 / 23.0) / 2.0).epsilon(1e-15));
    CHECK(report.weighted_f1 ==
          doctest::Approx((9.0 * (12.0 / 17.0) + 11.0 * (18.0 / 23.0)) / 20.0).epsilon(1e-15));
    CHECK_FALSE(report.mse.has_value());
}

TEST_CASE("zero denominators report 0 instead of dividing") {
    // Everything predicted evacuate, everything actually evacuate: the stay
    // side has no support anywhere.
    const MetricsReport report = compute_metrics({E, E, E}, {E, E, E});
    CHECK(report.stay.precision == 0.0);
    CHECK(report.stay.recall == 0.0);
    CHECK(report.stay.f1 == 0.0);
    CHECK(report.evacuate.precision == 1.0);
    CHECK(report.evacuate.recall == 1.0);
    CHECK(report.evacuate.f1 == 1.0);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_f1 == 0.5);
    CHECK(report.weighted_f1 == 1.0);

    // Predicted all stay while all actuals evacuate: every cell but fp empty.
    const MetricsReport wrong = compute_metrics({S, S}, {E, E});
    CHECK(wrong.stay.precision == 0.0);
    CHECK(wrong.stay.recall == 0.0);  // no positive actuals
    CHECK(wrong.evacuate.recall == 0.0);
    CHECK(wrong.accuracy == 0.0);
    CHECK(wrong.macro_f1 == 0.0);

    ConfusionMatrix empty;
    CHECK_THROWS_AS(metrics_from_confusion(empty), EmptyInput);
}

TEST_CASE("random confusions agree with the naive oracle to 1e-12") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        ConfusionMatrix m;
        m.tp = rng() % 40;
        m.tn = rng() % 40;
        m.fp = rng() % 40;
        m.fn = rng() % 40;
        if (m.total() == 0) m.tp = 1;
        const MetricsReport got = metrics_from_confusion(m);
        const oracle::NaiveMetrics want = oracle::naive_metrics(m.tp, m.tn, m.fp, m.fn);
        CHECK(got.stay.precision == doctest::Approx(want.stay_precision).epsilon(1e-12));
        CHECK(got.stay.recall == doctest::Approx(want.stay_recall).epsilon(1e-12));
        CHECK(got.stay.f1 == doctest::Approx(want.stay_f1).epsilon(1e-12));
        CHECK(got.evacuate.precision == doctest::Approx(want.evacuate_precision).epsilon(1e-12));
        CHECK(got.evacuate.recall == doctest::Approx(want.evacuate_recall).epsilon(1e-12));
        CHECK(got.evacuate.f1 == doctest::Approx(want.evacuate_f1).epsilon(1e-12));
        CHECK(got.accuracy == doctest::Approx(want.accuracy).epsilon(1e-12));
        CHECK(got.macro_f1 == doctest::Approx(want.macro_f1).epsilon(1e-12));
        CHECK(got.weighted_f1 == doctest::Approx(want.weighted_f1).epsilon(1e-12));
    }
}

TEST_CASE("mean squared error") {
    CHECK(compute_mse({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
    CHECK(compute_mse({2.0, 4.0}, {1.0, 2.0}) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK_THROWS_AS(compute_mse({1.0}, {1.0, 2.0}), LengthMismatch);
    CHECK_THROWS_AS(compute_mse({}, {}), EmptyInput);
}

TEST_CASE("score confusion counts rows by actual and columns by predicted") {
    const ScoreConfusion sc = score_confusion({1, 5, 5, 3}, {2, 5, 4, 3});
    CHECK(sc.counts[1][0] == 1);  // actual 2, predicted 1
    CHECK(sc.counts[4][4] == 1);
    CHECK(sc.counts[3][4] == 1);  // actual 4, predicted 5
    CHECK(sc.counts[2][2] == 1);
    std::size_t total = 0;
    for (const auto& row : sc.counts)
        for (std::size_t c : row) total += c;
    CHECK(total == 4);

    CHECK_THROWS_AS(score_confusion({0}, {1}), OutOfRangeScore);
    CHECK_THROWS_AS(score_confusion({1}, {6}), OutOfRangeScore);
    CHECK_THROWS_AS(score_confusion({1, 2}, {1}), LengthMismatch);

    const auto norm = sc.normalized();
    CHECK(norm[4][4] == 1.0);  // actual-5 row has one sample
    CHECK(norm[3][4] == 1.0);  // actual-4 row has one sample
    CHECK(norm[0][0] == 0.0);  // empty row stays zero
}

TEST_CASE("score confusion serializes to csv in both views") {
    const ScoreConfusion sc = score_confusion({1, 1, 2}, {1, 2, 2});
    CHECK(score_confusion_csv(sc, false) ==
          "actual\\predicted,1,2,3,4,5\n"
          "1,1,0,0,0,0\n"
          "2,1,1,0,0,0\n"
          "3,0,0,0,0,0\n"
          "4,0,0,0,0,0\n"
          "5,0,0,0,0,0\n");
    CHECK(score_confusion_csv(sc, true) ==
          "actual\\predicted,1,2,3,4,5\n"
          "1,1.0000,0.0000,0.0000,0.0000,0.0000\n"
          "2,0.5000,0.5000,0.0000,0.0000,0.0000\n"
          "3,0.0000,0.0000,0.0000,0.0000,0.0000\n"
          "4,0.0000,0.0000,0.0000,0.0000,0.0000\n"
          "5,0.0000,0.0000,0.0000,0.0000,0.0000\n");
}

TEST_CASE("score confusion renders a self-contained svg heatmap") {
    const ScoreConfusion sc = score_confusion({1, 2, 3, 4, 5}, {1, 2, 3, 4, 5});
    const std::string svg = score_confusion_svg(sc, "calibration check");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("calibration check") != std::string::npos);
    std::size_t rects = 0;
    for (std::size_t pos = 0; (pos = svg.find("<rect", pos)) != std::string::npos; pos += 5)
        ++rects;
    CHECK(rects >= 25);  // one cell per score pair
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("metrics reports round-trip through json") {
    const MetricsReport report = compute_metrics({S, E, S, E, S}, {S, S, E, E, S});
    const std::string text = metrics_to_json(report);
    const MetricsReport back = metrics_from_json(text);
    CHECK(back.stay.precision == report.stay.precision);
    CHECK(back.stay.recall == report.stay.recall);
    CHECK(back.stay.f1 == report.stay.f1);
    CHECK(back.evacuate.f1 == report.evacuate.f1);
    CHECK(back.accuracy == report.accuracy);
    CHECK(back.macro_f1 == report.macro_f1);
    CHECK(back.weighted_f1 == report.weighted_f1);
    CHECK_FALSE(back.mse.has_value());
    CHECK(metrics_to_json(back) == text);  // byte-stable re-serialization

    MetricsReport with_mse = report;
    with_mse.mse = 1.25;
    const MetricsReport back2 = metrics_from_json(metrics_to_json(with_mse));
    REQUIRE(back2.mse.has_value());
    CHECK(*back2.mse == 1.25);

    CHECK_THROWS_AS(metrics_from_json("{"), Error);
}

TEST_CASE("the report table matches its committed golden") {
    ConfusionMatrix first;
    first.tp = 6;
    first.fp = 2;
    first.fn = 3;
    first.tn = 9;
    ConfusionMatrix second;
    second.tp = 1;
    second.fp = 0;
    second.fn = 4;
    second.tn = 15;
    const std::vector<ReportRow> rows = {{"flare", metrics_from_confusion(first)},
                                         {"logit", metrics_from_confusion(second)}};
    const auto diff = testsup::golden_diff("golden/report_table.txt", render_report_table(rows));
    CHECK_MESSAGE(!diff.has_value(), diff.value_or(""));
}
