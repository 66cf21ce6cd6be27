#include <doctest.h>

#include <algorithm>
#include <vector>

#include "tsad/evaluation.hpp"
#include "tsad/rng.hpp"

using namespace tsad;

namespace {

// Brute-force point-adjust used as the oracle everywhere below.
std::vector<int> oracle_adjust(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::vector<int> out = pred;
    std::size_t i = 0;
    while (i < truth.size()) {
        if (truth[i] == 1) {
            std::size_t j = i;
            while (j < truth.size() && truth[j] == 1) ++j;
            bool hit = false;
            for (std::size_t k = i; k < j; ++k) hit = hit || pred[k] != 0;
            if (hit)
                for (std::size_t k = i; k < j; ++k) out[k] = 1;
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

PrfResult oracle_prf(const std::vector<int>& pred, const std::vector<int>& truth) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        tp += pred[i] == 1 && truth[i] == 1;
        fp += pred[i] == 1 && truth[i] == 0;
        fn += pred[i] == 0 && truth[i] == 1;
    }
    PrfResult r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.precision = tp + fp > 0 ? double(tp) / (tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? double(tp) / (tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall)
                                      : 0.0;
    return r;
}

std::vector<int> random_labels(std::size_t n, Rng& rng, double p_one) {
    std::vector<int> v(n);
    for (auto& x : v) x = rng.uniform() < p_one ? 1 : 0;
    return v;
}

}  // namespace

TEST_CASE("segments_from_labels") {
    CHECK(segments_from_labels({0, 0, 0}).empty());
    const auto segs = segments_from_labels({0, 1, 1, 0, 1});
    REQUIRE(segs.size() == 2);
    CHECK(segs[0] == AnomalySegment{1, 2});
    CHECK(segs[1] == AnomalySegment{4, 4});
    CHECK(segments_from_labels({}).empty());
    CHECK(segments_from_labels({1, 1}) == std::vector<AnomalySegment>{{0, 1}});

    Rng rng(1);
    for (int rep = 0; rep < 50; ++rep) {
        const auto truth = random_labels(1 + rng.bounded(60), rng, 0.3);
        const auto segs2 = segments_from_labels(truth);
        // Run-length oracle: rebuild the labels from the segments.
        std::vector<int> rebuilt(truth.size(), 0);
        long prev_end = -1;
        for (const auto& s : segs2) {
            CHECK(s.start <= s.end);
            CHECK(s.start > prev_end + 1);  // maximal runs are separated
            prev_end = s.end;
            for (long i = s.start; i <= s.end; ++i) rebuilt[i] = 1;
        }
        CHECK(rebuilt == truth);
    }
}

TEST_CASE("point_adjust examples") {
    // Truth segment [2,5], one detection inside expands to the whole segment.
    const std::vector<int> truth{0, 0, 1, 1, 1, 1, 0};
    const std::vector<int> pred{0, 0, 0, 1, 0, 0, 0};
    CHECK(point_adjust(pred, truth) == std::vector<int>{0, 0, 1, 1, 1, 1, 0});

    // No detection inside: unchanged.
    const std::vector<int> miss{1, 0, 0, 0, 0, 0, 1};
    CHECK(point_adjust(miss, truth) == miss);

    // Detections outside segments stay (they remain false positives).
    const std::vector<int> outside{1, 0, 0, 1, 0, 0, 0};
    CHECK(point_adjust(outside, truth) == std::vector<int>{1, 0, 1, 1, 1, 1, 0});

    CHECK_THROWS_AS(point_adjust({0, 1}, {0}), std::invalid_argument);
}

TEST_CASE("prf examples") {
    const PrfResult perfect = prf({0, 1, 1}, {0, 1, 1});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    const PrfResult r = prf({1, 1, 0}, {0, 1, 0});
    CHECK(r.tp == 1);
    CHECK(r.fp == 1);
    CHECK(r.fn == 0);
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));

    const PrfResult zero = prf({0, 0}, {0, 0});
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);
}

TEST_CASE("point_adjust + prf match the brute-force oracle") {
    Rng rng(2);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 1 + rng.bounded(60);
        const auto truth = random_labels(n, rng, 0.25);
        const auto pred = random_labels(n, rng, 0.3);
        const auto adjusted = point_adjust(pred, truth);
        CHECK(adjusted == oracle_adjust(pred, truth));
        const PrfResult mine = prf(adjusted, truth);
        const PrfResult oracle = oracle_prf(adjusted, truth);
        CHECK(mine.tp == oracle.tp);
        CHECK(mine.fp == oracle.fp);
        CHECK(mine.fn == oracle.fn);
        CHECK(mine.f1 == oracle.f1);
    }
}

TEST_CASE("point_adjust properties") {
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + rng.bounded(60);
        const auto truth = random_labels(n, rng, 0.25);
        const auto pred = random_labels(n, rng, 0.3);
        const auto adjusted = point_adjust(pred, truth);
        // Never decreases TP.
        CHECK(prf(adjusted, truth).tp >= prf(pred, truth).tp);
        // Never changes labels outside truth segments.
        for (std::size_t i = 0; i < n; ++i)
            if (truth[i] == 0) CHECK(adjusted[i] == pred[i]);
        // Adjusted recall is 1 exactly when every segment has a raw hit.
        const auto segs = segments_from_labels(truth);
        bool all_hit = true;
        for (const auto& s : segs) {
            bool hit = false;
            for (long i = s.start; i <= s.end; ++i) hit = hit || pred[i];
            all_hit = all_hit && hit;
        }
        if (!segs.empty())
            CHECK((prf(adjusted, truth).recall == 1.0) == all_hit);
    }
}

TEST_CASE("best_f1_sweep basic cases") {
    const EvalReport r = best_f1_sweep({1.0, 2.0, 3.0}, {0, 0, 1});
    CHECK(r.threshold == 2.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);

    // All-normal truth: F1 stays 0, the chosen threshold silences all alarms.
    const EvalReport quiet = best_f1_sweep({1.0, 5.0, 2.0}, {0, 0, 0});
    CHECK(quiet.f1 == 0.0);
    CHECK(quiet.threshold == 6.0);
    CHECK(quiet.no_anomalies);

    CHECK_THROWS_AS(best_f1_sweep({}, {}), std::invalid_argument);
}

TEST_CASE("best_f1_sweep matches the exhaustive oracle") {
    Rng rng(4);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.bounded(200);
        const auto truth = random_labels(n, rng, 0.2);
        std::vector<double> scores(n);
        // Coarse grid forces plenty of exact score ties.
        for (auto& s : scores) s = static_cast<double>(rng.bounded(12));

        std::vector<double> candidates(scores);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        candidates.push_back(candidates.back() + 1.0);
        double best_f1 = -1.0, best_lambda = 0.0;
        for (double lambda : candidates) {
            std::vector<int> pred(n);
            for (std::size_t i = 0; i < n; ++i) pred[i] = scores[i] > lambda ? 1 : 0;
            const PrfResult r = oracle_prf(oracle_adjust(pred, truth), truth);
            if (r.f1 > best_f1 || (r.f1 == best_f1 && lambda > best_lambda)) {
                best_f1 = r.f1;
                best_lambda = lambda;
            }
        }

        const EvalReport mine = best_f1_sweep(scores, truth);
        CHECK(mine.f1 == best_f1);
        CHECK(mine.threshold == best_lambda);
    }
}

TEST_CASE("sweep F1 dominates any fixed threshold") {
    Rng rng(5);
    const std::size_t n = 150;
    const auto truth = random_labels(n, rng, 0.2);
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.uniform(0.0, 4.0);
    const EvalReport best = best_f1_sweep(scores, truth);
    for (int rep = 0; rep < 50; ++rep) {
        const double lambda = rng.uniform(-1.0, 5.0);
        CHECK(best.f1 >= evaluate_at(scores, truth, lambda).f1);
    }
}

TEST_CASE("monotone thresholding: higher lambda fires a subset") {
    Rng rng(6);
    const std::size_t n = 100;
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.uniform(0.0, 1.0);
    const double l1 = 0.3, l2 = 0.7;
    for (std::size_t i = 0; i < n; ++i) {
        const int y1 = scores[i] > l1 ? 1 : 0;
        const int y2 = scores[i] > l2 ? 1 : 0;
        CHECK(y2 <= y1);
    }
}

TEST_CASE("eval report JSON carries the headline numbers") {
    const EvalReport r = best_f1_sweep({1.0, 2.0, 3.0}, {0, 0, 1});
    const std::string json = eval_report_json(r);
    CHECK(json.find("\"f1\": 1.0") != std::string::npos);
    CHECK(json.find("\"threshold\": 2.0") != std::string::npos);
    CHECK(json.find("segments_detected") != std::string::npos);
}
