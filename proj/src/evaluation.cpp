#include "tsad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace tsad {

std::vector<AnomalySegment> segments_from_labels(const std::vector<int>& truth) {
    std::vector<AnomalySegment> segments;
    long start = -1;
    for (long i = 0; i < static_cast<long>(truth.size()); ++i) {
        if (truth[i] != 0 && start < 0) start = i;
        if (truth[i] == 0 && start >= 0) {
            segments.push_back({start, i - 1});
            start = -1;
        }
    }
    if (start >= 0) segments.push_back({start, static_cast<long>(truth.size()) - 1});
    return segments;
}

std::vector<int> point_adjust(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("point_adjust: length mismatch");
    std::vector<int> adjusted = pred;
    for (const AnomalySegment& seg : segments_from_labels(truth)) {
        bool hit = false;
        for (long i = seg.start; i <= seg.end && !hit; ++i) hit = pred[i] != 0;
        if (hit)
            for (long i = seg.start; i <= seg.end; ++i) adjusted[i] = 1;
    }
    return adjusted;
}

PrfResult prf(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("prf: length mismatch");
    PrfResult r;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] && truth[i]) ++r.tp;
        else if (pred[i] && !truth[i]) ++r.fp;
        else if (!pred[i] && truth[i]) ++r.fn;
    }
    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

EvalReport evaluate_at(const std::vector<double>& scores, const std::vector<int>& truth,
                       double threshold) {
    if (scores.size() != truth.size())
        throw std::invalid_argument("evaluate_at: scores and truth must be aligned");
    std::vector<int> pred(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) pred[i] = scores[i] > threshold ? 1 : 0;

    const PrfResult raw = prf(pred, truth);
    const std::vector<int> adjusted = point_adjust(pred, truth);
    const PrfResult adj = prf(adjusted, truth);

    EvalReport report;
    report.threshold = threshold;
    report.tp = adj.tp;
    report.fp = adj.fp;
    report.fn = adj.fn;
    report.precision = adj.precision;
    report.recall = adj.recall;
    report.f1 = adj.f1;
    report.raw_tp = raw.tp;
    report.raw_fp = raw.fp;
    report.raw_fn = raw.fn;

    const auto segments = segments_from_labels(truth);
    report.no_anomalies = segments.empty();
    report.segment_detected.reserve(segments.size());
    for (const AnomalySegment& seg : segments) {
        bool hit = false;
        for (long i = seg.start; i <= seg.end && !hit; ++i) hit = pred[i] != 0;
        report.segment_detected.push_back(hit);
    }
    return report;
}

EvalReport best_f1_sweep(const std::vector<double>& scores, const std::vector<int>& truth,
                         std::vector<SweepPoint>* curve) {
    if (scores.empty()) throw std::invalid_argument("best_f1_sweep: empty input");
    if (scores.size() != truth.size())
        throw std::invalid_argument("best_f1_sweep: scores and truth must be aligned");

    const auto segments = segments_from_labels(truth);

    // A threshold decides (a) which segments contain at least one strict
    // exceedance (each contributes its full length to TP) and (b) how many
    // points outside all segments fire (each is one FP). Sorting the
    // per-segment maxima and the outside scores makes every candidate an
    // O(log n) evaluation instead of a fresh point-adjust pass.
    std::vector<double> seg_max;
    std::vector<long> seg_len;
    long total_anomalous = 0;
    std::vector<bool> inside(scores.size(), false);
    for (const AnomalySegment& seg : segments) {
        double mx = scores[seg.start];
        for (long i = seg.start; i <= seg.end; ++i) {
            inside[i] = true;
            mx = std::max(mx, scores[i]);
        }
        seg_max.push_back(mx);
        seg_len.push_back(seg.end - seg.start + 1);
        total_anomalous += seg.end - seg.start + 1;
    }
    std::vector<double> outside;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (!inside[i]) outside.push_back(scores[i]);
    std::sort(outside.begin(), outside.end());

    // seg_max sorted together with lengths, plus suffix sums of lengths.
    std::vector<std::size_t> seg_order(seg_max.size());
    for (std::size_t i = 0; i < seg_order.size(); ++i) seg_order[i] = i;
    std::sort(seg_order.begin(), seg_order.end(),
              [&](std::size_t a, std::size_t b) { return seg_max[a] < seg_max[b]; });
    std::vector<double> sorted_max(seg_max.size());
    std::vector<long> suffix_len(seg_max.size() + 1, 0);
    for (std::size_t i = 0; i < seg_order.size(); ++i) sorted_max[i] = seg_max[seg_order[i]];
    for (std::size_t i = seg_order.size(); i-- > 0;)
        suffix_len[i] = suffix_len[i + 1] + seg_len[seg_order[i]];

    std::vector<double> candidates(scores);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    candidates.push_back(candidates.back() + 1.0);

    auto adjusted_prf = [&](double lambda) {
        // Segments whose max score strictly exceeds lambda are detected.
        const auto it = std::upper_bound(sorted_max.begin(), sorted_max.end(), lambda);
        const long tp = suffix_len[static_cast<std::size_t>(it - sorted_max.begin())];
        const long fn = total_anomalous - tp;
        const auto out_it = std::upper_bound(outside.begin(), outside.end(), lambda);
        const long fp = static_cast<long>(outside.end() - out_it);
        PrfResult r;
        r.tp = tp;
        r.fp = fp;
        r.fn = fn;
        r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        r.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        r.f1 = (r.precision + r.recall) > 0.0
                   ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                   : 0.0;
        return r;
    };

    double best_lambda = candidates.back();
    double best_f1 = -1.0;
    for (double lambda : candidates) {
        const PrfResult r = adjusted_prf(lambda);
        if (curve != nullptr) curve->push_back({lambda, r.precision, r.recall, r.f1});
        if (r.f1 > best_f1 || (r.f1 == best_f1 && lambda > best_lambda)) {
            best_f1 = r.f1;
            best_lambda = lambda;
        }
    }
    return evaluate_at(scores, truth, best_lambda);
}

std::string eval_report_json(const EvalReport& report) {
    nlohmann::json j;
    j["threshold"] = report.threshold;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["fn"] = report.fn;
    j["raw"] = {{"tp", report.raw_tp}, {"fp", report.raw_fp}, {"fn", report.raw_fn}};
    j["segments_detected"] = report.segment_detected;
    j["no_anomalies"] = report.no_anomalies;
    return j.dump(2);
}

}  // namespace tsad
