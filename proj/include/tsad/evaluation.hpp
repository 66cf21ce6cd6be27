#pragma once

#include <string>
#include <vector>

namespace tsad {

// Maximal run of 1s in a truth vector, inclusive bounds.
struct AnomalySegment {
    long start = 0;
    long end = 0;
    bool operator==(const AnomalySegment&) const = default;
};

std::vector<AnomalySegment> segments_from_labels(const std::vector<int>& truth);

// Point-adjust: if any prediction inside a ground-truth segment fires,
// the whole segment counts as detected; predictions outside segments are
// left alone.
std::vector<int> point_adjust(const std::vector<int>& pred, const std::vector<int>& truth);

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

// Point-wise precision/recall/F1. P (and F1) are 0 when TP+FP == 0,
// R is 0 when TP+FN == 0.
PrfResult prf(const std::vector<int>& pred, const std::vector<int>& truth);

struct EvalReport {
    double threshold = 0.0;
    long tp = 0, fp = 0, fn = 0;  // after point-adjust
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::vector<bool> segment_detected;
    long raw_tp = 0, raw_fp = 0, raw_fn = 0;  // before point-adjust
    bool no_anomalies = false;                // truth had no segments
};

// Point-adjusted metrics of (scores > threshold) against truth.
EvalReport evaluate_at(const std::vector<double>& scores, const std::vector<int>& truth,
                       double threshold);

struct SweepPoint {
    double threshold = 0.0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Exhaustive threshold selection: every distinct score value plus one
// value above the maximum is evaluated with strict >, and the threshold
// with the best point-adjusted F1 wins; ties go to the larger threshold
// (fewer alarms). Optionally records the whole curve.
EvalReport best_f1_sweep(const std::vector<double>& scores, const std::vector<int>& truth,
                         std::vector<SweepPoint>* curve = nullptr);

std::string eval_report_json(const EvalReport& report);

}  // namespace tsad
