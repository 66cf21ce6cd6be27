#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsad/preprocessing.hpp"
#include "tsad/types.hpp"

namespace tsad {

enum class AnomalyType { mean_shift, drift, correlation_break };

std::string anomaly_type_name(AnomalyType type);
AnomalyType anomaly_type_from_name(const std::string& name);

// One injected anomaly. `start` and `duration` are in test-set row
// coordinates; `magnitude` is in units of the affected signal's
// short-component amplitude (its short+noise standard deviation).
struct AnomalyEvent {
    AnomalyType type = AnomalyType::mean_shift;
    std::vector<int> signals;
    long start = 0;
    long duration = 0;
    double magnitude = 1.0;
};

enum class LongDriverKind { smoothed_walk, sinusoid };

// Plant-like signals as a sum of two independent behaviors: a few slow,
// large-amplitude drivers mixed into every signal (global correlation)
// and a few temporally white, small-amplitude drivers each mixed into a
// small signal subset (local correlation), plus sensor noise.
struct SyntheticSpec {
    int m = 30;
    long train_len = 20000;
    long test_len = 5000;
    int n_long = 4;
    int n_short = 3;
    double amplitude_ratio = 5.0;  // long vs short driver amplitude, >= 5
    double noise_level = 0.2;      // sensor noise std in short-driver units
    LongDriverKind long_driver = LongDriverKind::smoothed_walk;
    int min_signals_per_short = 3;
    int max_signals_per_short = 8;
    std::vector<AnomalyEvent> anomalies;
    std::uint64_t seed = 0;
};

struct SyntheticData {
    TimeSeriesMatrix train;  // label-free normal data
    TimeSeriesMatrix test;   // labels mark injected anomaly rows
};

// Deterministic per seed. Signals are affinely post-scaled so the normal
// span occupies roughly [0.1, 0.9]; anomalous excursions may leave it.
SyntheticData generate(const SyntheticSpec& spec);

// Pearson cross-correlations between every column of `a` and every column
// of `b` (the Fig.-4-style heat-map data when a = AE1 outputs and b = the
// deviations). Constant columns are flagged and their entries set to 0.
struct CorrelationSeparation {
    Matrix rho;  // a.cols() x b.cols()
    double max_abs = 0.0;
    double mean_abs = 0.0;
    std::vector<bool> constant_a, constant_b;
    bool any_constant = false;
};

CorrelationSeparation correlation_separation_check(const Matrix& a, const Matrix& b);

}  // namespace tsad
