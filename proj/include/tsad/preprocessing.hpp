#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsad/types.hpp"

namespace tsad {

// T x m sensor matrix. `labels`, when non-empty, has one 0/1 entry per row;
// `timestamps` are carried through for reports and never used for math.
struct TimeSeriesMatrix {
    Matrix values;
    std::vector<std::string> column_names;
    std::vector<int> labels;
    std::vector<std::string> timestamps;
    std::optional<double> sample_period;

    long rows() const { return values.rows(); }
    long cols() const { return values.cols(); }
    bool has_labels() const { return !labels.empty(); }
};

// Per-column min/max fitted on training data only. apply_minmax never
// refits: test data is scaled with the training factors, and values
// outside the training range deliberately land outside [0, 1].
struct ScalingParams {
    Vector col_min;
    Vector col_max;
    std::vector<bool> constant;

    long cols() const { return col_min.size(); }
};

ScalingParams fit_minmax(const TimeSeriesMatrix& train);

// (x - min) / (max - min), no clipping. Constant columns use a unit
// denominator, so training values map to 0 and test deviations stay
// visible as raw offsets.
Matrix apply_minmax(const ScalingParams& params, const Matrix& data);
TimeSeriesMatrix apply_minmax(const ScalingParams& params, const TimeSeriesMatrix& data);

// Exact algebraic inverse of apply_minmax.
Matrix invert_minmax(const ScalingParams& params, const Matrix& scaled);

// Removes the named columns; remaining column order is preserved.
TimeSeriesMatrix exclude_signals(const TimeSeriesMatrix& data,
                                 const std::vector<std::string>& names);

// Anti-aliased down-sampling by integer factor q. q == 1 is a bit-exact
// identity. For q > 1 every column is filtered with the pinned zero-phase
// low-pass (8th-order Chebyshev I, 0.05 dB ripple, cutoff 0.8/q of
// Nyquist, unit DC gain) and every q-th sample is kept starting at row 0.
// A kept row's label is the OR over its stride so ground-truth segments
// survive resampling.
TimeSeriesMatrix decimate(const TimeSeriesMatrix& data, int q);

// Sliding windows of length K over the rows of a series. Window i covers
// rows [i*step, i*step + K) and is timestamped by its last row.
struct WindowSeries {
    Matrix values;  // owned copy of the underlying T x m series
    std::vector<int> base_labels;
    int window_len = 0;
    int step = 1;

    int count() const {
        return static_cast<int>((values.rows() - window_len) / step + 1);
    }
    long signal_dim() const { return values.cols(); }
    int flat_dim() const { return window_len * static_cast<int>(values.cols()); }

    // Time index (row of the underlying series) of window i's last instant.
    long instant(int i) const { return static_cast<long>(i) * step + window_len - 1; }
    int label(int i) const { return base_labels.empty() ? 0 : base_labels[instant(i)]; }
    bool has_labels() const { return !base_labels.empty(); }

    // Window as a K x m block.
    Matrix window(int i) const {
        return values.middleRows(static_cast<long>(i) * step, window_len);
    }

    // Time-major flattening: entry k*m + j is signal j at instant offset k.
    Vector flattened(int i) const;
    Vector last_instant(int i) const { return values.row(instant(i)).transpose(); }

    // All windows flattened, one per row (count x K*m).
    Matrix flatten_all() const;
    Matrix flatten_subset(const std::vector<int>& indices) const;
};

WindowSeries make_windows(const TimeSeriesMatrix& data, int window_len, int step = 1);

// Seeded random 4:1 partition of {0..n_windows-1}; |val| = round(n/5).
struct TrainValSplit {
    std::vector<int> train_indices;
    std::vector<int> val_indices;
};

TrainValSplit split_train_val(int n_windows, std::uint64_t seed);

}  // namespace tsad
