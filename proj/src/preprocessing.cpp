#include "tsad/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "tsad/dsp.hpp"
#include "tsad/rng.hpp"

namespace tsad {

ScalingParams fit_minmax(const TimeSeriesMatrix& train) {
    if (train.rows() < 1) throw std::invalid_argument("fit_minmax: empty matrix");
    ScalingParams p;
    p.col_min = train.values.colwise().minCoeff().transpose();
    p.col_max = train.values.colwise().maxCoeff().transpose();
    p.constant.resize(train.cols());
    for (long j = 0; j < train.cols(); ++j) p.constant[j] = p.col_min(j) == p.col_max(j);
    return p;
}

Matrix apply_minmax(const ScalingParams& params, const Matrix& data) {
    if (data.cols() != params.cols())
        throw std::invalid_argument("apply_minmax: column count mismatch");
    Matrix scaled(data.rows(), data.cols());
    for (long j = 0; j < data.cols(); ++j) {
        const double denom = params.constant[j] ? 1.0 : params.col_max(j) - params.col_min(j);
        scaled.col(j) = (data.col(j).array() - params.col_min(j)) / denom;
    }
    return scaled;
}

TimeSeriesMatrix apply_minmax(const ScalingParams& params, const TimeSeriesMatrix& data) {
    TimeSeriesMatrix out = data;
    out.values = apply_minmax(params, data.values);
    return out;
}

Matrix invert_minmax(const ScalingParams& params, const Matrix& scaled) {
    if (scaled.cols() != params.cols())
        throw std::invalid_argument("invert_minmax: column count mismatch");
    Matrix raw(scaled.rows(), scaled.cols());
    for (long j = 0; j < scaled.cols(); ++j) {
        const double denom = params.constant[j] ? 1.0 : params.col_max(j) - params.col_min(j);
        raw.col(j) = scaled.col(j).array() * denom + params.col_min(j);
    }
    return raw;
}

TimeSeriesMatrix exclude_signals(const TimeSeriesMatrix& data,
                                 const std::vector<std::string>& names) {
    std::unordered_set<std::string> drop(names.begin(), names.end());
    for (const auto& name : names)
        if (std::find(data.column_names.begin(), data.column_names.end(), name) ==
            data.column_names.end())
            throw std::invalid_argument("exclude_signals: unknown column '" + name + "'");

    std::vector<long> keep;
    for (long j = 0; j < data.cols(); ++j)
        if (!drop.count(data.column_names[j])) keep.push_back(j);

    TimeSeriesMatrix out;
    out.values.resize(data.rows(), static_cast<long>(keep.size()));
    out.column_names.reserve(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.values.col(static_cast<long>(k)) = data.values.col(keep[k]);
        out.column_names.push_back(data.column_names[keep[k]]);
    }
    out.labels = data.labels;
    out.timestamps = data.timestamps;
    out.sample_period = data.sample_period;
    return out;
}

TimeSeriesMatrix decimate(const TimeSeriesMatrix& data, int q) {
    if (q < 1) throw std::invalid_argument("decimate: q must be >= 1");
    if (q == 1) return data;

    const long t_in = data.rows();
    const FilterCoeffs filt = cheby1_lowpass(8, 0.05, 0.8 / q);
    if (static_cast<std::size_t>(t_in) <= filtfilt_min_length(filt))
        throw std::invalid_argument("decimate: series too short for the anti-aliasing filter");

    const long t_out = (t_in + q - 1) / q;  // ceil(T/q)
    TimeSeriesMatrix out;
    out.values.resize(t_out, data.cols());
    out.column_names = data.column_names;
    if (data.sample_period) out.sample_period = *data.sample_period * q;

    std::vector<double> col(t_in);
    for (long j = 0; j < data.cols(); ++j) {
        for (long i = 0; i < t_in; ++i) col[i] = data.values(i, j);
        const std::vector<double> filtered = filtfilt(filt, col);
        for (long i = 0; i < t_out; ++i) out.values(i, j) = filtered[i * q];
    }

    if (data.has_labels()) {
        out.labels.resize(t_out, 0);
        for (long i = 0; i < t_out; ++i) {
            const long lo = i * q;
            const long hi = std::min(lo + q, t_in);
            int any = 0;
            for (long t = lo; t < hi; ++t) any |= data.labels[t];
            out.labels[i] = any;
        }
    }
    if (!data.timestamps.empty()) {
        out.timestamps.reserve(t_out);
        for (long i = 0; i < t_out; ++i) out.timestamps.push_back(data.timestamps[i * q]);
    }
    return out;
}

Vector WindowSeries::flattened(int i) const {
    const long m = values.cols();
    Vector flat(flat_dim());
    const long start = static_cast<long>(i) * step;
    for (int k = 0; k < window_len; ++k)
        flat.segment(static_cast<long>(k) * m, m) = values.row(start + k).transpose();
    return flat;
}

Matrix WindowSeries::flatten_all() const {
    std::vector<int> all(count());
    std::iota(all.begin(), all.end(), 0);
    return flatten_subset(all);
}

Matrix WindowSeries::flatten_subset(const std::vector<int>& indices) const {
    const long m = values.cols();
    Matrix flat(static_cast<long>(indices.size()), flat_dim());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const long start = static_cast<long>(indices[r]) * step;
        for (int k = 0; k < window_len; ++k)
            flat.block(static_cast<long>(r), static_cast<long>(k) * m, 1, m) =
                values.row(start + k);
    }
    return flat;
}

WindowSeries make_windows(const TimeSeriesMatrix& data, int window_len, int step) {
    if (window_len < 1) throw std::invalid_argument("make_windows: window length must be >= 1");
    if (step < 1) throw std::invalid_argument("make_windows: step must be >= 1");
    if (data.rows() < window_len)
        throw std::invalid_argument("make_windows: series shorter than the window");
    WindowSeries ws;
    ws.values = data.values;
    ws.base_labels = data.labels;
    ws.window_len = window_len;
    ws.step = step;
    return ws;
}

TrainValSplit split_train_val(int n_windows, std::uint64_t seed) {
    if (n_windows < 5) throw std::invalid_argument("split_train_val: need at least 5 windows");
    std::vector<int> order(n_windows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x51));
    rng.shuffle(order);

    const int n_val = static_cast<int>(std::llround(n_windows / 5.0));
    TrainValSplit split;
    split.val_indices.assign(order.begin(), order.begin() + n_val);
    split.train_indices.assign(order.begin() + n_val, order.end());
    std::sort(split.val_indices.begin(), split.val_indices.end());
    std::sort(split.train_indices.begin(), split.train_indices.end());
    return split;
}

}  // namespace tsad
