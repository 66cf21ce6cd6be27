#include "tsad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tsad/rng.hpp"

namespace tsad {

std::string anomaly_type_name(AnomalyType type) {
    switch (type) {
        case AnomalyType::mean_shift: return "mean-shift";
        case AnomalyType::drift: return "drift";
        case AnomalyType::correlation_break: return "correlation-break";
    }
    throw std::logic_error("unknown anomaly type");
}

AnomalyType anomaly_type_from_name(const std::string& name) {
    if (name == "mean-shift" || name == "mean_shift") return AnomalyType::mean_shift;
    if (name == "drift") return AnomalyType::drift;
    if (name == "correlation-break" || name == "correlation_break")
        return AnomalyType::correlation_break;
    throw std::invalid_argument("unknown anomaly type '" + name + "'");
}

namespace {

void standardize(Vector& v) {
    const double mean = v.mean();
    v.array() -= mean;
    const double sd = std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
    if (sd > 0.0) v /= sd;
}

// Cumulative-sum random walk smoothed by a moving average of width
// total/20, then standardized; slow and large by construction.
Vector smoothed_walk(long len, Rng& rng) {
    Vector walk(len);
    double acc = 0.0;
    for (long t = 0; t < len; ++t) {
        acc += rng.normal();
        walk(t) = acc;
    }
    const long width = std::max<long>(1, len / 20);
    Vector smooth(len);
    double window_sum = 0.0;
    long lo = 0, hi = -1;  // inclusive window [lo, hi] around t
    for (long t = 0; t < len; ++t) {
        const long want_lo = std::max<long>(0, t - width / 2);
        const long want_hi = std::min<long>(len - 1, t + width / 2);
        while (hi < want_hi) window_sum += walk(++hi);
        while (lo < want_lo) window_sum -= walk(lo++);
        smooth(t) = window_sum / static_cast<double>(want_hi - want_lo + 1);
    }
    standardize(smooth);
    return smooth;
}

// Random low-frequency sinusoid covering 1..4 full periods over the span,
// standardized; bounded, so the test range never leaves the train range.
Vector slow_sinusoid(long len, Rng& rng) {
    const double cycles = rng.uniform(1.0, 4.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Vector v(len);
    for (long t = 0; t < len; ++t)
        v(t) = std::sin(2.0 * std::numbers::pi * cycles * t / static_cast<double>(len) + phase);
    standardize(v);
    return v;
}

void validate(const SyntheticSpec& spec) {
    if (spec.m < 1 || spec.train_len < 2 || spec.test_len < 1)
        throw std::invalid_argument("synthetic spec: dimensions must be positive");
    if (spec.n_long < 1 || spec.n_short < 0)
        throw std::invalid_argument("synthetic spec: driver counts invalid");
    if (spec.amplitude_ratio < 5.0)
        throw std::invalid_argument("synthetic spec: amplitude_ratio must be >= 5");
    if (spec.min_signals_per_short < 1 || spec.max_signals_per_short < spec.min_signals_per_short)
        throw std::invalid_argument("synthetic spec: signals-per-short range invalid");
    for (const AnomalyEvent& a : spec.anomalies) {
        if (a.duration < 1 || a.start < 0 || a.start + a.duration > spec.test_len)
            throw std::invalid_argument("synthetic spec: anomaly outside the test range");
        if (a.signals.empty())
            throw std::invalid_argument("synthetic spec: anomaly affects no signals");
        for (int s : a.signals)
            if (s < 0 || s >= spec.m)
                throw std::invalid_argument("synthetic spec: anomaly signal index out of range");
    }
}

}  // namespace

SyntheticData generate(const SyntheticSpec& spec) {
    validate(spec);
    const long total = spec.train_len + spec.test_len;
    const int m = spec.m;

    // Independent streams per concern keep the output stable under changes
    // elsewhere (e.g. adding anomalies never reshuffles the drivers).
    Rng long_rng(derive_seed(spec.seed, 10));
    Rng short_rng(derive_seed(spec.seed, 11));
    Rng mix_rng(derive_seed(spec.seed, 12));
    Rng noise_rng(derive_seed(spec.seed, 13));
    Rng anomaly_rng(derive_seed(spec.seed, 14));

    // Latent drivers (driver-major generation order is pinned).
    Matrix long_drivers(total, spec.n_long);
    for (int k = 0; k < spec.n_long; ++k)
        long_drivers.col(k) = spec.long_driver == LongDriverKind::smoothed_walk
                                  ? smoothed_walk(total, long_rng)
                                  : slow_sinusoid(total, long_rng);
    Matrix short_drivers(total, std::max(1, spec.n_short));
    short_drivers.setZero();
    for (int k = 0; k < spec.n_short; ++k) {
        Vector w(total);
        for (long t = 0; t < total; ++t) w(t) = short_rng.normal();
        standardize(w);
        short_drivers.col(k) = w;
    }

    // Global mixing: every signal is strongly driven by every long driver;
    // rows are normalized so each signal's long-part std is exactly the
    // amplitude ratio (in short-driver units).
    Matrix g(m, spec.n_long);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < spec.n_long; ++k) {
            const double sign = mix_rng.uniform() < 0.5 ? -1.0 : 1.0;
            g(j, k) = sign * mix_rng.uniform(0.5, 1.5);
        }
        g.row(j) *= spec.amplitude_ratio / g.row(j).norm();
    }

    // Local mixing: each short driver touches a small signal subset; rows
    // are capped at unit norm so no signal's short part exceeds the
    // short-driver amplitude.
    Matrix l = Matrix::Zero(m, std::max(1, spec.n_short));
    for (int k = 0; k < spec.n_short; ++k) {
        const int span = spec.max_signals_per_short - spec.min_signals_per_short + 1;
        const int count = std::min<int>(
            m, spec.min_signals_per_short + static_cast<int>(mix_rng.bounded(span)));
        std::vector<int> pool(m);
        for (int j = 0; j < m; ++j) pool[j] = j;
        mix_rng.shuffle(pool);
        for (int c = 0; c < count; ++c) {
            const double sign = mix_rng.uniform() < 0.5 ? -1.0 : 1.0;
            l(pool[c], k) = sign * mix_rng.uniform(0.5, 1.5);
        }
    }
    for (int j = 0; j < m; ++j) {
        const double norm = l.row(j).norm();
        if (norm > 1.0) l.row(j) /= norm;
    }

    Matrix values = long_drivers * g.transpose() + short_drivers * l.transpose();
    for (long t = 0; t < total; ++t)
        for (int j = 0; j < m; ++j) values(t, j) += spec.noise_level * noise_rng.normal();

    // Per-signal short-component amplitude (driver units): the unit in
    // which anomaly magnitudes are expressed.
    Vector unit(m);
    for (int j = 0; j < m; ++j)
        unit(j) = std::sqrt(l.row(j).squaredNorm() + spec.noise_level * spec.noise_level);

    // Inject anomalies into the test span (pre-scaling; the affine
    // post-scaling preserves their size relative to every component).
    std::vector<int> labels(spec.test_len, 0);
    for (const AnomalyEvent& a : spec.anomalies) {
        for (long t = a.start; t < a.start + a.duration; ++t) labels[t] = 1;
        for (int s : a.signals) {
            for (long t = a.start; t < a.start + a.duration; ++t) {
                const long row = spec.train_len + t;
                switch (a.type) {
                    case AnomalyType::mean_shift:
                        values(row, s) += a.magnitude * unit(s);
                        break;
                    case AnomalyType::drift:
                        values(row, s) += a.magnitude * unit(s) *
                                          static_cast<double>(t - a.start + 1) /
                                          static_cast<double>(a.duration);
                        break;
                    case AnomalyType::correlation_break: {
                        // Replace the locally correlated part with an
                        // independent draw of the same amplitude class.
                        const double fresh = anomaly_rng.normal();
                        const double short_part = short_drivers.row(row) * l.row(s).transpose();
                        values(row, s) += a.magnitude * unit(s) * fresh - short_part;
                        break;
                    }
                }
            }
        }
    }

    // Post-scale each signal so its normal range sits in [0.1, 0.9]; the
    // range is taken over the normal (pre-injection) span, which here means
    // clamping to the same affine map computed from min/max of the
    // uninjected series. Anomalous excursions may leave the band.
    Vector lo(m), hi(m);
    {
        // min/max over the normal series: recompute from components to
        // stay independent of the injected values.
        Matrix normal = long_drivers * g.transpose() + short_drivers * l.transpose();
        // The additive noise was already folded into `values`; its effect
        // on the range is negligible next to the long component, so the
        // component-based range is a stable scaling anchor.
        lo = normal.colwise().minCoeff().transpose();
        hi = normal.colwise().maxCoeff().transpose();
    }
    for (int j = 0; j < m; ++j) {
        const double span = std::max(hi(j) - lo(j), 1e-12);
        values.col(j) = 0.1 + 0.8 * (values.col(j).array() - lo(j)) / span;
        unit(j) *= 0.8 / span;
    }

    SyntheticData out;
    out.train.values = values.topRows(spec.train_len);
    out.test.values = values.bottomRows(spec.test_len);
    out.test.labels = labels;
    out.train.column_names.reserve(m);
    for (int j = 0; j < m; ++j)
        out.train.column_names.push_back("signal_" + std::to_string(j));
    out.test.column_names = out.train.column_names;
    return out;
}

CorrelationSeparation correlation_separation_check(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("correlation_separation_check: length mismatch");
    if (a.rows() < 2)
        throw std::invalid_argument("correlation_separation_check: need at least 2 samples");

    auto center_and_flag = [](const Matrix& x, Matrix& centered, std::vector<bool>& constant) {
        centered = x.rowwise() - x.colwise().mean();
        constant.resize(x.cols());
        for (long j = 0; j < x.cols(); ++j)
            constant[j] = centered.col(j).squaredNorm() == 0.0;
    };

    CorrelationSeparation out;
    Matrix ca, cb;
    center_and_flag(a, ca, out.constant_a);
    center_and_flag(b, cb, out.constant_b);
    out.any_constant =
        std::find(out.constant_a.begin(), out.constant_a.end(), true) != out.constant_a.end() ||
        std::find(out.constant_b.begin(), out.constant_b.end(), true) != out.constant_b.end();

    out.rho.resize(a.cols(), b.cols());
    double sum_abs = 0.0;
    for (long i = 0; i < a.cols(); ++i) {
        const double na = ca.col(i).norm();
        for (long j = 0; j < b.cols(); ++j) {
            const double nb = cb.col(j).norm();
            double rho = 0.0;
            if (!out.constant_a[i] && !out.constant_b[j])
                rho = ca.col(i).dot(cb.col(j)) / (na * nb);
            out.rho(i, j) = rho;
            sum_abs += std::abs(rho);
            out.max_abs = std::max(out.max_abs, std::abs(rho));
        }
    }
    out.mean_abs = sum_abs / static_cast<double>(a.cols() * b.cols());
    return out;
}

}  // namespace tsad
