#include "tsad/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace tsad {

namespace {

using Complex = std::complex<double>;

// Polynomial coefficients (highest power first) from roots.
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> p{1.0};
    for (const Complex& r : roots) {
        std::vector<Complex> q(p.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i] += p[i];
            q[i + 1] -= p[i] * r;
        }
        p = std::move(q);
    }
    return p;
}

}  // namespace

FilterCoeffs cheby1_lowpass(int order, double ripple_db, double cutoff) {
    if (order < 1) throw std::invalid_argument("cheby1_lowpass: order must be >= 1");
    if (!(cutoff > 0.0 && cutoff < 1.0))
        throw std::invalid_argument("cheby1_lowpass: cutoff must be in (0, 1)");

    // Analog prototype poles.
    const double eps = std::sqrt(std::pow(10.0, 0.1 * ripple_db) - 1.0);
    const double mu = std::asinh(1.0 / eps) / order;
    std::vector<Complex> poles;
    poles.reserve(order);
    for (int k = 1; k <= order; ++k) {
        const double theta = std::numbers::pi * (2.0 * k - 1.0) / (2.0 * order);
        poles.emplace_back(-std::sinh(mu) * std::sin(theta),
                           std::cosh(mu) * std::cos(theta));
    }
    Complex gain = 1.0;
    for (const Complex& p : poles) gain *= -p;
    if (order % 2 == 0) gain /= std::sqrt(1.0 + eps * eps);

    // Frequency pre-warp and low-pass scaling (sample rate fixed at 2 so
    // the Nyquist frequency is 1).
    const double fs = 2.0;
    const double warped = 2.0 * fs * std::tan(std::numbers::pi * cutoff / fs);
    for (Complex& p : poles) p *= warped;
    gain *= std::pow(warped, order);

    // Bilinear transform; the analog prototype has no finite zeros, so all
    // digital zeros land at z = -1.
    const double fs2 = 2.0 * fs;
    Complex pole_prod = 1.0;
    std::vector<Complex> zpoles;
    zpoles.reserve(order);
    for (const Complex& p : poles) {
        zpoles.push_back((fs2 + p) / (fs2 - p));
        pole_prod *= (fs2 - p);
    }
    const double zgain = (gain / pole_prod).real();

    const std::vector<Complex> zzeros(order, Complex(-1.0));
    const std::vector<Complex> bpoly = poly_from_roots(zzeros);
    const std::vector<Complex> apoly = poly_from_roots(zpoles);

    FilterCoeffs f;
    f.b.resize(bpoly.size());
    f.a.resize(apoly.size());
    for (std::size_t i = 0; i < bpoly.size(); ++i) f.b[i] = zgain * bpoly[i].real();
    for (std::size_t i = 0; i < apoly.size(); ++i) f.a[i] = apoly[i].real();

    // Even-order Chebyshev I has its passband ripple at DC; normalize the
    // numerator so constants pass through exactly.
    double bsum = 0.0, asum = 0.0;
    for (double v : f.b) bsum += v;
    for (double v : f.a) asum += v;
    const double dc = bsum / asum;
    for (double& v : f.b) v /= dc;
    return f;
}

std::vector<double> lfilter(const FilterCoeffs& f, const std::vector<double>& x,
                            const std::vector<double>& zi) {
    const std::size_t n = std::max(f.a.size(), f.b.size());
    std::vector<double> b(f.b), a(f.a);
    b.resize(n, 0.0);
    a.resize(n, 0.0);
    std::vector<double> z(n - 1, 0.0);
    if (!zi.empty()) {
        if (zi.size() != n - 1) throw std::invalid_argument("lfilter: bad zi length");
        z = zi;
    }
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double yi = b[0] * xi + z[0];
        for (std::size_t j = 1; j < n - 1; ++j)
            z[j - 1] = b[j] * xi + z[j] - a[j] * yi;
        z[n - 2] = b[n - 1] * xi - a[n - 1] * yi;
        y[i] = yi;
    }
    return y;
}

std::vector<double> lfilter_zi(const FilterCoeffs& f) {
    const std::size_t n = std::max(f.a.size(), f.b.size());
    std::vector<double> b(f.b), a(f.a);
    b.resize(n, 0.0);
    a.resize(n, 0.0);

    // Solve (I - A^T) zi = B for the direct-form II transposed state, with
    // A the companion matrix of `a` and B = b[1:] - a[1:]*b[0].
    const std::size_t m = n - 1;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(m, m);
    for (std::size_t i = 0; i < m; ++i) sys(i, 0) += a[i + 1];
    for (std::size_t j = 1; j < m; ++j) sys(j - 1, j) -= 1.0;
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) rhs(i) = b[i + 1] - a[i + 1] * b[0];
    const Eigen::VectorXd zi = sys.partialPivLu().solve(rhs);
    return {zi.data(), zi.data() + m};
}

std::size_t filtfilt_min_length(const FilterCoeffs& f) {
    return 3 * std::max(f.a.size(), f.b.size());
}

std::vector<double> filtfilt(const FilterCoeffs& f, const std::vector<double>& x) {
    const std::size_t padlen = filtfilt_min_length(f);
    if (x.size() <= padlen)
        throw std::invalid_argument("filtfilt: input must be longer than 3x the filter length");

    // Odd extension around both endpoints.
    std::vector<double> ext;
    ext.reserve(x.size() + 2 * padlen);
    for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 2; i <= padlen + 1; ++i)
        ext.push_back(2.0 * x.back() - x[x.size() - i]);

    const std::vector<double> zi = lfilter_zi(f);
    auto scaled = [&zi](double v) {
        std::vector<double> z(zi);
        for (double& s : z) s *= v;
        return z;
    };

    std::vector<double> y = lfilter(f, ext, scaled(ext.front()));
    std::reverse(y.begin(), y.end());
    y = lfilter(f, y, scaled(y.front()));
    std::reverse(y.begin(), y.end());
    return {y.begin() + static_cast<std::ptrdiff_t>(padlen),
            y.end() - static_cast<std::ptrdiff_t>(padlen)};
}

}  // namespace tsad
