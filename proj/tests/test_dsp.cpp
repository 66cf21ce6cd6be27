#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tsad/dsp.hpp"
#include "tsad/rng.hpp"

using namespace tsad;

namespace {

double freq_response_mag(const FilterCoeffs& f, double omega) {
    std::complex<double> num(0.0), den(0.0);
    for (std::size_t k = 0; k < f.b.size(); ++k)
        num += f.b[k] * std::polar(1.0, -omega * static_cast<double>(k));
    for (std::size_t k = 0; k < f.a.size(); ++k)
        den += f.a[k] * std::polar(1.0, -omega * static_cast<double>(k));
    return std::abs(num / den);
}

}  // namespace

TEST_CASE("cheby1_lowpass: order-8 coefficients with exact unit DC gain") {
    const FilterCoeffs f = cheby1_lowpass(8, 0.05, 0.16);
    REQUIRE(f.b.size() == 9);
    REQUIRE(f.a.size() == 9);
    CHECK(f.a[0] == 1.0);
    double bsum = 0.0, asum = 0.0;
    for (double v : f.b) bsum += v;
    for (double v : f.a) asum += v;
    CHECK(bsum / asum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(freq_response_mag(f, 0.0) == doctest::Approx(1.0).epsilon(1e-9));

    // Passband flat to the ripple spec, stopband strongly attenuated.
    const double ripple_floor = std::pow(10.0, -0.05 / 20.0);
    CHECK(freq_response_mag(f, 0.08 * std::numbers::pi) >= ripple_floor * 0.999);
    CHECK(freq_response_mag(f, 0.9 * std::numbers::pi) < 1e-5);

    CHECK_THROWS_AS(cheby1_lowpass(0, 0.05, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(cheby1_lowpass(8, 0.05, 1.5), std::invalid_argument);
}

TEST_CASE("lfilter matches the direct difference equation") {
    const FilterCoeffs f{{0.5, 0.25}, {1.0, -0.3}};
    Rng rng(5);
    std::vector<double> x(50);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> y = lfilter(f, x, {});
    std::vector<double> expected(x.size(), 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        double acc = 0.5 * x[n];
        if (n >= 1) acc += 0.25 * x[n - 1] + 0.3 * expected[n - 1];
        expected[n] = acc;
    }
    for (std::size_t n = 0; n < x.size(); ++n)
        CHECK(y[n] == doctest::Approx(expected[n]).epsilon(1e-12));
}

TEST_CASE("lfilter_zi: step input produces a constant output immediately") {
    const FilterCoeffs f = cheby1_lowpass(8, 0.05, 0.16);
    const std::vector<double> zi = lfilter_zi(f);
    REQUIRE(zi.size() == 8);
    std::vector<double> step(64, 1.0);
    const std::vector<double> y = lfilter(f, step, zi);
    for (double v : y) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("filtfilt is zero-phase: time reversal commutes") {
    const FilterCoeffs f = cheby1_lowpass(8, 0.05, 0.16);
    Rng rng(7);
    std::vector<double> x(200);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> forward_then = filtfilt(f, x);
    std::vector<double> rev(x.rbegin(), x.rend());
    std::vector<double> reversed_then = filtfilt(f, rev);
    std::reverse(reversed_then.begin(), reversed_then.end());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(forward_then[i] == doctest::Approx(reversed_then[i]).epsilon(1e-9));
}

TEST_CASE("filtfilt passes constants exactly and rejects short inputs") {
    const FilterCoeffs f = cheby1_lowpass(8, 0.05, 0.16);
    std::vector<double> x(100, 3.25);
    const std::vector<double> y = filtfilt(f, x);
    REQUIRE(y.size() == x.size());
    for (double v : y) CHECK(std::abs(v - 3.25) < 1e-9);

    std::vector<double> tiny(filtfilt_min_length(f), 0.0);
    CHECK_THROWS_AS(filtfilt(f, tiny), std::invalid_argument);
}

TEST_CASE("filtfilt strongly attenuates tones above the cutoff") {
    const FilterCoeffs f = cheby1_lowpass(8, 0.05, 0.16);
    std::vector<double> x(4000);
    for (std::size_t t = 0; t < x.size(); ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * 0.45 * static_cast<double>(t));
    const std::vector<double> y = filtfilt(f, x);
    double in_rms = 0.0, out_rms = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        in_rms += x[t] * x[t];
        out_rms += y[t] * y[t];
    }
    in_rms = std::sqrt(in_rms / x.size());
    out_rms = std::sqrt(out_rms / x.size());
    CHECK(20.0 * std::log10(in_rms / out_rms) >= 20.0);
}
