#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "policyshare/analysis.hpp"
#include "policyshare/errors.hpp"
#include "policyshare/metrics.hpp"
#include "policyshare/random.hpp"

using namespace policyshare;

namespace {

// Box-Muller on the library's portable uniform stream.
struct Gaussian {
    RandomStream rng;
    double operator()(double sigma) {
        const double u = 1.0 - rng.uniform();
        const double v = rng.uniform();
        return sigma * std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPiLocal * v);
    }
    static constexpr double kTwoPiLocal = 6.283185307179586;
};

std::vector<double> grid(double t0, double t1, double step) {
    std::vector<double> t;
    for (double x = t0; x <= t1 + 1e-9; x += step) t.push_back(x);
    return t;
}

}  // namespace

TEST_CASE("tail fit on an exact line") {
    const auto t = grid(0, 1000, 10);
    std::vector<double> d;
    for (double x : t) d.push_back(2.0 * x);
    const TailFit fit = tail_fit(t, d, 0.2);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.residual_scale == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.tail_begin == t.size() - 21);  // ceil(0.2 * 101)

    const auto report = convergence_threshold(t, d, fit, 3.0);
    CHECK(report.converged);
    CHECK(report.threshold_tick == 0);
    CHECK(report.band_entries == 1);
    CHECK_FALSE(report.ambiguous);
    CHECK(report.terminal_speed == doctest::Approx(2.0));
}

TEST_CASE("tail fit on a noisy line") {
    Gaussian g{RandomStream(5, 0)};
    const auto t = grid(0, 10000, 10);
    std::vector<double> d;
    for (double x : t) d.push_back(2.0 * x + g(0.1));
    const TailFit fit = tail_fit(t, d, 0.2);

    const std::vector<double> tw(t.begin() + static_cast<long>(fit.tail_begin), t.end());
    const std::vector<double> dw(d.begin() + static_cast<long>(fit.tail_begin), d.end());
    const auto line = oracle::ols(tw, dw);
    CHECK(fit.slope == doctest::Approx(line.slope).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(line.intercept).epsilon(1e-9));

    double sxx = 0.0, mean = 0.0;
    for (double x : tw) mean += x;
    mean /= static_cast<double>(tw.size());
    for (double x : tw) sxx += (x - mean) * (x - mean);
    const double se = 0.1 / std::sqrt(sxx);
    CHECK(std::abs(fit.slope - 2.0) <= 3.0 * se);
    CHECK(fit.residual_scale == doctest::Approx(0.1).epsilon(0.2));
}

TEST_CASE("tail fit preconditions") {
    const auto t = grid(0, 40, 1);
    std::vector<double> d(t.size(), 1.0);
    CHECK_THROWS_AS(tail_fit(t, d, 0.2), InputDomainError);  // 41 rows < 10 / 0.2
    CHECK_NOTHROW(tail_fit(grid(0, 49, 1), std::vector<double>(50, 1.0), 0.2));
    CHECK_THROWS_AS(tail_fit(std::vector<double>(60, 3.0), std::vector<double>(60, 1.0), 0.2),
                    InputDomainError);
    CHECK_THROWS_AS(tail_fit(grid(0, 99, 1), std::vector<double>(100, 1.0), 1.0), InputDomainError);
    CHECK_THROWS_AS(tail_fit(grid(0, 99, 1), std::vector<double>(99, 1.0), 0.2), InputDomainError);
}

TEST_CASE("quadratic ramp joining a line at t = 5000") {
    Gaussian g{RandomStream(9, 0)};
    const auto t = grid(0, 10000, 10);
    std::vector<double> d;
    const double c = 1e-4;
    for (double x : t) {
        const double lag = std::max(0.0, 5000.0 - x);
        d.push_back(0.5 * x - c * lag * lag + g(0.1));
    }
    const TailFit fit = tail_fit(t, d, 0.2);
    const auto r = convergence_threshold(t, d, fit, 3.0);
    CHECK(r.converged);
    CHECK(r.threshold_tick >= 4500);
    CHECK(r.threshold_tick <= 5500);
    CHECK(r.terminal_speed == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("pure quadratic never converges when it re-enters only in the tail") {
    const auto t = grid(0, 10000, 10);
    std::vector<double> d;
    for (double x : t) d.push_back(1e-4 * x * x);
    const TailFit fit = tail_fit(t, d, 0.2);
    // The fit line meets a parabola inside its own window; with a band of
    // 2 RMS residuals the curve is already outside at the window's first row.
    const auto r = convergence_threshold(t, d, fit, 2.0);
    CHECK_FALSE(r.converged);
    CHECK(r.threshold_tick >= t[fit.tail_begin]);
}

TEST_CASE("threshold properties") {
    Gaussian g{RandomStream(13, 0)};
    const auto t = grid(0, 20000, 20);
    std::vector<double> d;
    for (double x : t) {
        const double lag = std::max(0.0, 8000.0 - x);
        d.push_back(0.37 * x - 2e-5 * lag * lag + g(0.5));
    }
    const TailFit fit = tail_fit(t, d, 0.2);

    SUBCASE("a wider band never moves the threshold later") {
        std::uint64_t previous = std::numeric_limits<std::uint64_t>::max();
        for (double m : {0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 100.0}) {
            const auto r = convergence_threshold(t, d, fit, m);
            CHECK(r.threshold_tick <= previous);
            previous = r.threshold_tick;
        }
    }
    SUBCASE("shifting distances changes nothing") {
        std::vector<double> shifted;
        for (double v : d) shifted.push_back(v + 1234.5);
        const TailFit f2 = tail_fit(t, shifted, 0.2);
        CHECK(f2.slope == doctest::Approx(fit.slope).epsilon(1e-9));
        CHECK(convergence_threshold(t, shifted, f2, 3.0).threshold_tick ==
              convergence_threshold(t, d, fit, 3.0).threshold_tick);
    }
    SUBCASE("joint scaling of time and distance") {
        std::vector<double> ts, ds;
        for (double x : t) ts.push_back(4.0 * x);
        for (double v : d) ds.push_back(2.0 * v);
        const TailFit f2 = tail_fit(ts, ds, 0.2);
        CHECK(f2.slope == doctest::Approx(fit.slope * 2.0 / 4.0).epsilon(1e-9));
        CHECK(convergence_threshold(ts, ds, f2, 3.0).threshold_tick ==
              4 * convergence_threshold(t, d, fit, 3.0).threshold_tick);
    }
}

TEST_CASE("a curve that leaves and rejoins the line is flagged") {
    const auto t = grid(0, 10000, 10);
    std::vector<double> d;
    for (double x : t) {
        const double bump = (x > 3000 && x < 4000) ? 50.0 : 0.0;
        d.push_back(0.4 * x + bump);
    }
    const TailFit fit = tail_fit(t, d, 0.2);
    const auto r = convergence_threshold(t, d, fit, 3.0);
    CHECK(r.band_entries == 2);
    CHECK(r.ambiguous);
    CHECK(r.threshold_tick == 4000);
    CHECK(r.converged);
}

TEST_CASE("sharing ratio") {
    CHECK(sharing_ratio(0.4, 0.4) == 1.0);
    CHECK(sharing_ratio(1.1, 1.0) == doctest::Approx(1.1));
    CHECK_THROWS_AS(sharing_ratio(1.0, 0.0), InputDomainError);
    CHECK_THROWS_AS(sharing_ratio(1.0, -2.0), InputDomainError);
}

TEST_CASE("trend statistic") {
    const std::vector<double> xs{0, 0.25, 0.5, 1};
    CHECK(trend_stat(xs, std::vector<double>{9, 7, 4, 1}) == doctest::Approx(-1.0));
    CHECK(trend_stat(xs, std::vector<double>{1, 2, 3, 40}) == doctest::Approx(1.0));

    const std::vector<double> x6{1, 2, 3, 4, 5, 6};
    const std::vector<double> y6{3.0, 1.5, 4.0, 1.5, 9.0, 2.6};
    const double expected = oracle::pearson(oracle::brute_force_ranks(x6), oracle::brute_force_ranks(y6));
    CHECK(trend_stat(x6, y6) == doctest::Approx(expected).epsilon(1e-12));

    // Order of the points must not matter.
    const std::vector<double> xr{6, 5, 4, 3, 2, 1};
    const std::vector<double> yr{2.6, 9.0, 1.5, 4.0, 1.5, 3.0};
    CHECK(trend_stat(xr, yr) == doctest::Approx(expected).epsilon(1e-12));

    RandomStream rng(3, 0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 7; ++i) {
            x.push_back(i + rng.uniform(0.0, 0.5));
            y.push_back(std::floor(rng.uniform(0.0, 4.0)));  // plenty of ties
        }
        const auto rx = oracle::brute_force_ranks(x);
        const auto ry = oracle::brute_force_ranks(y);
        bool constant = true;
        for (double v : y) constant = constant && v == y[0];
        if (constant) continue;
        CHECK(trend_stat(x, y) == doctest::Approx(oracle::pearson(rx, ry)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(trend_stat(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InputDomainError);
    CHECK_THROWS_AS(trend_stat(std::vector<double>{1, 1, 2}, std::vector<double>{1, 2, 3}), InputDomainError);
}

TEST_CASE("metrics CSV round trip") {
    MetricsSeries s;
    s.n_sectors = 2;
    s.wide = true;
    s.rows.push_back({0, 0.0, 0.0, 0, 0, 0, 1.0, std::vector<double>(8, 0.5)});
    s.rows.push_back({1000, 123.456789012, 0.123456789012, 1500, 700, 3, 0.75,
                      {0.1, 0.9, 0.25, 0.75, 1.0 / 3.0, 2.0 / 3.0, 0.5, 0.5}});
    std::ostringstream out;
    write_metrics_csv(s, out);
    const std::string text = out.str();
    CHECK(text.rfind("tick,mean_distance,mean_velocity,events,broadcasts,assimilations,coordination,"
                     "pi_s0_a0,pi_s0_a1,pi_s1_a0",
                     0) == 0);
    CHECK(text.find("1000,123.456789,0.123456789,1500,700,3,0.75,") != std::string::npos);

    std::istringstream in(text);
    const MetricsSeries back = read_metrics_csv(in);
    CHECK(back.wide);
    CHECK(back.n_sectors == 2);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[1].tick == 1000);
    CHECK(back.rows[1].events == 1500);
    CHECK(back.rows[1].mean_distance == doctest::Approx(123.456789).epsilon(1e-9));
    CHECK(back.rows[1].mean_policy[4] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.0 / 3.0) == "0.333333333");

    std::istringstream bad_header("tick,foo\n");
    CHECK_THROWS_AS(read_metrics_csv(bad_header), InputDomainError);
    std::istringstream bad_row("tick,mean_distance,mean_velocity,events,broadcasts,assimilations,coordination\n"
                               "1,2,x,4,5,6,7\n");
    CHECK_THROWS_AS(read_metrics_csv(bad_row), InputDomainError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_metrics_csv(empty), InputDomainError);
}
