#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ou/estimators.hpp"
#include "ou/gauss.hpp"
#include "ou/model.hpp"

using namespace ou;

namespace {

OuParams reference() { return OuParams(0.5, -3.0, 1.0, 3.0); }

// High-precision oracle values (arbitrary-precision evaluation of the closed
// forms, frozen here).
constexpr double kMeanRef = 1.6728046984284292;     // 6 e^{-1/4} - 3
constexpr double kVarRef = 0.39346934028736658;     // 1 - e^{-1/2}
constexpr double kCovRef = 0.19520762379362322;     // e^{-1/8} - e^{-3/8}

struct MeanVar {
    double mean;
    double var;
};

MeanVar sample_moments(const std::vector<double>& xs) {
    double mean = kahan_sum(xs) / static_cast<double>(xs.size());
    KahanAccumulator sq;
    for (double x : xs) sq.add((x - mean) * (x - mean));
    return {mean, sq.value() / static_cast<double>(xs.size() - 1)};
}

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(OuParams(0.0, 0.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(OuParams(-1.0, 0.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(OuParams(1.0, 0.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(OuParams(1.0, 0.0, -2.0, 0.0), ConfigError);
    CHECK_THROWS_AS(OuParams(1.0, std::nan(""), 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(OuParams(1.0, 0.0, 1.0, INFINITY), ConfigError);
    CHECK_THROWS_AS(TimePoint(-0.1), ConfigError);
    CHECK_THROWS_AS(TimePoint(std::nan("")), ConfigError);
    CHECK_NOTHROW(TimePoint(0.0));
}

TEST_CASE("transition mean") {
    OuParams p = reference();
    CHECK(transition_mean(p, 0.0) == 3.0);
    CHECK(transition_mean(p, 0.5) == doctest::Approx(kMeanRef).epsilon(1e-14));
    CHECK(transition_mean(p, 200.0) == doctest::Approx(-3.0).epsilon(1e-12));

    // m_t stays between x0 and mu and is monotone toward mu.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> theta_d(0.05, 5.0), level_d(-5.0, 5.0),
        t_d(0.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        OuParams q(theta_d(rng), level_d(rng), 1.0, level_d(rng));
        double lo = std::min(q.x0, q.mu), hi = std::max(q.x0, q.mu);
        double t1 = t_d(rng), t2 = t_d(rng);
        if (t1 > t2) std::swap(t1, t2);
        double m1 = transition_mean(q, t1), m2 = transition_mean(q, t2);
        CHECK(m1 >= lo - 1e-12);
        CHECK(m1 <= hi + 1e-12);
        CHECK(std::abs(m2 - q.mu) <= std::abs(m1 - q.mu) + 1e-12);
    }
}

TEST_CASE("transition variance") {
    OuParams p = reference();
    CHECK(transition_variance(p, 0.0) == 0.0);
    CHECK(transition_variance(p, 0.5) == doctest::Approx(kVarRef).epsilon(1e-14));
    CHECK(transition_variance(p, 200.0) == doctest::Approx(1.0).epsilon(1e-12));

    // Nonnegative, nondecreasing, bounded by the stationary variance.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> theta_d(0.05, 5.0), sigma_d(0.1, 3.0),
        t_d(0.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        OuParams q(theta_d(rng), 0.0, sigma_d(rng), 0.0);
        double t1 = t_d(rng), t2 = t_d(rng);
        if (t1 > t2) std::swap(t1, t2);
        double v1 = transition_variance(q, t1), v2 = transition_variance(q, t2);
        double cap = q.sigma * q.sigma / (2.0 * q.theta);
        CHECK(v1 >= 0.0);
        CHECK(v1 <= v2 + 1e-15);
        CHECK(v2 <= cap * (1.0 + 1e-12));
    }
}

TEST_CASE("covariance") {
    OuParams p = reference();
    CHECK(covariance(p, 0.5, 0.5) == transition_variance(p, 0.5));
    CHECK(covariance(p, 0.0, 1.7) == 0.0);
    CHECK(covariance(p, 0.25, 0.5) == doctest::Approx(kCovRef).epsilon(1e-14));

    std::mt19937 rng(13);
    std::uniform_real_distribution<double> theta_d(0.05, 5.0), sigma_d(0.1, 3.0),
        t_d(0.0, 20.0);
    for (int i = 0; i < 200; ++i) {
        OuParams q(theta_d(rng), 0.0, sigma_d(rng), 0.0);
        double s = t_d(rng), t = t_d(rng);
        CHECK(covariance(q, s, t) == covariance(q, t, s));
        CHECK(covariance(q, s, t) >= 0.0);
        CHECK(covariance(q, t, t) == transition_variance(q, t));
    }
}

TEST_CASE("transition law") {
    OuParams p = reference();
    GaussianLaw law = transition_law(p, 0.5);
    CHECK(law.mean == doctest::Approx(kMeanRef).epsilon(1e-14));
    CHECK(law.variance == doctest::Approx(kVarRef).epsilon(1e-14));

    GaussianLaw at_zero = transition_law(p, 0.0);
    CHECK(at_zero.mean == 3.0);
    CHECK(at_zero.variance == 0.0);
    CHECK(at_zero.sample(1.7) == 3.0);  // point mass

    // Variance scales with sigma^2, so the small-sigma law collapses on m_t.
    OuParams tiny(0.5, -3.0, 1e-9, 3.0);
    GaussianLaw collapsed = transition_law(tiny, 0.5);
    CHECK(collapsed.mean == doctest::Approx(kMeanRef).epsilon(1e-14));
    CHECK(collapsed.variance < 1e-18);
    CHECK(collapsed.sample(3.0) == doctest::Approx(kMeanRef).epsilon(1e-9));
}

TEST_CASE("exact step") {
    OuParams p = reference();
    CHECK(exact_step(p, 3.0, 0.5, 0.0) == doctest::Approx(kMeanRef).epsilon(1e-14));
    CHECK(exact_step(p, 7.0, 500.0, 0.0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(exact_step(p, -3.0, 1.3, 0.0) == doctest::Approx(-3.0).epsilon(1e-13));

    CHECK_THROWS_AS(exact_step(p, 1.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(exact_step(p, 1.0, -1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(exact_step(p, 1.0, 0.5, std::nan("")), ConfigError);
}

TEST_CASE("exact step matches the transition law moments") {
    OuParams p = reference();
    const std::size_t m = 100000;
    GaussianDriver driver = GaussianDriver::prng(2024);
    std::vector<double> xs(m);
    for (auto& x : xs) x = exact_step(p, p.x0, 0.5, driver.next());

    MeanVar mv = sample_moments(xs);
    CHECK(std::abs(mv.mean - kMeanRef) <= 4.0 * std::sqrt(kVarRef / m));
    CHECK(std::abs(mv.var - kVarRef) <= 0.05 * kVarRef);
}

TEST_CASE("chaining two half steps gives the one-step law") {
    OuParams p = reference();
    const std::size_t m = 100000;
    const double dt = 0.25;
    GaussianDriver driver = GaussianDriver::prng(99);
    std::vector<double> chained(m), direct(m);
    for (auto& x : chained) {
        double mid = exact_step(p, p.x0, dt, driver.next());
        x = exact_step(p, mid, dt, driver.next());
    }
    for (auto& x : direct) x = exact_step(p, p.x0, 2.0 * dt, driver.next());

    double want_mean = transition_mean(p, 2.0 * dt);
    double want_var = transition_variance(p, 2.0 * dt);
    MeanVar a = sample_moments(chained), b = sample_moments(direct);
    double mean_tol = 4.0 * std::sqrt(want_var / m);
    CHECK(std::abs(a.mean - want_mean) <= mean_tol);
    CHECK(std::abs(b.mean - want_mean) <= mean_tol);
    CHECK(std::abs(a.var - want_var) <= 0.05 * want_var);
    CHECK(std::abs(b.var - want_var) <= 0.05 * want_var);
}
