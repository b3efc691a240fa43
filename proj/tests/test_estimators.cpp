#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ou/estimators.hpp"
#include "ou/gauss.hpp"
#include "ou/io.hpp"
#include "reference_tables.hpp"

using namespace ou;

namespace {

constexpr double kMeanRef = 1.6728046984284292;
constexpr double kVarRef = 0.39346934028736658;

KnownContext reference_ctx() {
    KnownContext ctx;
    ctx.theta = 0.5;
    ctx.mu = -3.0;
    ctx.sigma = 1.0;
    ctx.x0 = 3.0;
    return ctx;
}

const std::vector<double>& fixture_values() {
    static io::FixtureSample fixture = io::load_observations(OUKIT_FIXTURE_PATH);
    return fixture.values;
}

ObservationSample prefix_sample(std::size_t n) {
    const std::vector<double>& z = fixture_values();
    return ObservationSample(0.5, std::vector<double>(z.begin(), z.begin() + n));
}

}  // namespace

TEST_CASE("kahan_sum keeps cancelling tails") {
    std::vector<double> xs = {1e16, 1.0, -1e16};
    CHECK(kahan_sum(xs) == 1.0);
}

TEST_CASE("observation sample validation") {
    CHECK_THROWS_AS(ObservationSample(0.0, {1.0}), ConfigError);
    CHECK_THROWS_AS(ObservationSample(0.5, {}), ConfigError);
    CHECK_THROWS_AS(ObservationSample(0.5, {1.0, std::nan("")}), ConfigError);
}

TEST_CASE("fixture ships with its known quirks") {
    const std::vector<double>& z = fixture_values();
    REQUIRE(z.size() == 100);
    CHECK(z[0] == 2.7082);
    CHECK(z[26] == 1.0774);   // k=27
    CHECK(z[87] == 0.6265);   // k=88, the inserted tail value
    CHECK(z[99] == 1.2756);
}

TEST_CASE("point estimators reproduce the reference statistics") {
    KnownContext ctx = reference_ctx();
    ObservationSample first5 = prefix_sample(5);
    ObservationSample all100 = prefix_sample(100);

    CHECK(std::abs(estimate_x0(first5, ctx) - 3.916479949) <= 1e-6);
    CHECK(std::abs(estimate_x0(all100, ctx) - 2.90958959) <= 1e-6);

    CHECK(std::abs(estimate_mu(first5, ctx) - 0.226753293) <= 1e-6);
    CHECK(std::abs(estimate_mu(all100, ctx) - (-3.318318028)) <= 1e-6);

    CHECK(std::abs(estimate_theta(first5, ctx) - 0.215705016) <= 1e-6);
    CHECK(std::abs(estimate_theta(all100, ctx) - 0.530366173) <= 1e-6);

    CHECK(std::abs(estimate_sigma_sq(first5, ctx) - 1.468059434) <= 1e-6);
    CHECK(std::abs(estimate_sigma_sq(all100, ctx) - 1.070420297) <= 1e-6);
}

TEST_CASE("every reference table row reproduces at 1e-6") {
    KnownContext ctx = reference_ctx();
    ObservationSample all100 = prefix_sample(100);
    EstimateTrace tx0 = running_trace(all100, EstimatorKind::x0, ctx);
    EstimateTrace tmu = running_trace(all100, EstimatorKind::mu, ctx);
    EstimateTrace tth = running_trace(all100, EstimatorKind::theta, ctx);
    EstimateTrace tsg = running_trace(all100, EstimatorKind::sigma_sq, ctx);
    for (std::size_t i = 0; i < reftables::kRows; ++i) {
        std::size_t n = 5 * (i + 1);
        CHECK(std::abs(tx0.values[n - 1] - reftables::kX0[i]) <= 1e-6);
        CHECK(std::abs(tmu.values[n - 1] - reftables::kMu[i]) <= 1e-6);
        CHECK(std::abs(tth.values[n - 1] - reftables::kTheta[i]) <= 1e-6);
        CHECK(std::abs(tsg.values[n - 1] - reftables::kSigmaSq[i]) <= 1e-6);
    }
}

TEST_CASE("constant sample at m_t recovers every parameter") {
    KnownContext ctx = reference_ctx();
    for (std::size_t n : {1, 7, 50}) {
        ObservationSample sample(0.5, std::vector<double>(n, kMeanRef));
        CHECK(estimate_x0(sample, ctx) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(estimate_mu(sample, ctx) == doctest::Approx(-3.0).epsilon(1e-12));
        CHECK(estimate_theta(sample, ctx) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(estimate_sigma_sq(sample, ctx) <= 1e-24);  // squared rounding residue
    }
}

TEST_CASE("estimate_x0 is affine in the sample with slope e^{theta t}") {
    KnownContext ctx = reference_ctx();
    ObservationSample base = prefix_sample(40);
    double t0 = estimate_x0(base, ctx);
    double slope = std::exp(0.5 * 0.5);
    for (double c : {0.25, -1.5, 12.0}) {
        std::vector<double> shifted = base.values;
        for (double& z : shifted) z += c;
        double t1 = estimate_x0(ObservationSample(0.5, shifted), ctx);
        CHECK(t1 - t0 == doctest::Approx(c * slope).epsilon(1e-10));
    }
}

TEST_CASE("missing context and domain failures") {
    ObservationSample sample(0.5, {1.0, 2.0});
    KnownContext empty;
    CHECK_THROWS_AS(estimate_x0(sample, empty), ConfigError);
    CHECK_THROWS_AS(estimate_mu(sample, empty), ConfigError);
    CHECK_THROWS_AS(estimate_theta(sample, empty), ConfigError);
    CHECK_THROWS_AS(estimate_sigma_sq(sample, empty), ConfigError);

    // x0 == mu is a precondition error, not an estimation failure.
    KnownContext degenerate = reference_ctx();
    degenerate.x0 = -3.0;
    CHECK_THROWS_AS(estimate_theta(sample, degenerate), ConfigError);

    // Sample mean on the wrong side of mu: typed failure carrying the ratio.
    KnownContext ctx = reference_ctx();
    ObservationSample crossed(0.5, {-5.0, -4.5});
    try {
        estimate_theta(crossed, ctx);
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(e.ratio() <= 0.0);
        CHECK(e.ratio() == doctest::Approx((-4.75 + 3.0) / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("running trace endpoint equals the point estimator bit-for-bit") {
    KnownContext ctx = reference_ctx();
    ObservationSample all100 = prefix_sample(100);
    CHECK(running_trace(all100, EstimatorKind::x0, ctx).last() ==
          estimate_x0(all100, ctx));
    CHECK(running_trace(all100, EstimatorKind::mu, ctx).last() ==
          estimate_mu(all100, ctx));
    CHECK(running_trace(all100, EstimatorKind::theta, ctx).last() ==
          estimate_theta(all100, ctx));
    CHECK(running_trace(all100, EstimatorKind::sigma_sq, ctx).last() ==
          estimate_sigma_sq(all100, ctx));
}

TEST_CASE("running trace equals per-prefix evaluation") {
    KnownContext ctx = reference_ctx();
    ObservationSample all100 = prefix_sample(100);
    EstimateTrace trace = running_trace(all100, EstimatorKind::x0, ctx);
    REQUIRE(trace.values.size() == 100);
    for (std::size_t n = 1; n <= 100; ++n) {
        CHECK(trace.values[n - 1] == estimate_x0(prefix_sample(n), ctx));
    }
}

TEST_CASE("suffix tails match a brute-force scan") {
    KnownContext ctx = reference_ctx();
    ObservationSample all100 = prefix_sample(100);
    for (EstimatorKind kind : {EstimatorKind::x0, EstimatorKind::theta}) {
        EstimateTrace trace = running_trace(all100, kind, ctx);
        std::size_t n = trace.values.size();
        for (std::size_t i = 0; i < n; ++i) {
            double lo = INFINITY, hi = -INFINITY;
            for (std::size_t j = i; j < n; ++j) {
                if (!trace.valid[j]) continue;
                lo = std::min(lo, trace.values[j]);
                hi = std::max(hi, trace.values[j]);
            }
            CHECK(trace.suffix_min[i] == lo);
            CHECK(trace.suffix_max[i] == hi);
            CHECK(trace.suffix_min[i] <= trace.suffix_max[i]);
        }
    }
}

TEST_CASE("constant trace pins both tails to the true parameter") {
    KnownContext ctx = reference_ctx();
    ObservationSample sample(0.5, std::vector<double>(20, kMeanRef));
    EstimateTrace trace = running_trace(sample, EstimatorKind::mu, ctx);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(trace.suffix_min[i] == doctest::Approx(-3.0).epsilon(1e-12));
        CHECK(trace.suffix_max[i] == doctest::Approx(-3.0).epsilon(1e-12));
    }
}

TEST_CASE("theta trace records gaps instead of values") {
    KnownContext ctx = reference_ctx();
    // First two prefixes have mean < mu-crossing, the rest recover.
    std::vector<double> zs = {-7.0, -8.0, 20.0, 1.6, 1.7, 1.8};
    EstimateTrace trace = running_trace(ObservationSample(0.5, zs),
                                        EstimatorKind::theta, ctx);
    CHECK(trace.failures >= 2);
    CHECK(!trace.valid[0]);
    CHECK(!trace.valid[1]);
    CHECK(std::isnan(trace.values[0]));
    CHECK(trace.valid[5]);
    // The running sum still includes the gap observations.
    double mean6 = kahan_sum(zs) / 6.0;
    CHECK(trace.values[5] ==
          doctest::Approx(-std::log((mean6 + 3.0) / 6.0) / 0.5).epsilon(1e-12));
}

TEST_CASE("sigma_sq is nonnegative on arbitrary samples") {
    KnownContext ctx = reference_ctx();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> z_d(-50.0, 50.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> zs(1 + rep % 17);
        for (double& z : zs) z = z_d(rng);
        CHECK(estimate_sigma_sq(ObservationSample(0.5, zs), ctx) >= 0.0);
    }
}

TEST_CASE("estimators concentrate on fresh exact samples") {
    KnownContext ctx = reference_ctx();
    OuParams p(0.5, -3.0, 1.0, 3.0);
    const std::size_t n = 10000;
    GaussianDriver driver = GaussianDriver::prng(314159);
    ObservationSample sample(0.5, cross_section(p, 0.5, n, SamplerKind::exact, driver));

    double sd_mean = std::sqrt(kVarRef / n);
    CHECK(std::abs(estimate_x0(sample, ctx) - 3.0) <=
          4.0 * std::exp(0.25) * sd_mean);
    CHECK(std::abs(estimate_mu(sample, ctx) - (-3.0)) <=
          4.0 * sd_mean / (-std::expm1(-0.25)));
    CHECK(std::abs(estimate_theta(sample, ctx) - 0.5) <=
          4.0 * sd_mean / (0.5 * (kMeanRef + 3.0)));
    CHECK(std::abs(estimate_sigma_sq(sample, ctx) - 1.0) <=
          5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("equidistribution counts") {
    std::vector<double> tiny = {0.1, 0.9};
    std::vector<double> edges = {0.0, 0.5, 1.0};
    auto bins = equidistribution_counts(tiny, edges);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].count == 1);
    CHECK(bins[1].count == 1);
    CHECK(bins[0].expected == 1.0);
    CHECK(bins[1].expected == 1.0);

    // One midpoint per bin: every deviation is exactly zero.
    std::vector<double> midpoints, tens;
    for (int i = 0; i < 10; ++i) midpoints.push_back(0.05 + i * 0.1);
    for (int i = 0; i <= 10; ++i) tens.push_back(i / 10.0);
    for (const BinCount& b : equidistribution_counts(midpoints, tens)) {
        CHECK(b.count == 1);
        // zero up to rounding of the edge differences
        CHECK(std::abs(static_cast<double>(b.count) - b.expected) <= 1e-12);
    }

    // Weyl stream over deciles, brute-force expectation n/10.
    std::vector<double> ys = weyl_uniform(1, 10000);
    std::vector<double> deciles(11);
    for (int i = 0; i <= 10; ++i) deciles[i] = i / 10.0;
    for (const BinCount& b : equidistribution_counts(ys, deciles)) {
        CHECK(std::abs(static_cast<double>(b.count) - 1000.0) <= 150.0);
        CHECK(b.expected == doctest::Approx(1000.0));
    }

    // Transported stream against Phi-quantile deciles.
    GaussianDriver w = GaussianDriver::weyl(1);
    std::vector<double> zs = gaussian_stream(w, 10000);
    std::vector<double> qedges(11);
    qedges[0] = -12.0;
    qedges[10] = 12.0;
    for (int i = 1; i < 10; ++i) qedges[i] = inv_normal_cdf(i / 10.0);
    for (const BinCount& b :
         equidistribution_counts(zs, qedges, [](double x) { return normal_cdf(x); })) {
        CHECK(std::abs(static_cast<double>(b.count) - 1000.0) <= 150.0);
        CHECK(b.expected == doctest::Approx(1000.0).epsilon(1e-6));
    }

    CHECK_THROWS_AS(equidistribution_counts({}, edges), ConfigError);
    std::vector<double> bad_edges = {0.5};
    CHECK_THROWS_AS(equidistribution_counts(tiny, bad_edges), ConfigError);
    std::vector<double> unsorted = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS(equidistribution_counts(tiny, unsorted), ConfigError);
}
