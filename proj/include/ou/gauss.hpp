#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ou/model.hpp"

namespace ou {

// Standard normal CDF, Phi(x) = erfc(-x/sqrt(2))/2.
double normal_cdf(double x);

// Standard normal quantile on (0, 1). Rational initial guess refined by one
// Halley step against normal_cdf; |Phi(result) - u| <= 1e-9 everywhere (in
// practice near machine precision).
double inv_normal_cdf(double u);

// k-th prime, 1-based: nth_prime(1) == 2. Thread safe.
std::uint64_t nth_prime(std::uint64_t k);

// First n terms of the stream-k Weyl sequence frac(j sqrt(p_k)), j = 1..n.
// Rejects counts large enough that j sqrt(p_k) exceeds 2^52 and the
// fractional part drowns in rounding.
std::vector<double> weyl_uniform(std::uint64_t stream, std::size_t n);

// A deterministic source of standard-normal draws. Two arms:
//
//   prng(seed)   mt19937_64 uniforms through inv_normal_cdf
//   weyl(k)      inv_normal_cdf(frac(j sqrt(p_k))), j = cursor
//
// Equal (kind, seed/stream, cursor) always yields the same next draw. A
// driver is owned by one logical task at a time; use fork(index) to derive
// independent streams for parallel work (each index gets its own stream,
// callers partition index ranges).
class GaussianDriver {
public:
    enum class Kind { prng, weyl };

    static GaussianDriver prng(std::uint64_t seed);
    static GaussianDriver weyl(std::uint64_t stream);  // stream >= 1

    double next();

    // The uniform deviate in (0,1) behind the next draw; next() is
    // inv_normal_cdf(next_uniform()).
    double next_uniform();

    std::vector<double> take(std::size_t n);

    // Independent deterministic stream keyed by index: prng reseeds via a
    // splitmix64 mix, weyl shifts the stream index by `index`.
    GaussianDriver fork(std::uint64_t index) const;

    Kind kind() const noexcept { return kind_; }
    std::uint64_t cursor() const noexcept { return cursor_; }

    // "prng:<seed>" or "weyl:<k>"; embedded in reports.
    std::string describe() const;

private:
    GaussianDriver() = default;

    Kind kind_ = Kind::prng;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 1;
    std::uint64_t cursor_ = 0;
    std::uint64_t max_cursor_ = 0;  // weyl precision limit
    double root_ = 0.0;             // sqrt(p_stream)
    std::mt19937_64 engine_;
};

// n draws from the driver (advances it).
std::vector<double> gaussian_stream(GaussianDriver& driver, std::size_t n);

// Series cutoff for the Fourier Brownian representation.
struct FourierTruncation {
    int n_terms = 800;

    FourierTruncation() = default;
    explicit FourierTruncation(int terms);
};

// Truncated random Fourier series for Brownian motion on [0, 1]:
//
//   W_t = xi_0 t + sqrt(2) sum_{n=1..N} xi_n sin(pi n t) / (pi n)
//
// xi holds N+1 draws, xi_0 first. Deterministic and linear in xi; W_0 == 0.
double wiener_fourier(double t, std::span<const double> xi);

// Brownian motion on [0, c] via the scaling sqrt(c) W(t/c). The driver form
// consumes trunc.n_terms + 1 draws; the span form evaluates given draws.
// Requires 0 <= t <= c.
double wiener_scaled(double t, double c, std::span<const double> xi);
double wiener_scaled(double t, double c, GaussianDriver& driver,
                     const FourierTruncation& trunc);

// One observation of x_t through the Fourier route: the noise term is the
// truncated series evaluated at tau = e^{2 theta t} - 1 (horizon max(1, tau),
// so the series argument never leaves [0, 1]), scaled by
// sigma/sqrt(2 theta) e^{-theta t}. Consumes exactly n_terms + 1 draws;
// all-zero draws yield transition_mean(p, t).
double ou_observe(const OuParams& p, TimePoint t, std::span<const double> xi);
double ou_observe(const OuParams& p, TimePoint t, GaussianDriver& driver,
                  const FourierTruncation& trunc);

enum class SamplerKind { exact, fourier };

const char* to_string(SamplerKind kind) noexcept;

// n independent observations of x_t. The exact arm draws one deviate per
// observation from the transition law; the fourier arm runs ou_observe per
// observation, giving each observation its own Weyl stream (fork(i)) or the
// next n_terms + 1 prng draws.
std::vector<double> cross_section(const OuParams& p, TimePoint t, std::size_t n,
                                  SamplerKind sampler, GaussianDriver& driver,
                                  const FourierTruncation& trunc = {});

// Strictly increasing finite observation times.
struct TrajectoryGrid {
    std::vector<double> times;

    explicit TrajectoryGrid(std::vector<double> times);
};

// One sample path on the grid, distributionally exact at the grid points
// (chained exact_step; one draw per point, none for a leading t = 0). The
// span form wants exactly one deviate per stepped point.
std::vector<std::pair<double, double>> ou_trajectory(const OuParams& p,
                                                     const TrajectoryGrid& grid,
                                                     std::span<const double> xi);
std::vector<std::pair<double, double>> ou_trajectory(const OuParams& p,
                                                     const TrajectoryGrid& grid,
                                                     GaussianDriver& driver);

}  // namespace ou
