#include "ou/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ou/summation.hpp"

namespace ou {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double inv_normal_cdf(double u) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw ConfigError("inv_normal_cdf: argument must lie in (0,1)");
    }

    // Acklam's rational approximation, |relative error| < 1.15e-9.
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (u < p_low) {
        double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        double q = u - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        // log1p(-u) = log(1-u) without forming 1-u.
        double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the erfc-based CDF.
    double err = normal_cdf(x) - u;
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    if (pdf > 0.0 && err != 0.0) {
        double r = err / pdf;
        x -= r / (1.0 + 0.5 * x * r);
    }
    return x;
}

namespace {

// Prime cache shared across drivers; extended by trial division on demand.
std::uint64_t nth_prime_locked(std::uint64_t k) {
    static std::vector<std::uint64_t> primes = {2, 3, 5, 7, 11, 13};
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    while (primes.size() < k) {
        std::uint64_t candidate = primes.back() + 2;
        for (;; candidate += 2) {
            bool composite = false;
            for (std::uint64_t p : primes) {
                if (p * p > candidate) break;
                if (candidate % p == 0) {
                    composite = true;
                    break;
                }
            }
            if (!composite) break;
        }
        primes.push_back(candidate);
    }
    return primes[k - 1];
}

constexpr double kTwo52 = 4503599627370496.0;  // 2^52

double frac(double x) { return x - std::floor(x); }

}  // namespace

std::uint64_t nth_prime(std::uint64_t k) {
    if (k < 1) throw ConfigError("nth_prime: index is 1-based");
    return nth_prime_locked(k);
}

std::vector<double> weyl_uniform(std::uint64_t stream, std::size_t n) {
    if (stream < 1) throw ConfigError("weyl_uniform: stream index is 1-based");
    if (n < 1) throw ConfigError("weyl_uniform: need at least one term");
    double root = std::sqrt(static_cast<double>(nth_prime(stream)));
    if (static_cast<double>(n) > kTwo52 / root) {
        throw ConfigError("weyl_uniform: index too large, j*sqrt(p) loses fractional precision");
    }
    std::vector<double> out(n);
    for (std::size_t j = 1; j <= n; ++j) {
        out[j - 1] = frac(static_cast<double>(j) * root);
    }
    return out;
}

GaussianDriver GaussianDriver::prng(std::uint64_t seed) {
    GaussianDriver d;
    d.kind_ = Kind::prng;
    d.seed_ = seed;
    d.engine_.seed(seed);
    return d;
}

GaussianDriver GaussianDriver::weyl(std::uint64_t stream) {
    if (stream < 1) throw ConfigError("GaussianDriver: weyl stream index is 1-based");
    GaussianDriver d;
    d.kind_ = Kind::weyl;
    d.stream_ = stream;
    d.root_ = std::sqrt(static_cast<double>(nth_prime(stream)));
    d.max_cursor_ = static_cast<std::uint64_t>(kTwo52 / d.root_);
    return d;
}

double GaussianDriver::next_uniform() {
    if (kind_ == Kind::prng) {
        ++cursor_;
        // Top 53 bits to (0,1), never hitting either endpoint.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    if (cursor_ >= max_cursor_) {
        throw ConfigError("GaussianDriver: weyl stream " + std::to_string(stream_) +
                          " exhausted its 2^52 precision budget");
    }
    ++cursor_;
    return frac(static_cast<double>(cursor_) * root_);
}

double GaussianDriver::next() {
    return inv_normal_cdf(next_uniform());
}

std::vector<double> GaussianDriver::take(std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = next();
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

GaussianDriver GaussianDriver::fork(std::uint64_t index) const {
    if (kind_ == Kind::prng) {
        return prng(splitmix64(seed_ + (index + 1) * 0x9E3779B97F4A7C15ULL));
    }
    return weyl(stream_ + index);
}

std::string GaussianDriver::describe() const {
    if (kind_ == Kind::prng) return "prng:" + std::to_string(seed_);
    return "weyl:" + std::to_string(stream_);
}

std::vector<double> gaussian_stream(GaussianDriver& driver, std::size_t n) {
    return driver.take(n);
}

FourierTruncation::FourierTruncation(int terms) : n_terms(terms) {
    if (terms < 1) throw ConfigError("FourierTruncation: need at least one term");
}

double wiener_fourier(double t, std::span<const double> xi) {
    if (!(t >= 0.0) || !(t <= 1.0)) {
        throw ConfigError("wiener_fourier: t must lie in [0,1]");
    }
    if (xi.size() < 2) {
        throw ConfigError("wiener_fourier: need xi_0 plus at least one series draw");
    }
    // Smallest terms first (n descending).
    KahanAccumulator series;
    for (std::size_t n = xi.size() - 1; n >= 1; --n) {
        series.add(xi[n] * std::sin(std::numbers::pi * static_cast<double>(n) * t) /
                   (std::numbers::pi * static_cast<double>(n)));
    }
    return xi[0] * t + std::numbers::sqrt2 * series.value();
}

double wiener_scaled(double t, double c, std::span<const double> xi) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ConfigError("wiener_scaled: horizon must be positive and finite");
    }
    if (!(t >= 0.0) || t > c) {
        throw ConfigError("wiener_scaled: need 0 <= t <= c");
    }
    return std::sqrt(c) * wiener_fourier(t / c, xi);
}

double wiener_scaled(double t, double c, GaussianDriver& driver,
                     const FourierTruncation& trunc) {
    std::vector<double> xi = driver.take(static_cast<std::size_t>(trunc.n_terms) + 1);
    return wiener_scaled(t, c, xi);
}

double ou_observe(const OuParams& p, TimePoint t, std::span<const double> xi) {
    if (!(t.t > 0.0)) throw ConfigError("ou_observe: observation time must be positive");
    double tau = std::expm1(2.0 * p.theta * t.t);
    // Horizon 1 keeps the series argument at tau itself while tau <= 1; past
    // that the sqrt(c) W(t/c) scaling takes over.
    double c = std::max(1.0, tau);
    double w = wiener_scaled(tau, c, xi);
    double amp = p.sigma / std::sqrt(2.0 * p.theta) * std::exp(-p.theta * t.t);
    return transition_mean(p, t) + amp * w;
}

double ou_observe(const OuParams& p, TimePoint t, GaussianDriver& driver,
                  const FourierTruncation& trunc) {
    if (!(t.t > 0.0)) throw ConfigError("ou_observe: observation time must be positive");
    std::vector<double> xi = driver.take(static_cast<std::size_t>(trunc.n_terms) + 1);
    return ou_observe(p, t, xi);
}

const char* to_string(SamplerKind kind) noexcept {
    return kind == SamplerKind::exact ? "exact" : "fourier";
}

std::vector<double> cross_section(const OuParams& p, TimePoint t, std::size_t n,
                                  SamplerKind sampler, GaussianDriver& driver,
                                  const FourierTruncation& trunc) {
    if (!(t.t > 0.0)) throw ConfigError("cross_section: observation time must be positive");
    std::vector<double> out(n);
    if (sampler == SamplerKind::exact) {
        GaussianLaw law = transition_law(p, t);
        for (auto& z : out) z = law.sample(driver.next());
        return out;
    }
    if (driver.kind() == GaussianDriver::Kind::weyl) {
        for (std::size_t i = 0; i < n; ++i) {
            GaussianDriver per_obs = driver.fork(i);
            out[i] = ou_observe(p, t, per_obs, trunc);
        }
    } else {
        for (auto& z : out) z = ou_observe(p, t, driver, trunc);
    }
    return out;
}

TrajectoryGrid::TrajectoryGrid(std::vector<double> times_) : times(std::move(times_)) {
    if (times.empty()) throw ConfigError("TrajectoryGrid: need at least one time");
    double prev = -1.0;
    for (double t : times) {
        if (!std::isfinite(t) || t < 0.0) {
            throw ConfigError("TrajectoryGrid: times must be finite and nonnegative");
        }
        if (t <= prev) throw ConfigError("TrajectoryGrid: times must be strictly increasing");
        prev = t;
    }
}

namespace {

std::size_t stepped_points(const TrajectoryGrid& grid) {
    return grid.times.size() - (grid.times.front() == 0.0 ? 1 : 0);
}

template <typename NextDraw>
std::vector<std::pair<double, double>> trajectory_impl(const OuParams& p,
                                                       const TrajectoryGrid& grid,
                                                       NextDraw&& next_draw) {
    std::vector<std::pair<double, double>> path;
    path.reserve(grid.times.size());
    double x = p.x0;
    double prev_t = 0.0;
    for (double t : grid.times) {
        if (t > prev_t) {
            x = exact_step(p, x, t - prev_t, next_draw());
        }
        path.emplace_back(t, x);
        prev_t = t;
    }
    return path;
}

}  // namespace

std::vector<std::pair<double, double>> ou_trajectory(const OuParams& p,
                                                     const TrajectoryGrid& grid,
                                                     std::span<const double> xi) {
    if (xi.size() != stepped_points(grid)) {
        throw ConfigError("ou_trajectory: need one deviate per stepped grid point");
    }
    std::size_t i = 0;
    return trajectory_impl(p, grid, [&] { return xi[i++]; });
}

std::vector<std::pair<double, double>> ou_trajectory(const OuParams& p,
                                                     const TrajectoryGrid& grid,
                                                     GaussianDriver& driver) {
    return trajectory_impl(p, grid, [&] { return driver.next(); });
}

}  // namespace ou
