#pragma once

#include <span>

namespace ou {

// Left-to-right compensated accumulator (Kahan with Neumaier's correction,
// which also survives a running sum that dwarfs the next term). Every sample
// sum in this project goes through it in a fixed order, so outputs are
// bit-reproducible regardless of parallelism.
struct KahanAccumulator {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double s = sum + x;
        if ((sum >= 0.0 ? sum : -sum) >= (x >= 0.0 ? x : -x)) {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }

    double value() const noexcept { return sum + comp; }
};

inline double kahan_sum(std::span<const double> xs) {
    KahanAccumulator acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace ou
