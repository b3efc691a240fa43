#pragma once

// Reference running-statistic values for the bundled 100-row observation
// sample at (theta=0.5, mu=-3, sigma=1, x0=3), t=0.5, evaluated at
// n = 5, 10, ..., 100. Reproduction tolerance is 1e-6 absolute.

#include <cstddef>

namespace reftables {

inline constexpr std::size_t kRows = 20;

inline constexpr double kX0[kRows] = {
    3.916479949, 3.171013312, 3.189798604, 3.053011377, 3.059916865,
    2.933186125, 2.98020897,  2.978720876, 3.005595171, 3.056170079,
    3.050042943, 2.999422576, 2.985749187, 2.963503799, 2.944638775,
    2.891140712, 2.951454785, 2.918940576, 2.936244133, 2.90958959};

inline constexpr double kMu[kRows] = {
    0.226753293,  -2.397894335, -2.331754861, -2.813356927, -2.789044002,
    -3.235239072, -3.06968049,  -3.074919788, -2.980300456, -2.80223573,
    -2.823808222, -3.002033002, -3.05017443,  -3.12849625,  -3.194916445,
    -3.38327305,  -3.170918559, -3.285394965, -3.224472402, -3.318318028};

inline constexpr double kTheta[kRows] = {
    0.215705016, 0.44379283,  0.437713842, 0.482407151, 0.480126781,
    0.522396228, 0.50660792,  0.507105654, 0.498135817, 0.481363743,
    0.483388203, 0.500192489, 0.504755927, 0.512202556, 0.518539409,
    0.536619648, 0.516247561, 0.527203992, 0.521365679, 0.530366173};

inline constexpr double kSigmaSq[kRows] = {
    1.468059434, 1.071475,    1.448094876, 1.168384329, 1.145106531,
    1.174454042, 1.098947717, 1.053231322, 1.074061413, 1.106961814,
    1.019738082, 1.013011822, 0.950520018, 0.979072751, 0.944824889,
    1.011196765, 1.03807104,  1.030042542, 1.088067168, 1.070420297};

}  // namespace reftables
