#pragma once

#include <vector>

namespace dtids::testing {

// 29 seeded standard-normal draws (rounded to 6 decimals) plus a planted 100.
inline const std::vector<double> kPlanted{
    -0.326967, -0.974315, 0.494588,  0.42499,   -0.441219, -0.099676, -1.803692, -0.88238,
    0.216588,  0.595547,  -0.008975, -0.82275,  -0.35511,  0.525316,  -1.366707, 1.204773,
    -0.228599, -0.80503,  -1.03946,  -1.129165, 0.762975,  -1.354787, -0.842512, 0.101941,
    -1.212925, -1.155378, 1.687827,  -0.144852, -0.373649, 100.0};

}  // namespace dtids::testing
