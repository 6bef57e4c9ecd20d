#pragma once

// Seeded generators for property tests: explicit piece lists that are purely
// discrete or mix intervals with isolated points, and random catalog laws.

#include <random>
#include <vector>

#include "chronoscale/catalog.hpp"
#include "chronoscale/time_scale.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// count isolated points starting at start, gaps drawn from [min_gap, max_gap].
inline std::vector<chronoscale::Piece> random_discrete(Rng& rng, int count, double start = 0.0, double min_gap = 0.05,
                                                       double max_gap = 2.0) {
    std::vector<chronoscale::Piece> out;
    double t = start;
    for (int i = 0; i < count; ++i) {
        out.push_back({t, t});
        t += uniform(rng, min_gap, max_gap);
    }
    return out;
}

/// Alternating runs: each piece is an interval with probability 1/2, else an
/// isolated point; gaps in [0.1, 1.5]. Starts at start.
inline std::vector<chronoscale::Piece> random_mixed(Rng& rng, int count, double start = 0.0) {
    std::vector<chronoscale::Piece> out;
    double t = start;
    for (int i = 0; i < count; ++i) {
        const bool dense = uniform_int(rng, 0, 1) == 1;
        const double len = dense ? uniform(rng, 0.2, 1.5) : 0.0;
        out.push_back({t, t + len});
        t += len + uniform(rng, 0.1, 1.5);
    }
    return out;
}

/// Scalar linear or logistic law with moderate coefficients.
inline chronoscale::FunctionSpec random_law(Rng& rng) {
    if (uniform_int(rng, 0, 1) == 0) {
        return chronoscale::catalog::Linear{{uniform(rng, -1.0, 1.0)}, {uniform(rng, -0.5, 0.5)}};
    }
    return chronoscale::catalog::Logistic{uniform(rng, 0.1, 1.5), uniform(rng, 2.0, 20.0)};
}

}  // namespace testsupport
