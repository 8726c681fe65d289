#pragma once
#include <ssvm/data.hpp>
#include <random>

namespace ssvm::fixtures {

/// Gaussian features, labels from a noisy linear rule so both classes appear.
inline Dataset random_dataset(Index n, Index p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix X(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) X(i, j) = normal(rng);
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Index j = 0; j < std::min<Index>(p, 3); ++j) s += X(i, j);
        y[i] = s + 0.5 * normal(rng) >= 0.0 ? 1.0 : -1.0;
    }
    y[0] = 1.0;
    if (n > 1) y[n - 1] = -1.0;
    return Dataset(std::move(X), std::move(y));
}

/// The two-point instance x = +1 (y = +1), x = -1 (y = -1).
inline Dataset symmetric_pair()
{
    Matrix X(2, 1);
    X << 1.0, -1.0;
    Vector y(2);
    y << 1.0, -1.0;
    return Dataset(std::move(X), std::move(y));
}

inline Vector random_vector(Index n, std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

}  // namespace ssvm::fixtures
