#ifndef CHEBPINT_TEST_UTIL_HPP
#define CHEBPINT_TEST_UTIL_HPP

#include <random>

#include "chebpint/common.hpp"

namespace chebpint::test
{

inline RMatrix random_real(int rows, int cols, std::mt19937& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    RMatrix M(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            M(r, c) = dist(rng);
    return M;
}

inline CMatrix random_complex(int rows, int cols, std::mt19937& rng)
{
    return random_real(rows, cols, rng).cast<Complex>() + kImag * random_real(rows, cols, rng).cast<Complex>();
}

// Symmetric positive definite with eigenvalues in [1, 1 + m].
inline RMatrix random_spd(int m, std::mt19937& rng)
{
    const RMatrix G = random_real(m, m, rng);
    return G * G.transpose() + RMatrix::Identity(m, m);
}

inline double rel_diff(const CMatrix& a, const CMatrix& b)
{
    return (a - b).norm() / b.norm();
}

} // namespace chebpint::test

#endif // CHEBPINT_TEST_UTIL_HPP
