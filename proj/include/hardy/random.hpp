#ifndef HARDY_RANDOM_HPP
#define HARDY_RANDOM_HPP

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

#include "hardy/types.hpp"

namespace hardy {

using Rng = std::mt19937_64;

// HARDY_SEED when set, otherwise `fallback`.
inline std::uint64_t seed_from_env(std::uint64_t fallback) {
    if (const char* s = std::getenv("HARDY_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidSpec, std::string("HARDY_SEED is not an unsigned integer: ") + s);
        }
    }
    return fallback;
}

inline cplx random_complex(Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    return {re, n(rng)};
}

inline Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = random_complex(rng);
    return m;
}

inline Vec random_vector(Rng& rng, Eigen::Index n) { return random_matrix(rng, n, 1).col(0); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Uniform in the disc of radius r.
inline cplx random_disc(Rng& rng, double r) {
    return std::polar(r * std::sqrt(uniform(rng, 0.0, 1.0)), uniform(rng, 0.0, 6.283185307179586));
}

}  // namespace hardy

#endif
