#ifndef HARDY_TESTS_SUPPORT_HPP
#define HARDY_TESTS_SUPPORT_HPP

#include <algorithm>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hardy/random.hpp"
#include "hardy/linalg.hpp"

namespace test {

using namespace hardy;

// Eigenvalues by the library-independent Eigen solver.
inline double lambda_min(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es((a + a.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double spectral_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

inline int rank_of(const Mat& a, double tol = 1e-10) {
    Eigen::FullPivLU<Mat> lu(a);
    lu.setThreshold(tol);
    return static_cast<int>(lu.rank());
}

inline Mat random_hermitian(Rng& rng, int n) {
    Mat a = random_matrix(rng, n, n);
    return (a + a.adjoint()) / 2.0;
}

inline Mat random_contraction(Rng& rng, int rows, int cols, double norm) {
    Mat a = random_matrix(rng, rows, cols);
    return a * (norm / spectral_norm(a));
}

}  // namespace test

#endif
