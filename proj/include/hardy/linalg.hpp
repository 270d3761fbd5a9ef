#ifndef HARDY_LINALG_HPP
#define HARDY_LINALG_HPP

#include <vector>

#include "hardy/types.hpp"

namespace hardy {

// Gram-quotient and rank threshold, relative to the largest singular value.
inline constexpr double kRankTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

template <class Derived>
Mat hermitian_part(const Eigen::MatrixBase<Derived>& a) {
    return (a + a.adjoint()) / 2.0;
}

template <class Derived>
double anti_hermitian_norm(const Eigen::MatrixBase<Derived>& a) {
    return ((a - a.adjoint()) / 2.0).norm();
}

double op_norm(const Mat& a);

// Column-stacking vectorization; vec(AXB) = (B^T kron A) vec(X).
Vec vec(const Mat& a);
Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols);

Mat kron(const Mat& a, const Mat& b);
Mat kron_identity_left(Eigen::Index n, const Mat& b);   // I_n kron b
Mat kron_identity_right(const Mat& a, Eigen::Index n);  // a kron I_n

struct PsdResult {
    bool psd = true;
    double lambda_min = 0.0;
};

// Symmetrizes first; throws NotHermitian when the anti-Hermitian part exceeds
// tol * (1 + ||A||). The verdict compares lambda_min with -tol * (1 + ||A||_op).
PsdResult is_psd(const Mat& a, double tol = kPsdTol);
double min_eigenvalue(const Mat& hermitian);

// Orthonormal basis of the kernel, singular values below rel_tol * s_max are null.
Mat null_space(const Mat& a, double rel_tol = kRankTol);
Mat range_basis(const Mat& a, double rel_tol = kRankTol);
int numerical_rank(const Mat& a, double rel_tol = kRankTol);
Mat pinv(const Mat& a, double rel_tol = kRankTol);

// Square root of a PSD matrix, eigenvalues below clip * ||A|| set to zero.
Mat psd_sqrt(const Mat& a, double clip = 1e-12);
Mat psd_inverse_sqrt(const Mat& a);

// Factorization of a PSD Gram matrix G = Q^* Q with Q of full row rank.
// lift is a right inverse of quotient.
struct Quotient {
    Mat quotient;
    Mat lift;
    Eigen::Index dim() const { return quotient.rows(); }
};
Quotient gram_quotient(const Mat& gram, double rel_tol = kRankTol);

// Hilbert-Schmidt orthonormal basis of span(mats).
std::vector<Mat> orthonormalize(const std::vector<Mat>& mats, double rel_tol = kRankTol);

Mat block_diag(const std::vector<Mat>& blocks);

}  // namespace hardy

#endif
