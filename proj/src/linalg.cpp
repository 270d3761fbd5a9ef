#include "hardy/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace hardy {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::NotHermitian: return "not-hermitian";
    case ErrorKind::NotFaithful: return "not-faithful";
    case ErrorKind::NotCompletelyPositive: return "not-completely-positive";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::BoundaryUndefined: return "boundary-undefined";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::OutOfRange: return "out-of-range";
    }
    return "error";
}

namespace {

RVec singular_values(const Mat& a) {
    if (a.size() == 0) return RVec();
    if (std::min(a.rows(), a.cols()) <= 16) {
        Eigen::JacobiSVD<Mat> svd(a);
        return svd.singularValues();
    }
    Eigen::BDCSVD<Mat> svd(a);
    return svd.singularValues();
}

}  // namespace

double op_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    RVec s = singular_values(a);
    return s.size() ? s(0) : 0.0;
}

Vec vec(const Mat& a) {
    return Eigen::Map<const Vec>(a.data(), a.size());
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out = Eigen::kroneckerProduct(a, b);
    return out;
}

Mat kron_identity_left(Eigen::Index n, const Mat& b) {
    Mat out = Mat::Zero(n * b.rows(), n * b.cols());
    for (Eigen::Index i = 0; i < n; ++i)
        out.block(i * b.rows(), i * b.cols(), b.rows(), b.cols()) = b;
    return out;
}

Mat kron_identity_right(const Mat& a, Eigen::Index n) {
    Mat out = Mat::Zero(a.rows() * n, a.cols() * n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != cplx(0.0))
                for (Eigen::Index k = 0; k < n; ++k) out(i * n + k, j * n + k) = a(i, j);
    return out;
}

double min_eigenvalue(const Mat& hermitian) {
    if (hermitian.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

PsdResult is_psd(const Mat& a, double tol) {
    if (a.rows() != a.cols())
        throw Error(ErrorKind::DimensionMismatch, "is_psd: matrix is not square");
    PsdResult r;
    if (a.size() == 0) return r;
    Mat h = hermitian_part(a);
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    const RVec& ev = es.eigenvalues();
    double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    double skew = anti_hermitian_norm(a);
    if (skew > tol * (1.0 + norm))
        throw Error(ErrorKind::NotHermitian,
                    "is_psd: anti-Hermitian part " + std::to_string(skew) + " exceeds tolerance");
    r.lambda_min = ev(0);
    r.psd = r.lambda_min >= -tol * (1.0 + norm);
    return r;
}

Mat null_space(const Mat& a, double rel_tol) {
    const Eigen::Index n = a.cols();
    if (n == 0) return Mat(0, 0);
    if (a.rows() == 0) return Mat::Identity(n, n);
    Mat r = a;
    if (a.rows() > n) {
        Eigen::HouseholderQR<Mat> qr(a);
        r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    }
    Mat v;
    RVec s;
    if (std::min(r.rows(), r.cols()) <= 16) {
        Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullV);
        v = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Mat> svd(r, Eigen::ComputeFullV);
        v = svd.matrixV();
        s = svd.singularValues();
    }
    // Scale floor of 1: a system that is zero up to rounding has full null space.
    const double cut = rel_tol * std::max(s.size() ? s(0) : 0.0, 1.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++rank;
    return v.rightCols(n - rank);
}

int numerical_rank(const Mat& a, double rel_tol) {
    RVec s = singular_values(a);
    const double cut = rel_tol * std::max(s.size() ? s(0) : 0.0, 1.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++rank;
    return rank;
}

Mat range_basis(const Mat& a, double rel_tol) {
    if (a.size() == 0) return Mat(a.rows(), 0);
    Mat u;
    RVec s;
    if (std::min(a.rows(), a.cols()) <= 16) {
        Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
        u = svd.matrixU();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU);
        u = svd.matrixU();
        s = svd.singularValues();
    }
    Eigen::Index rank = 0;
    if (s.size() && s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0)) ++rank;
    return u.leftCols(rank);
}

Mat pinv(const Mat& a, double rel_tol) {
    if (a.size() == 0) return Mat::Zero(a.cols(), a.rows());
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec& s = svd.singularValues();
    RVec inv = RVec::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Mat psd_sqrt(const Mat& a, double clip) {
    if (a.size() == 0) return a;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
    RVec ev = es.eigenvalues();
    double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev(i) = ev(i) <= clip * scale ? 0.0 : std::sqrt(ev(i));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Mat psd_inverse_sqrt(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
    RVec ev = es.eigenvalues();
    if (ev.size() && ev(0) <= 0.0)
        throw Error(ErrorKind::Singular, "psd_inverse_sqrt: matrix is not positive definite");
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(ev(i));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Quotient gram_quotient(const Mat& gram, double rel_tol) {
    Quotient q;
    const Eigen::Index n = gram.rows();
    if (n == 0) {
        q.quotient = Mat(0, 0);
        q.lift = Mat(0, 0);
        return q;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(gram));
    const RVec& ev = es.eigenvalues();
    double top = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
    std::vector<Eigen::Index> keep;
    // Descending order so the leading quotient direction carries the most weight.
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (top > 0.0 && ev(i) > rel_tol * top) keep.push_back(i);
    const auto r = static_cast<Eigen::Index>(keep.size());
    q.quotient = Mat(r, n);
    q.lift = Mat(n, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        double s = std::sqrt(ev(keep[k]));
        q.quotient.row(k) = s * es.eigenvectors().col(keep[k]).adjoint();
        q.lift.col(k) = es.eigenvectors().col(keep[k]) / s;
    }
    return q;
}

std::vector<Mat> orthonormalize(const std::vector<Mat>& mats, double rel_tol) {
    if (mats.empty()) return {};
    const Eigen::Index rows = mats[0].rows(), cols = mats[0].cols();
    Mat stacked(rows * cols, static_cast<Eigen::Index>(mats.size()));
    for (size_t k = 0; k < mats.size(); ++k) stacked.col(k) = vec(mats[k]);
    Mat basis = range_basis(stacked, rel_tol);
    std::vector<Mat> out;
    for (Eigen::Index k = 0; k < basis.cols(); ++k) out.push_back(unvec(basis.col(k), rows, cols));
    return out;
}

Mat block_diag(const std::vector<Mat>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    Mat out = Mat::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

}  // namespace hardy
