#include "hardy/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hardy {

TruncatedFock::TruncatedFock(const Correspondence& e, int truncation) : requested_(truncation) {
    if (truncation < 0) throw Error(ErrorKind::InvalidSpec, "fock: truncation must be non-negative");
    const int d = e.dim();
    grades_.push_back(identity_correspondence(e.base()));
    grades_.push_back(e);
    quotients_ = {Mat::Identity(e.base().dim(), e.base().dim()), Mat::Identity(d, d)};
    lifts_ = quotients_;
    while (grades_.back().dim() > 0 && max_grade() < truncation + 1) {
        TensorProduct tp = interior_tensor(e, grades_.back());
        grades_.push_back(tp.product.corr);
        quotients_.push_back(tp.product.map.quotient);
        lifts_.push_back(tp.product.map.lift);
    }
    nilpotent_ = grades_.back().dim() == 0;
    n_ = nilpotent_ ? std::min(truncation, max_grade() - 1) : truncation;
    offsets_ = {0};
    for (int n = 0; n <= n_; ++n) offsets_.push_back(offsets_.back() + grades_[n].dim());
}

FockPtr fock_truncate(const Correspondence& e, int truncation) {
    return std::make_shared<const TruncatedFock>(e, truncation);
}

const Mat& TruncatedFock::rebracket(int k, int l) const {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto key = std::make_pair(k, l);
    auto it = rebracket_.find(key);
    if (it != rebracket_.end()) return it->second;

    const int dk = grade_dim(k), dl = grade_dim(l), dkl = k + l <= max_grade() ? grade_dim(k + l) : 0;
    Mat a;
    if (dkl == 0 || dk == 0 || dl == 0) {
        a = Mat::Zero(dkl, dk * dl);
    } else if (k == 0) {
        const auto& g = grades_[l];
        a.resize(dl, dk * dl);
        for (int u = 0; u < dk; ++u) a.middleCols(u * dl, dl) = g.left_units()[u];
    } else if (l == 0) {
        const auto& g = grades_[k];
        a.resize(dk, dk * dl);
        for (int i = 0; i < dk; ++i)
            for (int u = 0; u < dl; ++u) a.col(i * dl + u) = g.right_units()[u].col(i);
    } else if (k == 1) {
        a = quotients_[1 + l];
    } else {
        const int d1 = grade_dim(1);
        a = quotients_[k + l] * kron_identity_left(d1, rebracket(k - 1, l)) *
            kron_identity_right(lifts_[k], dl);
    }
    return rebracket_.emplace(key, std::move(a)).first->second;
}

Mat TruncatedFock::creation(int k, const Vec& xi) const {
    if (k < 0 || k > n_)
        throw Error(ErrorKind::OutOfRange,
                    "creation: degree " + std::to_string(k) + " exceeds the truncation " + std::to_string(n_));
    if (xi.size() != grade_dim(k)) throw Error(ErrorKind::DimensionMismatch, "creation: wrong coefficient size");
    Mat out = Mat::Zero(dim(), dim());
    for (int n = 0; n + k <= n_; ++n) {
        const int dn = grade_dim(n), dm = grade_dim(n + k);
        if (dn == 0 || dm == 0) continue;
        out.block(offset(n + k), offset(n), dm, dn) = rebracket(k, n) * kron(Mat(xi), Mat::Identity(dn, dn));
    }
    return out;
}

Mat TruncatedFock::left(const Mat& a) const {
    std::vector<Mat> blocks;
    for (int n = 0; n <= n_; ++n) blocks.push_back(grades_[n].left(a));
    return block_diag(blocks);
}

Mat TruncatedFock::grade_projection(int n) const {
    Mat p = Mat::Zero(dim(), dim());
    if (n >= 0 && n <= n_) p.block(offset(n), offset(n), grade_dim(n), grade_dim(n)).setIdentity();
    return p;
}

Mat TruncatedFock::gauge(double t) const {
    Vec d(dim());
    for (int n = 0; n <= n_; ++n) d.segment(offset(n), grade_dim(n)).setConstant(std::polar(1.0, n * t));
    return d.asDiagonal();
}

Mat fourier_coefficient(const TruncatedFock& f, const Mat& a, int j) {
    Mat out = Mat::Zero(f.dim(), f.dim());
    const int n = f.truncation();
    for (int k = std::max(0, -j); k <= n && k + j <= n; ++k) {
        const int r = f.grade_dim(k + j), c = f.grade_dim(k);
        out.block(f.offset(k + j), f.offset(k), r, c) = a.block(f.offset(k + j), f.offset(k), r, c);
    }
    return out;
}

Mat cesaro(const TruncatedFock& f, const Mat& a, int k) {
    Mat out = Mat::Zero(f.dim(), f.dim());
    const int n = f.truncation();
    for (int j = -std::min(k - 1, n); j <= std::min(k - 1, n); ++j)
        out += (1.0 - std::abs(j) / static_cast<double>(k)) * fourier_coefficient(f, a, j);
    return out;
}

HardyElement::HardyElement(FockPtr fock, std::vector<Vec> coefficients)
    : fock_(std::move(fock)), coeffs_(std::move(coefficients)) {
    const int n = fock_->truncation();
    if (static_cast<int>(coeffs_.size()) > n + 1) {
        for (size_t k = n + 1; k < coeffs_.size(); ++k)
            if (coeffs_[k].size() > 0 && coeffs_[k].norm() > 0.0)
                throw Error(ErrorKind::OutOfRange, "hardy element: coefficient of degree " + std::to_string(k) +
                                                       " exceeds the truncation");
        coeffs_.resize(n + 1);
    }
    while (static_cast<int>(coeffs_.size()) < n + 1) coeffs_.push_back(Vec());
    for (int k = 0; k <= n; ++k) {
        if (coeffs_[k].size() == 0) coeffs_[k] = Vec::Zero(fock_->grade_dim(k));
        if (coeffs_[k].size() != fock_->grade_dim(k))
            throw Error(ErrorKind::DimensionMismatch,
                        "hardy element: coefficient " + std::to_string(k) + " has size " +
                            std::to_string(coeffs_[k].size()) + ", grade dimension is " +
                            std::to_string(fock_->grade_dim(k)));
    }
}

HardyElement HardyElement::constant(FockPtr fock, const Mat& a) {
    Vec c = fock->base().coords(a);
    return HardyElement(std::move(fock), {c});
}

HardyElement HardyElement::monomial(FockPtr fock, int k, const Vec& xi) {
    std::vector<Vec> c(k + 1);
    c[k] = xi;
    return HardyElement(std::move(fock), c);
}

int HardyElement::degree() const {
    for (int k = static_cast<int>(coeffs_.size()) - 1; k > 0; --k)
        if (coeffs_[k].norm() > 0.0) return k;
    return 0;
}

Mat HardyElement::op() const {
    Mat out = Mat::Zero(fock_->dim(), fock_->dim());
    for (int k = 0; k < static_cast<int>(coeffs_.size()); ++k)
        if (coeffs_[k].size() > 0 && coeffs_[k].norm() > 0.0) out += fock_->creation(k, coeffs_[k]);
    return out;
}

HardyElement HardyElement::operator*(const HardyElement& o) const {
    if (fock_ != o.fock_) throw Error(ErrorKind::DimensionMismatch, "hardy product: different Fock spaces");
    const int n = fock_->truncation();
    std::vector<Vec> c(n + 1);
    for (int m = 0; m <= n; ++m) {
        c[m] = Vec::Zero(fock_->grade_dim(m));
        for (int i = 0; i <= m; ++i) {
            const Vec &x = coeffs_[i], &y = o.coeffs_[m - i];
            if (x.size() == 0 || y.size() == 0 || c[m].size() == 0) continue;
            c[m] += fock_->rebracket(i, m - i) * kron(Mat(x), Mat(y));
        }
    }
    return HardyElement(fock_, c);
}

HardyElement HardyElement::operator+(const HardyElement& o) const {
    if (fock_ != o.fock_) throw Error(ErrorKind::DimensionMismatch, "hardy sum: different Fock spaces");
    std::vector<Vec> c = coeffs_;
    for (size_t k = 0; k < c.size(); ++k) c[k] += o.coeffs_[k];
    return HardyElement(fock_, c);
}

HardyElement HardyElement::scaled(cplx s) const {
    std::vector<Vec> c = coeffs_;
    for (auto& v : c) v *= s;
    return HardyElement(fock_, c);
}

HardyNorm hardy_norm(const HardyElement& x) {
    return {op_norm(x.op()), x.nilpotent_exact()};
}

InducedFock::InducedFock(FockPtr fock, NormalRep sigma) : fock_(std::move(fock)), sigma_(std::move(sigma)) {
    for (int n = 0; n <= fock_->max_grade(); ++n) grades_.push_back(interior_tensor(fock_->grade(n), sigma_));
    offsets_ = {0};
    for (int n = 0; n <= truncation(); ++n) offsets_.push_back(offsets_.back() + grades_[n].dim());
    const auto& m = fock_->base();
    const int h = sigma_.dim();
    Mat raw(h, m.dim() * h);
    for (int u = 0; u < m.dim(); ++u) raw.middleCols(u * h, h) = sigma_.unit(u);
    unit0_ = raw * grades_[0].lift;
}

Mat InducedFock::induce(const Mat& x) const {
    const auto& f = *fock_;
    if (x.rows() != f.dim() || x.cols() != f.dim())
        throw Error(ErrorKind::DimensionMismatch, "induce: operator does not act on the truncated Fock space");
    const int h = sigma_.dim();
    Mat out = Mat::Zero(dim(), dim());
    for (int m = 0; m <= truncation(); ++m)
        for (int n = 0; n <= truncation(); ++n) {
            Mat b = x.block(f.offset(m), f.offset(n), f.grade_dim(m), f.grade_dim(n));
            if (b.size() == 0 || b.norm() == 0.0 || grade_dim(m) == 0 || grade_dim(n) == 0) continue;
            out.block(offset(m), offset(n), grade_dim(m), grade_dim(n)) =
                grades_[m].quotient * kron_identity_right(b, h) * grades_[n].lift;
        }
    return out;
}

const Mat& InducedFock::join(int k, int l) const {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto key = std::make_pair(k, l);
    auto it = join_.find(key);
    if (it != join_.end()) return it->second;
    const int dk = fock_->grade_dim(k), kl = grade_dim(l), out = k + l <= max_grade() ? grade_dim(k + l) : 0;
    Mat j;
    if (out == 0 || dk == 0 || kl == 0) {
        j = Mat::Zero(out, dk * kl);
    } else {
        j = grades_[k + l].quotient * kron_identity_right(fock_->rebracket(k, l), sigma_.dim()) *
            kron_identity_left(dk, grades_[l].lift);
    }
    return join_.emplace(key, std::move(j)).first->second;
}

const Mat& InducedFock::split(int k, int l) const {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto key = std::make_pair(k, l);
    auto it = split_.find(key);
    if (it != split_.end()) return it->second;
    Mat s = pinv(join(k, l));
    return split_.emplace(key, std::move(s)).first->second;
}

Mat InducedFock::inflate(int k, const Mat& y, int a, int b) const {
    if (y.rows() != grade_dim(b) || y.cols() != grade_dim(a))
        throw Error(ErrorKind::DimensionMismatch, "inflate: map has the wrong shape");
    const int dk = fock_->grade_dim(k);
    const int rows = k + b <= max_grade() ? grade_dim(k + b) : 0, cols = k + a <= max_grade() ? grade_dim(k + a) : 0;
    if (rows == 0 || cols == 0 || dk == 0) return Mat::Zero(rows, cols);
    return join(k, b) * kron_identity_left(dk, y) * split(k, a);
}

Mat InducedFock::psi(const Mat& eta) const {
    if (eta.rows() != grade_dim(1) || eta.cols() != sigma_.dim())
        throw Error(ErrorKind::DimensionMismatch, "psi: eta must map H to E kron_sigma H");
    Mat y = eta * unit0_;
    Mat out = Mat::Zero(dim(), dim());
    for (int n = 0; n + 1 <= truncation(); ++n) {
        if (grade_dim(n) == 0 || grade_dim(n + 1) == 0) continue;
        out.block(offset(n + 1), offset(n), grade_dim(n + 1), grade_dim(n)) = inflate(n, y, 0, 1);
    }
    return out;
}

Mat InducedFock::pi(const Mat& b) const {
    std::vector<Mat> blocks;
    for (int n = 0; n <= truncation(); ++n) blocks.push_back(grades_[n].commutant_action(b));
    return block_diag(blocks);
}

Mat InducedFock::grade_projection(int n) const {
    Mat p = Mat::Zero(dim(), dim());
    if (n >= 0 && n <= truncation()) p.block(offset(n), offset(n), grade_dim(n), grade_dim(n)).setIdentity();
    return p;
}

CommutantSetup induced_and_commutant(const NormalRep& sigma, const FockPtr& fock) {
    CommutantSetup s;
    s.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(fock->correspondence(), sigma));
    s.induced = std::make_shared<const InducedFock>(fock, sigma);
    auto dual_fock = fock_truncate(s.dual->corr, fock->truncation());
    s.dual_induced = std::make_shared<const InducedFock>(dual_fock, s.dual->comm.rep);
    const auto &ef = *s.induced, &df = *s.dual_induced;
    const int n = std::min(ef.truncation(), df.truncation());

    s.u.push_back(ef.unit0().adjoint() * df.unit0());
    for (int g = 1; g <= n; ++g) {
        const int h = df.grade_dim(g - 1);
        Mat raw(ef.grade_dim(g), s.dual->dim() * h);
        for (int i = 0; i < s.dual->dim(); ++i)
            raw.middleCols(i * h, h) = ef.inflate(g - 1, s.dual->maps[i] * ef.unit0(), 0, 1) * s.u[g - 1];
        s.u.push_back(raw * df.split(1, g - 1));
    }
    for (const auto& u : s.u) {
        if (u.rows() != u.cols()) {
            s.u_unitarity = std::numeric_limits<double>::infinity();
            return s;
        }
        Mat id = Mat::Identity(u.rows(), u.cols());
        s.u_unitarity = std::max({s.u_unitarity, (u.adjoint() * u - id).norm(), (u * u.adjoint() - id).norm()});
    }
    if (ef.truncation() == df.truncation()) {
        Mat u = s.unitary();
        for (int i = 0; i < s.dual->dim(); ++i) {
            Mat t = df.induce(dual_fock->creation(1, Vec::Unit(s.dual->dim(), i)));
            s.u_intertwining =
                std::max(s.u_intertwining, (u * t * u.adjoint() - ef.psi(s.dual->maps[i])).norm());
        }
    } else {
        s.u_intertwining = std::numeric_limits<double>::infinity();
    }
    return s;
}

namespace {

struct Graded {
    Mat op;
    int degree;
};

Mat stack_vecs(const std::vector<Mat>& ms) {
    if (ms.empty()) return Mat(0, 0);
    Mat s(ms[0].size(), static_cast<Eigen::Index>(ms.size()));
    for (size_t k = 0; k < ms.size(); ++k) s.col(static_cast<Eigen::Index>(k)) = vec(ms[k]);
    return s;
}

// Largest distance of the members of `a` from span(b), relative to their norm.
double span_excess(const std::vector<Mat>& a, const std::vector<Mat>& b) {
    if (a.empty()) return 0.0;
    Mat basis = b.empty() ? Mat(a[0].size(), 0) : range_basis(stack_vecs(b));
    double r = 0.0;
    for (const auto& x : a) {
        Vec v = vec(x);
        if (v.norm() == 0.0) continue;
        r = std::max(r, (v - basis * (basis.adjoint() * v)).norm() / v.norm());
    }
    return r;
}

// Span of the unital algebra generated by gens.
std::vector<Mat> generated_algebra(const std::vector<Mat>& gens, Eigen::Index dim) {
    std::vector<Mat> span = {Mat::Identity(dim, dim)};
    std::vector<Mat> frontier = span;
    int rank = 1;
    while (!frontier.empty()) {
        std::vector<Mat> next;
        for (const auto& f : frontier)
            for (const auto& g : gens) {
                Mat w = g * f;
                std::vector<Mat> trial = span;
                trial.push_back(w);
                int r = numerical_rank(stack_vecs(trial), 1e-9);
                if (r > rank) {
                    span.push_back(w);
                    next.push_back(w);
                    rank = r;
                }
            }
        frontier = next;
    }
    return span;
}

}  // namespace

bool CommutantReport::passed(double tol) const {
    if (generator_residual >= tol) return false;
    if (!span_checked) return true;
    return double_commutant_equal && rho_span_equal;
}

CommutantReport verify_commutant(const CommutantSetup& setup, double tol) {
    const auto& ef = *setup.induced;
    const auto& f = ef.fock();
    const auto& m = f.base();
    const auto& d = *setup.dual;
    const int n = ef.truncation();

    std::vector<Graded> lhs, rhs;
    for (int u = 0; u < m.dim(); ++u) lhs.push_back({ef.induce(f.left(m.unit(u))), 0});
    if (n >= 1)
        for (int i = 0; i < f.grade_dim(1); ++i) lhs.push_back({ef.induce(f.creation(1, Vec::Unit(f.grade_dim(1), i))), 1});
    for (int u = 0; u < d.comm.algebra.dim(); ++u) rhs.push_back({ef.pi(d.comm.rep.unit(u)), 0});
    for (int k = 0; k < d.dim(); ++k) rhs.push_back({ef.psi(d.maps[k]), 1});

    CommutantReport rep;
    for (const auto& x : lhs)
        for (const auto& y : rhs) {
            const int top = n - x.degree - y.degree;
            if (top < 0) continue;
            const int cols = ef.offset(top + 1);
            Mat c = (x.op * y.op - y.op * x.op).leftCols(cols);
            rep.generator_residual = std::max(rep.generator_residual, c.norm() / (1.0 + x.op.norm() * y.op.norm()));
            ++rep.checked_pairs;
        }

    if (!f.nilpotent()) return rep;
    rep.span_checked = true;
    const Eigen::Index dim = ef.dim();
    std::vector<Mat> a;
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i < f.grade_dim(k); ++i) a.push_back(ef.induce(f.creation(k, Vec::Unit(f.grade_dim(k), i))));
    rep.dim_algebra = numerical_rank(stack_vecs(a), 1e-9);
    std::vector<Mat> a1 = commutant_span(a, dim);
    std::vector<Mat> a2 = commutant_span(a1, dim);
    rep.dim_commutant = static_cast<int>(a1.size());
    rep.dim_double_commutant = static_cast<int>(a2.size());
    double inc = span_excess(a, a2);

    std::vector<Mat> gens;
    for (const auto& y : rhs) gens.push_back(y.op);
    std::vector<Mat> rho = generated_algebra(gens, dim);
    rep.dim_rho_span = static_cast<int>(rho.size());
    double inc2 = std::max(span_excess(rho, a1), span_excess(a1, rho));
    rep.containment_residual = std::max(inc, inc2);
    rep.double_commutant_equal = rep.dim_double_commutant == rep.dim_algebra && inc < tol;
    rep.rho_span_equal = rep.dim_rho_span == rep.dim_commutant && inc2 < tol;
    return rep;
}

}  // namespace hardy
