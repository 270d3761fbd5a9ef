#include "hardy/eval.hpp"

#include <algorithm>
#include <string>

namespace hardy {

CovariantRep::CovariantRep(InducedPtr induced, DualPoint eta)
    : induced_(std::move(induced)), eta_(std::move(eta)), ttilde_(eta_.map.adjoint()) {
    if (eta_.map.rows() != induced_->grade_dim(1) || eta_.map.cols() != induced_->sigma().dim())
        throw Error(ErrorKind::DimensionMismatch, "covariant rep: point does not match the induced space");
}

double CovariantRep::covariance_residual() const {
    const auto& k1 = induced_->grade(1);
    double r = 0.0;
    for (int u = 0; u < static_cast<int>(k1.left_units.size()); ++u)
        r = std::max(r, (ttilde_ * k1.left_units[u] - sigma().unit(u) * ttilde_).norm());
    return r;
}

const Mat& CovariantRep::power(int n) const {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto it = powers_.find(n);
    if (it != powers_.end()) return it->second;
    if (n < 0 || n > induced_->max_grade())
        throw Error(ErrorKind::OutOfRange, "generalized power: grade " + std::to_string(n) + " unavailable");
    Mat p;
    if (n == 0)
        p = induced_->unit0();
    else if (n == 1)
        p = ttilde_;
    else
        p = ttilde_ * induced_->inflate(1, induced_->unit0().adjoint() * power(n - 1), n - 1, 0);
    return powers_.emplace(n, std::move(p)).first->second;
}

Mat CovariantRep::power_alternate(int n) const {
    if (n <= 1) return power(n);
    return power(n - 1) * induced_->inflate(n - 1, induced_->unit0().adjoint() * ttilde_, 1, 0);
}

CovariantRep covariant_from_point(const DualPoint& eta, InducedPtr induced, double tol) {
    if (eta.norm > 1.0 + tol)
        throw Error(ErrorKind::InvalidSpec, "covariant rep: ||eta|| = " + std::to_string(eta.norm) + " exceeds 1");
    return CovariantRep(std::move(induced), eta);
}

Mat generalized_power(const CovariantRep& rep, int n) {
    return rep.power(n);
}

Mat evaluate(const HardyElement& x, const CovariantRep& rep) {
    const auto& ind = rep.induced();
    if (x.fock_ptr() != ind.fock_ptr())
        throw Error(ErrorKind::DimensionMismatch, "evaluate: element and representation use different Fock spaces");
    if (rep.point().norm >= 1.0 - 1e-12 && !x.nilpotent_exact())
        throw Error(ErrorKind::BoundaryUndefined,
                    "evaluate: ||eta|| = " + std::to_string(rep.point().norm) +
                        " is on the boundary and E is not nilpotent");
    const int h = rep.sigma().dim();
    Mat out = Mat::Zero(h, h);
    for (int n = 0; n < static_cast<int>(x.coefficients().size()); ++n) {
        const Vec& c = x.coefficient(n);
        if (c.size() == 0 || c.norm() == 0.0) continue;
        out += rep.power(n) * ind.grade(n).creation(c);
    }
    return out;
}

Mat evaluate(const HardyElement& x, const DualPoint& eta, const NormalRep& sigma) {
    auto ind = std::make_shared<const InducedFock>(x.fock_ptr(), sigma);
    return evaluate(x, covariant_from_point(eta, ind));
}

CauchyTransform::CauchyTransform(std::shared_ptr<const DualCorrespondence> dual, FockPtr fock, DualPoint eta,
                                 int n_dual)
    : dual_(std::move(dual)), fock_(std::move(fock)), eta_(std::move(eta)) {
    if (eta_.norm >= 1.0)
        throw Error(ErrorKind::BoundaryUndefined, "cauchy transform: ||eta|| must be below 1");
    const auto& d = *dual_;
    dual_induced_ = std::make_shared<const InducedFock>(fock_truncate(d.corr, n_dual), d.comm.rep);
    const auto& df = *dual_induced_;
    const auto& dfock = df.fock();
    const int h = d.sigma.dim();

    Mat raw(d.eh.dim(), d.dim() * h);
    for (int k = 0; k < d.dim(); ++k) raw.middleCols(k * h, h) = d.maps[k];
    mu_ = raw * df.grade(1).lift;

    iota_h_ = Mat::Zero(df.dim(), h);
    iota_h_.topRows(df.grade_dim(0)) = df.unit0().adjoint();

    // eta^{kron n} in the dual grade bases.
    std::vector<Vec> v = {d.comm.algebra.identity_coords()};
    if (dfock.truncation() >= 1) v.push_back(d.coords(eta_.map));
    for (int n = 2; n <= dfock.truncation(); ++n) v.push_back(dfock.rebracket(1, n - 1) * kron(Mat(v[1]), Mat(v[n - 1])));
    l_eta_ = Mat::Zero(df.dim(), h);
    for (int n = 0; n <= dfock.truncation(); ++n)
        if (df.grade_dim(n) > 0) l_eta_.middleRows(df.offset(n), df.grade_dim(n)) = df.grade(n).creation(v[n]);

    const int de = fock_->grade_dim(1);
    for (int i = 0; i < de; ++i) {
        Mat y = w(Vec::Unit(de, i)) * df.unit0();
        Mat g = Mat::Zero(df.dim(), df.dim());
        for (int n = 0; n + 1 <= dfock.truncation(); ++n) {
            if (df.grade_dim(n) == 0 || df.grade_dim(n + 1) == 0) continue;
            g.block(df.offset(n + 1), df.offset(n), df.grade_dim(n + 1), df.grade_dim(n)) = df.inflate(n, y, 0, 1);
        }
        rho_gen_.push_back(g);
    }
}

Mat CauchyTransform::w(const Vec& xi) const {
    return mu_.adjoint() * dual_->eh.creation(xi);
}

const std::vector<Mat>& CauchyTransform::rho_basis(int k) const {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto it = rho_cache_.find(k);
    if (it != rho_cache_.end()) return it->second;
    std::vector<Mat> out;
    const int dk = fock_->grade_dim(k);
    if (k == 1) {
        out = rho_gen_;
    } else {
        // Basis vector b of E^k lifts to sum_{i,j} c_{ij} e_i kron f_j, so
        // rho(T_b) = sum_i rho(T_{e_i}) rho(T_{sum_j c_ij f_j}).
        const auto& prev = rho_basis(k - 1);
        const int d1 = fock_->grade_dim(1), dp = fock_->grade_dim(k - 1);
        const Mat& lift = fock_->tensor_lift(k);
        for (int b = 0; b < dk; ++b) {
            Mat acc = Mat::Zero(dual_induced_->dim(), dual_induced_->dim());
            for (int i = 0; i < d1; ++i) {
                Mat inner = Mat::Zero(acc.rows(), acc.cols());
                for (int j = 0; j < dp; ++j) {
                    cplx c = lift(i * dp + j, b);
                    if (c != cplx(0.0)) inner += c * prev[j];
                }
                acc += rho_gen_[i] * inner;
            }
            out.push_back(acc);
        }
    }
    return rho_cache_.emplace(k, std::move(out)).first->second;
}

Mat CauchyTransform::rho(const HardyElement& x) const {
    if (x.fock_ptr() != fock_) throw Error(ErrorKind::DimensionMismatch, "cauchy transform: wrong Fock space");
    const auto& df = *dual_induced_;
    Mat out = df.pi(dual_->sigma(fock_->base().element(x.coefficient(0))));
    for (int k = 1; k < static_cast<int>(x.coefficients().size()); ++k) {
        const Vec& c = x.coefficient(k);
        if (c.size() == 0 || c.norm() == 0.0) continue;
        const auto& basis = rho_basis(k);
        for (int b = 0; b < c.size(); ++b)
            if (c(b) != cplx(0.0)) out += c(b) * basis[b];
    }
    return out;
}

Mat CauchyTransform::evaluate(const HardyElement& x) const {
    return l_eta_.adjoint() * rho(x) * iota_h_;
}

double CauchyTransform::remark_residual(const HardyElement& x) const {
    const auto& df = *dual_induced_;
    const int top = df.truncation() - x.degree();
    if (top < 0) return 0.0;
    Mat lr = l_eta_.adjoint() * rho(x);
    Mat diff = lr - lr * iota_h_ * l_eta_.adjoint();
    return diff.leftCols(df.offset(top + 1)).norm();
}

Mat cauchy_evaluate(const HardyElement& x, const DualPoint& eta, const NormalRep& sigma, int n_dual) {
    auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(x.fock().correspondence(), sigma));
    CauchyTransform ct(d, x.fock_ptr(), eta, n_dual);
    return ct.evaluate(x);
}

}  // namespace hardy
