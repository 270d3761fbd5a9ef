#include "hardy/corr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hardy {

Correspondence::Correspondence(MultiMatrixAlgebra base, int dim, std::vector<Mat> inner_units,
                               std::vector<Mat> left_units, std::vector<Mat> right_units)
    : base_(std::move(base)), dim_(dim), inner_(std::move(inner_units)), left_(std::move(left_units)),
      right_(std::move(right_units)) {
    const size_t n = static_cast<size_t>(base_.dim());
    if (inner_.size() != n || left_.size() != n || right_.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "correspondence: one matrix per matrix unit expected");
    for (size_t u = 0; u < n; ++u)
        for (const Mat* m : {&inner_[u], &left_[u], &right_[u]})
            if (m->rows() != dim_ || m->cols() != dim_)
                throw Error(ErrorKind::DimensionMismatch, "correspondence: unit matrices must be dim x dim");
}

Mat Correspondence::inner(const Vec& x, const Vec& y) const {
    Vec c(base_.dim());
    for (int u = 0; u < base_.dim(); ++u) c(u) = x.dot(inner_[u] * y);
    return base_.element(c);
}

Mat Correspondence::left(const Mat& a) const {
    Vec c = base_.coords(a);
    Mat out = Mat::Zero(dim_, dim_);
    for (int u = 0; u < base_.dim(); ++u)
        if (c(u) != cplx(0.0)) out += c(u) * left_[u];
    return out;
}

Mat Correspondence::right(const Mat& a) const {
    Vec c = base_.coords(a);
    Mat out = Mat::Zero(dim_, dim_);
    for (int u = 0; u < base_.dim(); ++u)
        if (c(u) != cplx(0.0)) out += c(u) * right_[u];
    return out;
}

Mat Correspondence::scalar_gram() const {
    Mat g = Mat::Zero(dim_, dim_);
    for (int u = 0; u < base_.dim(); ++u)
        if (base_.is_diagonal_unit(u)) g += inner_[u];
    return g;
}

QuotientCorrespondence quotient_correspondence(const MultiMatrixAlgebra& base, const std::vector<Mat>& raw_inner,
                                               const std::vector<Mat>& raw_left,
                                               const std::vector<Mat>& raw_right) {
    const Eigen::Index raw = raw_inner.empty() ? 0 : raw_inner[0].rows();
    Mat g = Mat::Zero(raw, raw);
    for (int u = 0; u < base.dim(); ++u)
        if (base.is_diagonal_unit(u)) g += raw_inner[u];
    Quotient q = gram_quotient(g);
    std::vector<Mat> in, l, r;
    for (int u = 0; u < base.dim(); ++u) {
        in.push_back(q.lift.adjoint() * raw_inner[u] * q.lift);
        l.push_back(q.quotient * raw_left[u] * q.lift);
        r.push_back(q.quotient * raw_right[u] * q.lift);
    }
    return {Correspondence(base, static_cast<int>(q.dim()), in, l, r), q};
}

namespace {

bool frobenius_orthonormal(const std::vector<Mat>& ops) {
    for (size_t k = 0; k < ops.size(); ++k)
        for (size_t l = 0; l < ops.size(); ++l) {
            cplx ip = ops[k].cwiseProduct(ops[l].conjugate()).sum();
            if (std::abs(ip - cplx(k == l ? 1.0 : 0.0)) > 1e-12) return false;
        }
    return true;
}

// Coefficients of x in a Frobenius-orthonormal family; throws if x leaves the span.
Vec expand(const std::vector<Mat>& ops, const Mat& x, const char* what) {
    Vec c(static_cast<Eigen::Index>(ops.size()));
    Mat rest = x;
    for (size_t k = 0; k < ops.size(); ++k) {
        c(static_cast<Eigen::Index>(k)) = ops[k].conjugate().cwiseProduct(x).sum();
        rest -= c(static_cast<Eigen::Index>(k)) * ops[k];
    }
    if (rest.norm() > 1e-9 * (1.0 + x.norm()))
        throw Error(ErrorKind::InvalidSpec, std::string("operator realization is not closed under ") + what);
    return c;
}

}  // namespace

RealizedCorrespondence correspondence_from_operators(const MultiMatrixAlgebra& base, const std::vector<Mat>& ops,
                                                     const std::vector<Mat>& left_units) {
    if (static_cast<int>(left_units.size()) != base.dim())
        throw Error(ErrorKind::DimensionMismatch, "realization: one left-action matrix per matrix unit expected");
    const int range = left_units.empty() ? 0 : static_cast<int>(left_units[0].rows());
    for (const auto& t : ops)
        if (t.rows() != range || t.cols() != base.side())
            throw Error(ErrorKind::DimensionMismatch, "realization: operators must map C^side to C^range");

    Realization r;
    r.range_dim = range;
    r.left_units = left_units;
    r.ops = frobenius_orthonormal(ops) ? ops : orthonormalize(ops);
    const int d = static_cast<int>(r.ops.size());

    std::vector<Mat> in(base.dim(), Mat::Zero(d, d)), l(base.dim(), Mat(d, d)), rt(base.dim(), Mat(d, d));
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            Mat p = r.ops[k].adjoint() * r.ops[j];
            if (base.off_block_norm(p) > 1e-9 * (1.0 + p.norm()))
                throw Error(ErrorKind::InvalidSpec, "realization: T^* S does not lie in the base algebra");
            Vec c = base.coords(p);
            for (int u = 0; u < base.dim(); ++u) in[u](k, j) = c(u);
        }
    for (int u = 0; u < base.dim(); ++u) {
        Mat e = base.unit(u);
        for (int j = 0; j < d; ++j) {
            l[u].col(j) = expand(r.ops, left_units[u] * r.ops[j], "the left action");
            rt[u].col(j) = expand(r.ops, r.ops[j] * e, "the right action");
        }
    }
    return {Correspondence(base, d, in, l, rt), r};
}

Realization identity_realization(const MultiMatrixAlgebra& m) {
    std::vector<Mat> units;
    for (int u = 0; u < m.dim(); ++u) units.push_back(m.unit(u));
    return {units, units, m.side()};
}

Correspondence identity_correspondence(const MultiMatrixAlgebra& m) {
    Realization r = identity_realization(m);
    return correspondence_from_operators(m, r.ops, r.left_units).corr;
}

std::vector<QuiverEdge> quiver_edges(const Eigen::MatrixXi& c) {
    if (c.rows() != c.cols() || c.rows() < 1)
        throw Error(ErrorKind::InvalidSpec, "quiver: adjacency matrix must be square and non-empty");
    std::vector<QuiverEdge> edges;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j) {
            if (c(i, j) < 0)
                throw Error(ErrorKind::InvalidSpec, "quiver: negative entry at (" + std::to_string(i) + ", " +
                                                        std::to_string(j) + ")");
            for (int k = 0; k < c(i, j); ++k) edges.push_back({i, j, k});
        }
    return edges;
}

Realization quiver_realization(const Eigen::MatrixXi& c) {
    auto edges = quiver_edges(c);
    const int n = static_cast<int>(c.rows()), ne = static_cast<int>(edges.size());
    Realization r;
    r.range_dim = ne;
    for (int e = 0; e < ne; ++e) {
        Mat t = Mat::Zero(ne, n);
        t(e, edges[e].j) = 1.0;
        r.ops.push_back(t);
    }
    for (int l = 0; l < n; ++l) {
        Mat p = Mat::Zero(ne, ne);
        for (int e = 0; e < ne; ++e)
            if (edges[e].i == l) p(e, e) = 1.0;
        r.left_units.push_back(p);
    }
    return r;
}

Correspondence correspondence_from_quiver(const Eigen::MatrixXi& c) {
    Realization r = quiver_realization(c);
    MultiMatrixAlgebra d(std::vector<int>(c.rows(), 1));
    return correspondence_from_operators(d, r.ops, r.left_units).corr;
}

int NestCorrespondence::side() const {
    int s = 0;
    for (int d : dims) s += d;
    return s;
}

Mat NestCorrespondence::projection(int j) const {
    Mat p = Mat::Zero(side(), side());
    int off = 0;
    for (int k = 0; k < j && k < static_cast<int>(dims.size()); ++k) {
        p.block(off, off, dims[k], dims[k]).setIdentity();
        off += dims[k];
    }
    return p;
}

Mat NestCorrespondence::block_projection(int k) const {
    return projection(k) - projection(k - 1);
}

NestCorrespondence correspondence_from_nest(const std::vector<int>& dims) {
    if (dims.empty()) throw Error(ErrorKind::InvalidSpec, "nest: at least one block is needed");
    MultiMatrixAlgebra d(dims);
    std::vector<Mat> ops;
    for (int k = 0; k + 1 < d.blocks(); ++k)
        for (int b = 0; b < dims[k + 1]; ++b)
            for (int a = 0; a < dims[k]; ++a) {
                Mat t = Mat::Zero(d.side(), d.side());
                t(d.offset(k) + a, d.offset(k + 1) + b) = 1.0;
                ops.push_back(t);
            }
    std::vector<Mat> psi;
    for (int u = 0; u < d.dim(); ++u) psi.push_back(d.unit(u));
    auto rc = correspondence_from_operators(d, ops, psi);
    NestCorrespondence out;
    out.corr = rc.corr;
    out.realization = rc.realization;
    out.dims = dims;
    out.trivial = dims.size() < 2;
    return out;
}

RealizedCorrespondence column_space_correspondence(int h, int n) {
    if (h < 1 || n < 0) throw Error(ErrorKind::InvalidSpec, "column space: need h >= 1 and n >= 0");
    MultiMatrixAlgebra m({h});
    std::vector<Mat> ops, psi;
    for (int l = 0; l < n; ++l)
        for (int u = 0; u < m.dim(); ++u) ops.push_back(kron(Mat(Vec::Unit(n, l)), m.unit(u)));
    for (int u = 0; u < m.dim(); ++u) psi.push_back(kron_identity_left(n, m.unit(u)));
    return correspondence_from_operators(m, ops, psi);
}

Correspondence correspondence_from_cp_map(const MultiMatrixAlgebra& m, const LinearMapOnAlgebra& p) {
    if (p.domain != m || p.codomain != m)
        throw Error(ErrorKind::DimensionMismatch, "cp map: P must map M to itself");
    if ((p.apply(m.identity()) - m.identity()).norm() > 1e-9)
        throw Error(ErrorKind::InvalidSpec, "cp map: P is not unital");
    CpCertificate cert = is_completely_positive(p);
    if (!cert.completely_positive)
        throw Error(ErrorKind::NotCompletelyPositive,
                    "cp map: Choi matrix of block " + std::to_string(cert.offending_block) +
                        " has eigenvalue " + std::to_string(cert.block_lambda_min[cert.offending_block]));
    const int dm = m.dim(), raw = dm * dm;
    std::vector<Mat> units;
    for (int u = 0; u < dm; ++u) units.push_back(m.unit(u));
    std::vector<Mat> in(dm, Mat::Zero(raw, raw));
    for (int u = 0; u < dm; ++u)
        for (int u2 = 0; u2 < dm; ++u2) {
            Mat pu = p.apply(units[u].adjoint() * units[u2]);
            if (pu.norm() == 0.0) continue;
            for (int v = 0; v < dm; ++v)
                for (int v2 = 0; v2 < dm; ++v2) {
                    Vec c = m.coords(units[v].adjoint() * pu * units[v2]);
                    for (int w = 0; w < dm; ++w) in[w](u * dm + v, u2 * dm + v2) = c(w);
                }
        }
    std::vector<Mat> l, r;
    for (int u = 0; u < dm; ++u) {
        l.push_back(kron_identity_right(m.left_multiplication(units[u]), dm));
        r.push_back(kron_identity_left(dm, m.right_multiplication(units[u])));
    }
    return quotient_correspondence(m, in, l, r).corr;
}

Mat InteriorTensor::left(const Mat& a, const MultiMatrixAlgebra& m) const {
    Vec c = m.coords(a);
    Mat out = Mat::Zero(dim(), dim());
    for (int u = 0; u < m.dim(); ++u)
        if (c(u) != cplx(0.0)) out += c(u) * left_units[u];
    return out;
}

Mat InteriorTensor::commutant_action(const Mat& b) const {
    return transport(kron_identity_left(raw_dim / std::max(h, 1), b));
}

Mat InteriorTensor::creation(const Vec& x) const {
    return quotient * kron(Mat(x), Mat::Identity(h, h));
}

InteriorTensor interior_tensor(const Correspondence& e, const NormalRep& sigma) {
    if (e.base() != sigma.source())
        throw Error(ErrorKind::DimensionMismatch, "interior tensor: algebra mismatch");
    const int d = e.dim(), h = sigma.dim();
    InteriorTensor t;
    t.raw_dim = d * h;
    t.h = h;
    Mat g = Mat::Zero(t.raw_dim, t.raw_dim);
    for (int u = 0; u < e.base().dim(); ++u) g += kron(e.inner_units()[u], sigma.unit(u));
    Quotient q = gram_quotient(g);
    t.quotient = q.quotient;
    t.lift = q.lift;
    const double scale = 1.0 + t.quotient.norm();
    for (int u = 0; u < e.base().dim(); ++u) {
        t.left_units.push_back(t.transport(kron_identity_right(e.left_units()[u], h)));
        Mat bal = kron_identity_right(e.right_units()[u], h) - kron_identity_left(d, sigma.unit(u));
        t.balance_residual = std::max(t.balance_residual, (t.quotient * bal).norm() / scale);
    }
    return t;
}

TensorProduct interior_tensor(const Correspondence& e, const Correspondence& f) {
    if (e.base() != f.base()) throw Error(ErrorKind::DimensionMismatch, "interior tensor: algebra mismatch");
    const auto& m = e.base();
    const int de = e.dim(), df = f.dim();
    std::vector<Mat> in, l, r;
    for (int v = 0; v < m.dim(); ++v) {
        Mat g = Mat::Zero(de * df, de * df);
        for (int u = 0; u < m.dim(); ++u) g += kron(e.inner_units()[u], f.inner_units()[v] * f.left_units()[u]);
        in.push_back(g);
        l.push_back(kron_identity_right(e.left_units()[v], df));
        r.push_back(kron_identity_left(de, f.right_units()[v]));
    }
    TensorProduct out{quotient_correspondence(m, in, l, r), 0.0};
    const double scale = 1.0 + out.product.map.quotient.norm();
    for (int u = 0; u < m.dim(); ++u) {
        Mat bal = kron_identity_right(e.right_units()[u], df) - kron_identity_left(de, f.left_units()[u]);
        out.balance_residual =
            std::max(out.balance_residual, (out.product.map.quotient * bal).norm() / scale);
    }
    return out;
}

Vec DualCorrespondence::coords(const Mat& eta) const {
    Vec b(dim());
    for (int k = 0; k < dim(); ++k) b(k) = vec(maps[k]).dot(vec(eta));
    return hs_gram_inverse * b;
}

Mat DualCorrespondence::map(const Vec& c) const {
    Mat out = Mat::Zero(eh.dim(), sigma.dim());
    for (int k = 0; k < dim(); ++k) out += c(k) * maps[k];
    return out;
}

double DualCorrespondence::intertwining_residual(const Mat& eta) const {
    double r = 0.0;
    for (int u = 0; u < sigma.source().dim(); ++u)
        r = std::max(r, (eta * sigma.unit(u) - eh.left_units[u] * eta).norm());
    return r;
}

DualCorrespondence dual_correspondence(const Correspondence& e, const NormalRep& sigma) {
    DualCorrespondence d;
    d.sigma = sigma;
    d.comm = commutant(sigma);
    d.eh = interior_tensor(e, sigma);
    const Eigen::Index k = d.eh.dim(), h = sigma.dim();
    const auto& m = sigma.source();

    std::vector<Mat> y;
    if (k > 0) {
        Mat sys(m.dim() * k * h, k * h);
        Mat ik = Mat::Identity(k, k), ih = Mat::Identity(h, h);
        for (int u = 0; u < m.dim(); ++u)
            sys.middleRows(u * k * h, k * h) = kron(sigma.unit(u).transpose(), ik) - kron(ih, d.eh.left_units[u]);
        Mat ns = null_space(sys);
        for (Eigen::Index c = 0; c < ns.cols(); ++c) y.push_back(unvec(ns.col(c), k, h));
    }
    const int n = static_cast<int>(y.size());
    const auto& mp = d.comm.algebra;

    // Orthonormalize for tau'(<eta, zeta>) on sigma(M)'.
    Mat g(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Vec c = d.comm.coords(y[a].adjoint() * y[b]);
            cplx s = 0.0;
            for (int u = 0; u < mp.dim(); ++u)
                if (mp.is_diagonal_unit(u)) s += c(u);
            g(a, b) = s;
        }
    Mat gis = n > 0 ? psd_inverse_sqrt(hermitian_part(g)) : Mat(0, 0);
    for (int a = 0; a < n; ++a) {
        Mat x = Mat::Zero(k, h);
        for (int b = 0; b < n; ++b) x += gis(b, a) * y[b];
        d.maps.push_back(x);
    }
    Mat hs(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) hs(a, b) = vec(d.maps[a]).dot(vec(d.maps[b]));
    d.hs_gram_inverse = n > 0 ? Mat(hs.inverse()) : Mat(0, 0);

    std::vector<Mat> in(mp.dim(), Mat(n, n)), l(mp.dim(), Mat(n, n)), r(mp.dim(), Mat(n, n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Mat p = d.maps[a].adjoint() * d.maps[b];
            d.inner_residual = std::max(d.inner_residual, d.comm.distance(p));
            Vec c = d.comm.coords(p);
            for (int u = 0; u < mp.dim(); ++u) in[u](a, b) = c(u);
        }
    for (int u = 0; u < mp.dim(); ++u) {
        const Mat& iu = d.comm.rep.unit(u);
        Mat act = d.eh.commutant_action(iu);
        for (int b = 0; b < n; ++b) {
            l[u].col(b) = d.coords(act * d.maps[b]);
            r[u].col(b) = d.coords(d.maps[b] * iu);
        }
    }
    d.corr = Correspondence(mp, n, in, l, r);
    return d;
}

DualPoint make_point(const DualCorrespondence& d, const Mat& eta, double tol) {
    if (eta.rows() != d.eh.dim() || eta.cols() != d.sigma.dim())
        throw Error(ErrorKind::DimensionMismatch, "point: expected a " + std::to_string(d.eh.dim()) + " x " +
                                                      std::to_string(d.sigma.dim()) + " map");
    double res = d.intertwining_residual(eta);
    if (res > tol * (1.0 + eta.norm()))
        throw Error(ErrorKind::InvalidSpec,
                    "point: map does not intertwine sigma (residual " + std::to_string(res) + ")");
    return {eta, op_norm(eta)};
}

DualPoint point_from_raw(const DualCorrespondence& d, const Mat& raw, double tol) {
    if (raw.rows() != d.eh.raw_dim || raw.cols() != d.sigma.dim())
        throw Error(ErrorKind::DimensionMismatch, "point: expected a " + std::to_string(d.eh.raw_dim) + " x " +
                                                      std::to_string(d.sigma.dim()) + " raw matrix");
    return make_point(d, d.eh.quotient * raw, tol);
}

Mat realization_map(const DualCorrespondence& d, const Realization& r) {
    const auto& m = d.sigma.source();
    if (d.sigma.dim() != m.side())
        throw Error(ErrorKind::InvalidSpec, "realization: sigma must be the identity representation");
    for (int u = 0; u < m.dim(); ++u)
        if ((d.sigma.unit(u) - m.unit(u)).norm() > 1e-12)
            throw Error(ErrorKind::InvalidSpec, "realization: sigma must be the identity representation");
    const int h = m.side(), ne = static_cast<int>(r.ops.size());
    if (ne * h != d.eh.raw_dim) throw Error(ErrorKind::DimensionMismatch, "realization: dimension mismatch");
    Mat raw(r.range_dim, ne * h);
    for (int i = 0; i < ne; ++i) raw.middleCols(i * h, h) = r.ops[i];
    return raw * d.eh.lift;
}

DualPoint point_from_realization(const DualCorrespondence& d, const Realization& r, const Mat& v, double tol) {
    Mat mu = realization_map(d, r);
    if (v.rows() != r.range_dim || v.cols() != d.sigma.dim())
        throw Error(ErrorKind::DimensionMismatch, "realization: v must map H to the realization range");
    return make_point(d, mu.adjoint() * v, tol);
}

bool DoubleDualReport::passed(double tol) const {
    return dim_e == dim_double_dual && mu_unitary < tol && w_isometry < tol && w_bimodule < tol &&
           w_intertwining < tol && w_rank_defect == 0.0 && commutant_residual < tol;
}

DoubleDualReport double_dual_check(const Correspondence& e, const NormalRep& sigma) {
    DualCorrespondence d1 = dual_correspondence(e, sigma);
    DualCorrespondence d2 = dual_correspondence(d1.corr, d1.comm.rep);
    DoubleDualReport rep;
    rep.dim_e = e.dim();
    rep.dim_dual = d1.dim();
    rep.dim_double_dual = d2.dim();
    const auto& m = sigma.source();
    const int h = sigma.dim();

    if (d2.comm.algebra != m) {
        rep.commutant_residual = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (int u = 0; u < m.dim(); ++u)
        rep.commutant_residual = std::max(rep.commutant_residual, (d2.comm.rep.unit(u) - sigma.unit(u)).norm());

    // mu(eta kron h) = eta h, from the quotient of E^sigma kron_iota H onto E kron_sigma H.
    Mat raw(d1.eh.dim(), d1.dim() * h);
    for (int k = 0; k < d1.dim(); ++k) raw.middleCols(k * h, h) = d1.maps[k];
    Mat mu = raw * d2.eh.lift;
    if (mu.rows() != mu.cols()) {
        rep.mu_unitary = std::numeric_limits<double>::infinity();
        return rep;
    }
    const Mat id = Mat::Identity(mu.rows(), mu.cols());
    rep.mu_unitary = std::max((mu.adjoint() * mu - id).norm(), (mu * mu.adjoint() - id).norm());

    auto w = [&](const Vec& x) -> Mat { return mu.adjoint() * d1.eh.creation(x); };
    const int de = e.dim();
    std::vector<Mat> ws;
    Mat stacked(static_cast<Eigen::Index>(d2.eh.dim()) * h, de);
    for (int i = 0; i < de; ++i) {
        ws.push_back(w(Vec::Unit(de, i)));
        stacked.col(i) = vec(ws.back());
        rep.w_intertwining = std::max(rep.w_intertwining, d2.intertwining_residual(ws.back()));
    }
    for (int i = 0; i < de; ++i)
        for (int j = 0; j < de; ++j) {
            Mat target = sigma(e.inner(Vec::Unit(de, i), Vec::Unit(de, j)));
            rep.w_isometry = std::max(rep.w_isometry, (ws[i].adjoint() * ws[j] - target).norm());
        }
    for (int u = 0; u < m.dim(); ++u) {
        Mat act = d2.eh.commutant_action(sigma.unit(u));
        for (int i = 0; i < de; ++i) {
            Vec x = Vec::Unit(de, i);
            rep.w_bimodule =
                std::max(rep.w_bimodule, (w(e.left_units()[u] * x) - act * ws[i]).norm());
            rep.w_bimodule =
                std::max(rep.w_bimodule, (w(e.right_units()[u] * x) - ws[i] * sigma.unit(u)).norm());
        }
    }
    rep.w_rank_defect = de == 0 ? 0.0 : static_cast<double>(de - numerical_rank(stacked));
    return rep;
}

}  // namespace hardy
