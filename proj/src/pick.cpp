#include "hardy/pick.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hardy {

LinearMapOnAlgebra theta_map(const DualCorrespondence& d, const Mat& eta_i, const Mat& eta_j, double* residual) {
    const auto& mp = d.comm.algebra;
    LinearMapOnAlgebra th{mp, mp, Mat(mp.dim(), mp.dim())};
    double res = 0.0;
    for (int u = 0; u < mp.dim(); ++u) {
        Mat v = eta_i.adjoint() * d.eh.commutant_action(d.comm.rep.unit(u)) * eta_j;
        res = std::max(res, d.comm.distance(v));
        th.matrix.col(u) = d.comm.coords(v);
    }
    if (residual) *residual = res;
    return th;
}

namespace {

double spectral_radius(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<Mat> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_nilpotent(const Mat& a) {
    Mat p = Mat::Identity(a.rows(), a.cols());
    const double scale = 1.0 + a.norm();
    for (Eigen::Index k = 0; k < a.rows(); ++k) p = p * a / scale;
    return p.norm() < 1e-12;
}

double lambda_of(const Mat& a) {
    return a.size() == 0 ? 0.0 : min_eigenvalue(hermitian_part(a));
}

Certificate certify(std::vector<Mat> blocks, double tol) {
    Certificate c;
    c.feasible = true;
    c.lambda_min = std::numeric_limits<double>::infinity();
    for (auto& b : blocks) {
        PsdResult r = is_psd(b, tol);
        c.block_lambda_min.push_back(r.lambda_min);
        c.lambda_min = std::min(c.lambda_min, r.lambda_min);
        c.feasible = c.feasible && r.psd;
    }
    if (blocks.empty()) c.lambda_min = 0.0;
    c.blocks = std::move(blocks);
    return c;
}

void check_disc(const std::vector<cplx>& z, const char* what) {
    for (size_t i = 0; i < z.size(); ++i)
        if (std::abs(z[i]) >= 1.0)
            throw Error(ErrorKind::InvalidSpec, std::string(what) + " " + std::to_string(i) + " is not in the open disc");
}

}  // namespace

LinearMapOnAlgebra neumann_inverse(const LinearMapOnAlgebra& theta, bool allow_nilpotent) {
    const double rho = spectral_radius(theta.matrix);
    if (rho >= 1.0 - 1e-12 && !(allow_nilpotent && is_nilpotent(theta.matrix)))
        throw Error(ErrorKind::Singular,
                    "id - theta: spectral radius " + std::to_string(rho) + " is not below 1");
    const Eigen::Index n = theta.matrix.rows();
    Mat a = Mat::Identity(n, n) - theta.matrix;
    Eigen::PartialPivLU<Mat> lu(a);
    return {theta.domain, theta.codomain, lu.solve(Mat::Identity(n, n))};
}

LinearMapOnAlgebra neumann_series(const LinearMapOnAlgebra& theta, double tol, int max_terms) {
    const Eigen::Index n = theta.matrix.rows();
    Mat sum = Mat::Identity(n, n), term = sum;
    for (int k = 0; k < max_terms && term.norm() > tol; ++k) {
        term = theta.matrix * term;
        sum += term;
    }
    return {theta.domain, theta.codomain, sum};
}

void PickProblem::validate() const {
    if (!dual) throw Error(ErrorKind::InvalidSpec, "pick problem: no dual correspondence");
    const int k = size();
    if (static_cast<int>(b.size()) != k || static_cast<int>(c.size()) != k)
        throw Error(ErrorKind::DimensionMismatch, "pick problem: need one B_i and one C_i per point");
    const int h = dual->sigma.dim();
    for (int i = 0; i < k; ++i) {
        if (points[i].map.rows() != dual->eh.dim() || points[i].map.cols() != h)
            throw Error(ErrorKind::DimensionMismatch, "pick problem: point " + std::to_string(i) + " has the wrong shape");
        if (b[i].rows() != h || b[i].cols() != h)
            throw Error(ErrorKind::DimensionMismatch, "pick problem: B_" + std::to_string(i) + " must be " +
                                                          std::to_string(h) + " x " + std::to_string(h));
        if (c[i].rows() != h || c[i].cols() != h)
            throw Error(ErrorKind::DimensionMismatch, "pick problem: C_" + std::to_string(i) + " must be " +
                                                          std::to_string(h) + " x " + std::to_string(h));
    }
}

Certificate pick_condition(const PickProblem& p, bool allow_nilpotent, double theta_scale) {
    p.validate();
    const auto& d = *p.dual;
    const int k = p.size(), h = d.sigma.dim();
    if (theta_scale >= 1.0 && !allow_nilpotent)
        for (int i = 0; i < k; ++i)
            if (p.points[i].norm >= 1.0)
                throw Error(ErrorKind::BoundaryUndefined,
                            "pick condition: point " + std::to_string(i) + " has norm " +
                                std::to_string(p.points[i].norm));

    double theta_res = 0.0, series_res = 0.0;
    std::vector<std::vector<LinearMapOnAlgebra>> t(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double r = 0.0;
            LinearMapOnAlgebra th = theta_map(d, p.points[i].map, p.points[j].map, &r);
            th = cplx(theta_scale) * th;
            theta_res = std::max(theta_res, r);
            t[i].push_back(neumann_inverse(th, allow_nilpotent));
            if (theta_scale * p.points[i].norm * p.points[j].norm <= 0.9)
                series_res = std::max(series_res, (neumann_series(th).matrix - t[i][j].matrix).norm());
        }

    const auto& mp = d.comm.algebra;
    std::vector<Mat> blocks;
    for (int blk = 0; blk < mp.blocks(); ++blk) {
        const int m = mp.block_size(blk), s = k * m;
        Mat ch(s * h, s * h);
        for (int pp = 0; pp < m; ++pp)
            for (int q = 0; q < m; ++q) {
                const int u = mp.unit_index(blk, pp, q);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) {
                        Mat ta = d.comm.element(t[i][j].matrix.col(u));
                        ch.block((i * m + pp) * h, (j * m + q) * h, h, h) =
                            p.b[i] * ta * p.b[j].adjoint() - p.c[i] * ta * p.c[j].adjoint();
                    }
            }
        blocks.push_back(ch);
    }
    Certificate cert = certify(std::move(blocks), p.psd_tol);
    cert.theta_residual = theta_res;
    cert.series_residual = series_res;
    return cert;
}

Certificate scalar_pick(const std::vector<cplx>& z, const std::vector<cplx>& w, double tol) {
    if (z.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "scalar pick: z and w differ in length");
    check_disc(z, "node");
    for (size_t i = 0; i < w.size(); ++i)
        if (std::abs(w[i]) > 1.0) throw Error(ErrorKind::InvalidSpec, "scalar pick: |w_" + std::to_string(i) + "| > 1");
    const int k = static_cast<int>(z.size());
    Mat p(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) p(i, j) = (1.0 - w[i] * std::conj(w[j])) / (1.0 - z[i] * std::conj(z[j]));
    return certify({p}, tol);
}

Certificate matrix_pick(const std::vector<cplx>& z, const std::vector<Mat>& b, const std::vector<Mat>& c, double tol) {
    check_disc(z, "node");
    const int k = static_cast<int>(z.size());
    if (static_cast<int>(b.size()) != k || static_cast<int>(c.size()) != k)
        throw Error(ErrorKind::DimensionMismatch, "matrix pick: need one B_i and C_i per node");
    const Eigen::Index h = b.empty() ? 0 : b[0].rows();
    Mat p(k * h, k * h);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            p.block(i * h, j * h, h, h) =
                (b[i] * b[j].adjoint() - c[i] * c[j].adjoint()) / (1.0 - z[i] * std::conj(z[j]));
    return certify({p}, tol);
}

Certificate ball_pick(const std::vector<Vec>& eta, const std::vector<Mat>& c, double tol) {
    const int k = static_cast<int>(eta.size());
    if (static_cast<int>(c.size()) != k) throw Error(ErrorKind::DimensionMismatch, "ball pick: need one C_i per point");
    for (int i = 0; i < k; ++i)
        if (eta[i].norm() >= 1.0)
            throw Error(ErrorKind::InvalidSpec, "ball pick: point " + std::to_string(i) + " is not in the open ball");
    const Eigen::Index h = c.empty() ? 0 : c[0].rows();
    Mat p(k * h, k * h);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            p.block(i * h, j * h, h, h) =
                (Mat::Identity(h, h) - c[i] * c[j].adjoint()) / (1.0 - eta[i].dot(eta[j]));
    return certify({p}, tol);
}

Certificate quiver_pick(const Eigen::MatrixXi& adjacency, const std::vector<Vec>& y, const std::vector<Mat>& c,
                        double tol) {
    auto edges = quiver_edges(adjacency);
    const int n = static_cast<int>(adjacency.rows()), k = static_cast<int>(y.size());
    if (static_cast<int>(c.size()) != k) throw Error(ErrorKind::DimensionMismatch, "quiver pick: need one C_i per point");
    std::vector<std::vector<Mat>> t(k, std::vector<Mat>(k));
    for (int i = 0; i < k; ++i) {
        if (y[i].size() != static_cast<Eigen::Index>(edges.size()))
            throw Error(ErrorKind::DimensionMismatch, "quiver pick: point " + std::to_string(i) + " needs one entry per edge");
        for (int j = 0; j < k; ++j) {
            Mat th = Mat::Zero(n, n);
            for (size_t e = 0; e < edges.size(); ++e)
                th(edges[e].i, edges[e].j) += std::conj(y[i](e)) * y[j](e);
            t[i][j] = (Mat::Identity(n, n) - th).inverse();
        }
    }
    std::vector<Mat> blocks;
    for (int m = 0; m < n; ++m) {
        Mat a(k * n, k * n);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                Mat tm = t[i][j].col(m).asDiagonal();
                a.block(i * n, j * n, n, n) = tm - c[i] * tm * c[j].adjoint();
            }
        blocks.push_back(a);
    }
    return certify(std::move(blocks), tol);
}

PickProblem scalar_problem(const std::vector<cplx>& z, const std::vector<cplx>& w) {
    check_disc(z, "node");
    if (z.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "scalar problem: z and w differ in length");
    MultiMatrixAlgebra c({1});
    NormalRep sigma(c, {1});
    PickProblem p;
    p.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(identity_correspondence(c), sigma));
    Mat shift = p.dual->eh.creation(Vec::Unit(1, 0));
    for (size_t i = 0; i < z.size(); ++i) {
        p.points.push_back(make_point(*p.dual, std::conj(z[i]) * shift));
        p.b.push_back(Mat::Identity(1, 1));
        p.c.push_back(Mat::Constant(1, 1, w[i]));
    }
    return p;
}

PickProblem matrix_problem(const std::vector<cplx>& z, const std::vector<Mat>& b, const std::vector<Mat>& c) {
    check_disc(z, "node");
    if (b.empty()) throw Error(ErrorKind::InvalidSpec, "matrix problem: no data");
    const int h = static_cast<int>(b[0].rows());
    MultiMatrixAlgebra m({h});
    NormalRep sigma(m, {1});
    PickProblem p;
    p.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(identity_correspondence(m), sigma));
    Realization r = identity_realization(m);
    for (size_t i = 0; i < z.size(); ++i)
        p.points.push_back(point_from_realization(*p.dual, r, std::conj(z[i]) * Mat::Identity(h, h)));
    p.b = b;
    p.c = c;
    return p;
}

PickProblem ball_problem(const std::vector<Vec>& eta, const std::vector<Mat>& c) {
    if (eta.empty() || c.empty()) throw Error(ErrorKind::InvalidSpec, "ball problem: no data");
    const int h = static_cast<int>(c[0].rows()), n = static_cast<int>(eta[0].size());
    RealizedCorrespondence col = column_space_correspondence(h, n);
    NormalRep sigma(col.corr.base(), {1});
    PickProblem p;
    p.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(col.corr, sigma));
    for (const auto& v : eta) {
        p.points.push_back(point_from_realization(*p.dual, col.realization, kron(Mat(v), Mat::Identity(h, h))));
        p.b.push_back(Mat::Identity(h, h));
    }
    p.c = c;
    return p;
}

Mat quiver_point_raw(const Eigen::MatrixXi& adjacency, const Vec& y) {
    auto edges = quiver_edges(adjacency);
    const int n = static_cast<int>(adjacency.rows()), d = static_cast<int>(edges.size());
    if (y.size() != d) throw Error(ErrorKind::DimensionMismatch, "quiver point: one coordinate per edge expected");
    Mat raw = Mat::Zero(d * n, n);
    for (int e = 0; e < d; ++e) raw(e * n + edges[e].j, edges[e].i) = y(e);
    return raw;
}

PickProblem quiver_problem(const Eigen::MatrixXi& adjacency, const std::vector<Vec>& y, const std::vector<Mat>& c) {
    Correspondence e = correspondence_from_quiver(adjacency);
    const int n = static_cast<int>(adjacency.rows());
    NormalRep sigma(e.base(), std::vector<int>(n, 1));
    PickProblem p;
    p.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
    for (const auto& v : y) {
        p.points.push_back(point_from_raw(*p.dual, quiver_point_raw(adjacency, v)));
        p.b.push_back(Mat::Identity(n, n));
    }
    p.c = c;
    return p;
}

Certificate membership_test(std::shared_ptr<const DualCorrespondence> dual, const DualPoint& eta, const Mat& c,
                            double tol) {
    PickProblem p;
    const int h = dual->sigma.dim();
    p.dual = std::move(dual);
    p.points = {eta};
    p.b = {Mat::Identity(h, h)};
    p.c = {c};
    p.psd_tol = tol;
    return pick_condition(p);
}

double SchwartzReport::min_lambda() const {
    double m = std::min(first_lambda, third_lambda);
    for (double l : chain_lambda) m = std::min(m, l);
    return m;
}

SchwartzReport schwartz_check(const HardyElement& x, std::shared_ptr<const DualCorrespondence> dual,
                              const DualPoint& eta, const Mat& a, int depth, double tol) {
    const auto& d = *dual;
    SchwartzReport rep;
    rep.norm_premise = hardy_norm(x).value <= 1.0 + tol;
    rep.vanishing_premise = x.coefficient(0).norm() <= tol;
    Mat xv = evaluate(x, eta, d.sigma);
    LinearMapOnAlgebra th = theta_map(d, eta.map, eta.map);
    auto apply = [&](const Mat& b) { return d.comm.element(th.matrix * d.comm.coords(b)); };

    Mat ta = apply(a);
    rep.premise_lambda = lambda_of(a - ta);
    rep.first_lambda = lambda_of(ta - xv * a * xv.adjoint());

    const int h = d.sigma.dim();
    auto dual_fock = fock_truncate(d.corr, depth + 1);
    std::vector<Vec> v = {d.comm.algebra.identity_coords()};
    if (dual_fock->truncation() >= 1) v.push_back(d.coords(eta.map));
    Mat ak = Mat::Identity(h, h);
    for (int k = 0; k < depth; ++k) {
        Mat next = apply(ak);
        rep.chain_lambda.push_back(lambda_of(next - xv * ak * xv.adjoint()));
        if (k + 1 <= dual_fock->truncation()) {
            if (static_cast<int>(v.size()) <= k + 1)
                v.push_back(dual_fock->rebracket(1, k) * kron(Mat(v[1]), Mat(v[k])));
            Mat ip = d.comm.element(d.comm.algebra.coords(dual_fock->grade(k + 1).inner(v[k + 1], v[k + 1])));
            rep.chain_consistency = std::max(rep.chain_consistency, (ip - next).norm());
        }
        ak = next;
    }
    rep.third_lambda = lambda_of(eta.map.adjoint() * eta.map - xv * xv.adjoint());
    return rep;
}

int Nest::side() const {
    int s = 0;
    for (int d : dims) s += d;
    return s;
}

Mat Nest::projection(int j) const {
    Mat p = Mat::Zero(side(), side());
    int off = 0;
    for (int k = 0; k < j && k < size(); ++k) {
        p.block(off, off, dims[k], dims[k]).setIdentity();
        off += dims[k];
    }
    return p;
}

Mat Nest::pattern_mask() const {
    Mat m = Mat::Zero(side(), side());
    int ro = 0;
    for (int a = 0; a < size(); ++a) {
        int co = 0;
        for (int b = 0; b < size(); ++b) {
            if (a <= b) m.block(ro, co, dims[a], dims[b]).setOnes();
            co += dims[b];
        }
        ro += dims[a];
    }
    return m;
}

bool Nest::contains_pattern(const Mat& x, double tol) const {
    Mat outside = x.cwiseProduct((Mat::Ones(side(), side()) - pattern_mask()));
    return outside.norm() <= tol * (1.0 + x.norm());
}

Nest nest_from_dims(const std::vector<int>& dims) {
    if (dims.empty()) throw Error(ErrorKind::InvalidSpec, "nest: no blocks");
    for (size_t k = 0; k < dims.size(); ++k)
        if (dims[k] < 1) throw Error(ErrorKind::InvalidSpec, "nest: block " + std::to_string(k) + " has rank < 1");
    return Nest{dims};
}

Nest nest_from_projections(const std::vector<Mat>& projections) {
    if (projections.empty()) throw Error(ErrorKind::InvalidSpec, "nest: no projections");
    const Eigen::Index d = projections[0].rows();
    std::vector<int> ranks;
    Mat prev = Mat::Zero(d, d);
    for (size_t k = 0; k < projections.size(); ++k) {
        const Mat& p = projections[k];
        if (p.rows() != d || p.cols() != d)
            throw Error(ErrorKind::DimensionMismatch, "nest: projection " + std::to_string(k) + " has the wrong size");
        if ((p * p - p).norm() > 1e-9 || (p - p.adjoint()).norm() > 1e-9)
            throw Error(ErrorKind::InvalidSpec, "nest: element " + std::to_string(k) + " is not a projection");
        if ((p * prev - prev).norm() > 1e-9)
            throw Error(ErrorKind::InvalidSpec, "nest: projections are not increasing at " + std::to_string(k));
        Mat off = p;
        off.diagonal().setZero();
        if (off.norm() > 1e-9)
            throw Error(ErrorKind::InvalidSpec, "nest: only coordinate projections are supported");
        ranks.push_back(static_cast<int>(std::lround(p.trace().real())));
        prev = p;
    }
    if (std::lround(prev.trace().real()) != d) ranks.push_back(static_cast<int>(d));
    std::vector<int> dims;
    int last = 0;
    for (int r : ranks) {
        if (r > last) dims.push_back(r - last);
        last = std::max(last, r);
    }
    // Coordinate projections must also be initial segments for the block pattern.
    for (size_t k = 0; k < projections.size(); ++k) {
        const int r = static_cast<int>(std::lround(projections[k].trace().real()));
        Vec diag = projections[k].diagonal().real().cast<cplx>();
        for (int i = 0; i < d; ++i)
            if (std::abs(diag(i) - cplx(i < r ? 1.0 : 0.0)) > 1e-9)
                throw Error(ErrorKind::InvalidSpec, "nest: projection " + std::to_string(k) +
                                                        " is not an initial coordinate segment");
    }
    return nest_from_dims(dims);
}

Certificate nest_pick_condition(const Nest& nest, const Mat& b, const Mat& c, double tol) {
    if (b.cols() != nest.side() || c.cols() != nest.side() || b.rows() != c.rows())
        throw Error(ErrorKind::DimensionMismatch, "nest pick: B and C must be r x d with d the nest side");
    std::vector<Mat> blocks;
    for (int j = 0; j <= nest.size(); ++j) {
        Mat p = nest.projection(j);
        blocks.push_back(b * p * b.adjoint() - c * p * c.adjoint());
    }
    return certify(std::move(blocks), tol);
}

Certificate nest_vector_condition(const Nest& nest, const std::vector<Vec>& u, const std::vector<Vec>& v, double tol) {
    if (u.size() != v.size() || u.empty())
        throw Error(ErrorKind::DimensionMismatch, "nest vectors: u and v must be non-empty and of equal length");
    const int d = nest.side(), k = static_cast<int>(u.size());
    Mat bu(k, d), cv(k, d);
    for (int i = 0; i < k; ++i) {
        if (u[i].size() != d || v[i].size() != d)
            throw Error(ErrorKind::DimensionMismatch, "nest vectors: vector " + std::to_string(i) + " has the wrong size");
        bu.row(i) = u[i].adjoint();
        cv.row(i) = v[i].adjoint();
    }
    std::vector<Mat> blocks;
    for (int j = 0; j <= nest.size(); ++j) {
        Mat q = Mat::Identity(d, d) - nest.projection(j);
        blocks.push_back(bu * q * bu.adjoint() - cv * q * cv.adjoint());
    }
    return certify(std::move(blocks), tol);
}

std::vector<SweepEntry> boundary_sweep(const PickProblem& p, const std::vector<double>& r_grid) {
    std::vector<SweepEntry> out;
    for (double r : r_grid) {
        if (r < 0.0 || r >= 1.0) throw Error(ErrorKind::InvalidSpec, "sweep: grid values must lie in [0, 1)");
        out.push_back({r, pick_condition(p, true, r * r)});
    }
    return out;
}

}  // namespace hardy
