#include "hardy/dilate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hardy {

Defects defect_operators(const CovariantRep& rep, double tol) {
    const Mat& t = rep.ttilde();
    const double nt = op_norm(t);
    if (nt > 1.0 + tol)
        throw Error(ErrorKind::InvalidSpec, "defect operators: ||T~|| = " + std::to_string(nt) + " exceeds 1");
    Defects d;
    const Eigen::Index n = t.cols(), h = t.rows();
    d.delta = psd_sqrt(hermitian_part(Mat(Mat::Identity(n, n) - t.adjoint() * t)));
    d.delta_star = psd_sqrt(hermitian_part(Mat(Mat::Identity(h, h) - t * t.adjoint())));
    d.d_basis = d.delta.norm() < 1e-12 ? Mat(n, 0) : range_basis(d.delta);
    for (const auto& l : rep.induced().grade(1).left_units)
        d.commutation_residual = std::max(d.commutation_residual, (d.delta * l - l * d.delta).norm());
    return d;
}

Mat Dilation::column_projection(int m) const {
    Mat p = Mat::Zero(dim(), dim());
    const int b = m - 1;
    if (b >= 0 && b < static_cast<int>(block_dims.size()))
        p.block(block_offsets[b], block_offsets[b], block_dims[b], block_dims[b]).setIdentity();
    return p;
}

namespace {

// Words over {0..d-1} of length n in lexicographic order, at most `limit` of them.
std::vector<std::vector<int>> words(int d, int n, int limit) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(n, 0);
    while (static_cast<int>(out.size()) < limit) {
        out.push_back(w);
        int pos = n - 1;
        while (pos >= 0 && ++w[pos] == d) w[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

}  // namespace

Dilation minimal_isometric_dilation(const CovariantRep& rep, int n, double tol) {
    if (n < 0) throw Error(ErrorKind::InvalidSpec, "dilation: negative truncation");
    const Correspondence& e = rep.induced().fock().correspondence();
    const MultiMatrixAlgebra& m = e.base();
    const InteriorTensor& k1 = rep.induced().grade(1);
    const int de = e.dim();

    Dilation dil;
    dil.truncation = n;
    dil.ttilde = rep.ttilde();
    dil.h = rep.sigma().dim();
    dil.defects = defect_operators(rep, tol);
    const Mat& r = dil.defects.d_basis;
    const int rd = static_cast<int>(r.cols());

    FockPtr fock = fock_truncate(e, n);
    InducedPtr dfock;
    dil.block_dims = {dil.h};
    std::vector<std::vector<Mat>> unit_blocks(m.dim());
    for (int u = 0; u < m.dim(); ++u) unit_blocks[u].push_back(rep.sigma().unit(u));
    if (rd > 0) {
        std::vector<Mat> s1;
        for (int u = 0; u < m.dim(); ++u) s1.push_back(r.adjoint() * k1.left_units[u] * r);
        NormalRep sigma1 = NormalRep::from_action(m, s1, 1e-8);
        dfock = std::make_shared<const InducedFock>(fock, sigma1);
        dil.block_dims.push_back(rd);
        for (int u = 0; u < m.dim(); ++u) unit_blocks[u].push_back(sigma1.unit(u));
        for (int g = 1; g <= n; ++g) {
            dil.block_dims.push_back(dfock->grade_dim(g));
            for (int u = 0; u < m.dim(); ++u)
                unit_blocks[u].push_back(g <= dfock->max_grade() ? dfock->grade(g).left_units[u] : Mat(0, 0));
        }
    }
    dil.block_offsets = {0};
    for (int b : dil.block_dims) dil.block_offsets.push_back(dil.block_offsets.back() + b);
    const int kd = dil.dim();

    std::vector<Mat> rho_units;
    for (auto& blocks : unit_blocks) rho_units.push_back(block_diag(blocks));
    dil.rho = NormalRep::from_action(m, rho_units, 1e-8);
    dil.ek = interior_tensor(e, dil.rho);
    const InteriorTensor& x = dil.ek;

    // Vtilde on raw E kron K, column i * dim K + alpha.
    Mat top(kd, k1.dim());
    top.setZero();
    top.topRows(dil.h) = dil.ttilde;
    if (rd > 0) top.middleRows(dil.h, rd) = r.adjoint() * dil.defects.delta;
    Mat raw = Mat::Zero(kd, static_cast<Eigen::Index>(de) * kd);
    for (int i = 0; i < de; ++i) {
        for (int a = 0; a < dil.h; ++a) raw.col(i * kd + a) = top * k1.quotient.col(i * dil.h + a);
        if (rd == 0) continue;
        for (int g = 0; g < n; ++g) {
            const int src = dil.block_dims[g + 1], dst = dil.block_dims[g + 2];
            if (src == 0 || dst == 0) continue;
            const Mat& ident = g == 0 ? dfock->grade(1).quotient : dfock->join(1, g);
            for (int a = 0; a < src; ++a)
                raw.block(dil.block_offsets[g + 2], i * kd + dil.block_offsets[g + 1] + a, dst, 1) =
                    ident.col(i * src + a);
        }
    }
    dil.vtilde = raw * x.lift;
    dil.balance_residual = (raw - dil.vtilde * x.quotient).norm();

    // Isometry away from the top grade, whose image leaves the truncation.
    Mat valid = Mat::Identity(kd, kd);
    if (rd > 0) {
        const int top_block = static_cast<int>(dil.block_dims.size()) - 1;
        valid.block(dil.block_offsets[top_block], dil.block_offsets[top_block], dil.block_dims[top_block],
                    dil.block_dims[top_block])
            .setZero();
    }
    const Mat pv = x.commutant_action(valid);
    const Mat gram = dil.vtilde.adjoint() * dil.vtilde;
    dil.isometry_residual = (pv * (gram - Mat::Identity(gram.rows(), gram.cols())) * pv).norm();

    // E kron_sigma H sits inside E kron_rho K.
    Mat incl = Mat::Zero(kd, dil.h);
    incl.topRows(dil.h).setIdentity();
    const Mat j1 = x.quotient * kron_identity_left(de, incl) * k1.lift;
    dil.compression_residual = (dil.vtilde.topRows(dil.h) * j1 - dil.ttilde).norm();

    std::vector<Mat> vgen, tgen;
    for (int i = 0; i < de; ++i) {
        vgen.push_back(dil.vtilde * x.creation(Vec::Unit(de, i)));
        tgen.push_back(dil.ttilde * k1.creation(Vec::Unit(de, i)));
    }
    for (int len = 1; len <= n && de > 0; ++len)
        for (const auto& w : words(de, len, 256)) {
            // only the H columns are needed: apply the generators right to left
            Mat vw = Mat::Identity(kd, dil.h), tw = Mat::Identity(dil.h, dil.h);
            for (auto it = w.rbegin(); it != w.rend(); ++it) {
                vw = vgen[*it] * vw;
                tw = tgen[*it] * tw;
            }
            dil.dilation_residual = std::max(dil.dilation_residual, (vw.topRows(dil.h) - tw).norm());
        }

    // F(E) kron_rho K grows like dim K * dim E^n, so the cross-check stays small.
    if (kd <= kPowerRouteMaxDim && n >= 2) {
        dil.induced = std::make_shared<const InducedFock>(fock_truncate(e, 2), dil.rho);
        dil.v = std::make_shared<const CovariantRep>(dil.induced, DualPoint{dil.vtilde.adjoint(), op_norm(dil.vtilde)});
        if (dil.induced->max_grade() >= 2) dil.power_route_gap = (dil.v->power(2) - dil.v->power_alternate(2)).norm();
        dil.power_route_checked = true;
    }

    dil.coisometric = (dil.ttilde * dil.ttilde.adjoint() - Mat::Identity(dil.h, dil.h)).norm() < tol;
    if (dil.coisometric)
        dil.coisometry_residual = (dil.vtilde * dil.vtilde.adjoint() - Mat::Identity(kd, kd)).norm();
    return dil;
}

CncReport cnc_classify(const CovariantRep& rep, int n, double tol) {
    CncReport out;
    const InducedFock& ind = rep.induced();
    out.degree = std::min(n, ind.max_grade());
    out.exact = ind.fock().nilpotent();
    const Defects d = defect_operators(rep, tol);
    const int h = rep.sigma().dim();

    const Mat y = ind.unit0().adjoint() * d.delta_star * ind.unit0();
    std::vector<Mat> rows;
    Eigen::Index total = 0;
    for (int g = 0; g <= out.degree; ++g) {
        if (ind.grade_dim(g) == 0) continue;
        rows.push_back(ind.inflate(g, y, 0, 0) * rep.power(g).adjoint());
        total += rows.back().rows();
    }
    Mat stack(total, h);
    Eigen::Index off = 0;
    for (const auto& r : rows) {
        stack.middleRows(off, r.rows()) = r;
        off += r.rows();
    }
    out.h1 = stack.norm() < 1e-14 ? Mat(Mat::Identity(h, h)) : null_space(stack);
    out.is_cnc = out.h1.cols() == 0;

    // Theta(x) = T~ (I_E kron x) T~^* on sigma(M)'; T~_k T~_k^* = Theta^k(I).
    const Commutant comm = commutant(rep.sigma());
    const InteriorTensor& k1 = ind.grade(1);
    const int cd = comm.algebra.dim();
    Mat theta(cd, cd);
    for (int u = 0; u < cd; ++u)
        theta.col(u) = comm.coords(rep.ttilde() * k1.commutant_action(comm.rep.unit(u)) * rep.ttilde().adjoint());
    out.theta_spectral_radius = cd == 0 ? 0.0 : Eigen::ComplexEigenSolver<Mat>(theta, false).eigenvalues().cwiseAbs().maxCoeff();
    out.is_c0 = out.theta_spectral_radius < 1.0 - tol;

    Vec c = comm.algebra.identity_coords();
    for (int g = 0; g <= out.degree; ++g) {
        const Mat& tk = rep.power(g);
        out.decay.push_back(op_norm(tk));
        out.decay_route_gap = std::max(out.decay_route_gap, (tk * tk.adjoint() - comm.element(c)).norm());
        c = theta * c;
    }
    for (Eigen::Index j = 0; j < out.h1.cols(); ++j)
        for (int g = 0; g <= out.degree; ++g)
            out.h1_isometry_residual =
                std::max(out.h1_isometry_residual, std::abs((rep.power(g).adjoint() * out.h1.col(j)).norm() - 1.0));
    return out;
}

WoldReport wold_check(const Dilation& dil, double tol) {
    WoldReport w;
    w.truncation = dil.truncation;
    w.t_norm = op_norm(dil.ttilde);
    const int n = dil.truncation, kd = dil.dim();
    const int columns = static_cast<int>(dil.block_dims.size());
    // Vtilde_k Vtilde_k^* = Vtilde (I_E kron Vtilde_{k-1} Vtilde_{k-1}^*) Vtilde^*.
    const InteriorTensor& x = dil.ek;
    std::vector<Mat> p;
    for (int k = 0; k <= n; ++k) {
        if (k == 0)
            p.push_back(Mat::Identity(kd, kd));
        else
            p.push_back(dil.vtilde * x.commutant_action(p.back()) * dil.vtilde.adjoint());
        std::vector<double> row;
        for (int m = 1; m <= columns; ++m) {
            const double obs = dil.block_dims[m - 1] == 0 ? 0.0 : op_norm(p.back() * dil.column_projection(m));
            row.push_back(obs);
            if (w.t_norm < 1.0 && m <= k)
                w.bound_violation =
                    std::max(w.bound_violation, obs - (k + 1) * std::pow(w.t_norm, k - m + 1) - tol);
        }
        w.column_norm.push_back(row);
        if (k > 0) {
            const double lam = min_eigenvalue(hermitian_part(Mat(p[k - 1] - p[k])));
            w.monotone_violation = std::max(w.monotone_violation, -lam);
        }
    }
    w.monotone = w.monotone_violation <= tol;
    Mat low = Mat::Zero(kd, kd);
    for (int m = 1; m <= std::min(columns, n / 2); ++m) low += dil.column_projection(m);
    w.p_infinity = op_norm(p.back() * low);
    w.induced = w.t_norm < 1.0 && w.p_infinity <= (n + 2) * std::pow(w.t_norm, n / 2.0) + tol;
    return w;
}

}  // namespace hardy
