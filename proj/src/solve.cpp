#include "hardy/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hardy {

namespace {

using Poly = std::vector<cplx>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

cplx poly_eval(const Poly& p, cplx z) {
    cplx acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
}

// Reduced problem after one Schur step; returns g = num / den.
std::pair<Poly, Poly> schur_step(const std::vector<cplx>& z, const std::vector<cplx>& w, double tol) {
    const cplx z1 = z[0], w1 = w[0];
    if (std::abs(w1) >= 1.0 - 1e-12) {
        const cplx u = w1 / std::abs(w1);
        for (size_t i = 1; i < w.size(); ++i)
            if (std::abs(w[i] - u) > 1e-6)
                throw Error(ErrorKind::Infeasible, "schur: unimodular value forces a constant, data disagree");
        return {{u}, {1.0}};
    }
    if (z.size() == 1) return {{w1}, {1.0}};

    std::vector<cplx> zr(z.begin() + 1, z.end()), wr;
    for (size_t i = 1; i < z.size(); ++i) {
        const cplx m = (w[i] - w1) / (1.0 - std::conj(w1) * w[i]);
        const cplx b = (z[i] - z1) / (1.0 - std::conj(z1) * z[i]);
        cplx r = m / b;
        if (std::abs(r) > 1.0 + tol)
            throw Error(ErrorKind::Infeasible, "schur: reduced value of modulus " + std::to_string(std::abs(r)));
        if (std::abs(r) > 1.0) r /= std::abs(r);
        wr.push_back(r);
    }
    auto [p, q] = schur_step(zr, wr, tol);
    // f = (b g + w1) / (1 + conj(w1) b g), b = (z - z1) / (1 - conj(z1) z)
    const Poly bn{-z1, 1.0}, bd{1.0, -std::conj(z1)};
    Poly num = poly_add(poly_mul(bn, p), poly_mul(Poly{w1}, poly_mul(bd, q)));
    Poly den = poly_add(poly_mul(bd, q), poly_mul(Poly{std::conj(w1)}, poly_mul(bn, p)));
    return {num, den};
}

}  // namespace

cplx SchurFunction::operator()(cplx z) const { return poly_eval(num, z) / poly_eval(den, z); }

double SchurFunction::sample_boundary(int samples) const {
    double m = 0.0;
    for (int s = 0; s < samples; ++s)
        m = std::max(m, std::abs((*this)(std::polar(1.0, 2.0 * std::numbers::pi * s / samples))));
    return m;
}

SchurFunction schur_interpolate(const std::vector<cplx>& z, const std::vector<cplx>& w, double tol) {
    if (z.empty() || z.size() != w.size())
        throw Error(ErrorKind::InvalidSpec, "schur: need equally many nodes and values, at least one");
    for (size_t i = 0; i < z.size(); ++i) {
        if (std::abs(z[i]) >= 1.0) throw Error(ErrorKind::InvalidSpec, "schur: node " + std::to_string(i) + " outside the disc");
        if (std::abs(w[i]) > 1.0 + tol) throw Error(ErrorKind::InvalidSpec, "schur: |w_" + std::to_string(i) + "| > 1");
        for (size_t j = 0; j < i; ++j)
            if (std::abs(z[i] - z[j]) < 1e-12)
                throw Error(ErrorKind::InvalidSpec, "schur: repeated node " + std::to_string(j) + " and " + std::to_string(i));
    }
    Certificate cert = scalar_pick(z, w, tol);
    if (!cert.feasible)
        throw Error(ErrorKind::Infeasible, "schur: Pick matrix has eigenvalue " + std::to_string(cert.lambda_min));

    auto [num, den] = schur_step(z, w, tol);
    SchurFunction f{num, den};
    for (size_t i = 0; i < z.size(); ++i)
        f.interpolation_residual = std::max(f.interpolation_residual, std::abs(f(z[i]) - w[i]));
    f.boundary_max = f.sample_boundary();
    return f;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Solved: return "SOLVED";
        case SolveStatus::Infeasible: return "INFEASIBLE";
        case SolveStatus::Undecided: return "NUMERICALLY-UNDECIDED";
    }
    return "?";
}

bool DykstraRun::monotone_after(int burn_in) const {
    for (size_t k = static_cast<size_t>(burn_in) + 1; k < gaps.size(); ++k)
        if (gaps[k] > gaps[k - 1] * (1.0 + 1e-9) + 1e-15) return false;
    return true;
}

DykstraRun dykstra(const std::function<Mat(const Mat&)>& project_affine,
                   const std::function<Mat(const Mat&)>& project_convex, const Mat& start, double tol, int max_iter,
                   const std::function<bool(const Mat&)>& accept) {
    DykstraRun run;
    Mat x = start, p = Mat::Zero(start.rows(), start.cols()), q = p;
    for (int it = 0; it < max_iter; ++it) {
        Mat y = project_affine(x + p);
        p = x + p - y;
        run.x = y;
        run.iterations = it + 1;
        if (accept && accept(y)) {
            run.accepted = true;
            return run;
        }
        Mat xn = project_convex(y + q);
        q = y + q - xn;
        run.gaps.push_back((y - xn).norm());
        x = xn;
        if (run.gaps.back() < tol) {
            run.converged = true;
            break;
        }
    }
    return run;
}

Mat clip_singular_values(const Mat& x, double radius) {
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = svd.singularValues().cwiseMin(radius);
    const Eigen::Index k = s.size();
    return svd.matrixU().leftCols(k) * s.cast<cplx>().asDiagonal() * svd.matrixV().leftCols(k).adjoint();
}

NestSolveResult nest_feasibility_solve(const Nest& nest, const Mat& b, const Mat& c, double tol, int max_iter,
                                       bool gate) {
    const int d = nest.side();
    if (b.cols() != d || c.cols() != d || b.rows() != c.rows())
        throw Error(ErrorKind::DimensionMismatch, "nest solve: B and C must be r x d with d the nest side");
    if ((b * pinv(b) * c - c).norm() > tol * (1.0 + c.norm()))
        throw Error(ErrorKind::InvalidSpec, "nest solve: BX = C has no solution even without the nest pattern");

    NestSolveResult res;
    res.certificate = nest_pick_condition(nest, b, c);
    if (gate && !res.certificate.feasible) {
        res.status = SolveStatus::Infeasible;
        return res;
    }

    // Patterned unknowns and the linear map x -> vec(BX).
    const Mat mask = nest.pattern_mask();
    std::vector<std::pair<int, int>> vars;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            if (mask(i, j) != cplx(0.0)) vars.emplace_back(i, j);
    const Eigen::Index r = b.rows();
    Mat m = Mat::Zero(r * d, static_cast<Eigen::Index>(vars.size()));
    for (size_t v = 0; v < vars.size(); ++v) m.block(vars[v].second * r, v, r, 1) = b.col(vars[v].first);
    const Mat mp = pinv(m);
    const Vec target = vec(c);
    if ((m * (mp * target) - target).norm() > tol * (1.0 + target.norm())) {
        // No patterned solution exists numerically.
        res.status = res.certificate.feasible ? SolveStatus::Undecided : SolveStatus::Infeasible;
        return res;
    }

    auto gather = [&](const Mat& y) {
        Vec x(vars.size());
        for (size_t v = 0; v < vars.size(); ++v) x(v) = y(vars[v].first, vars[v].second);
        return x;
    };
    auto project_affine = [&](const Mat& y) {
        Vec x = gather(y);
        x -= mp * (m * x - target);
        Mat out = Mat::Zero(d, d);
        for (size_t v = 0; v < vars.size(); ++v) out(vars[v].first, vars[v].second) = x(v);
        return out;
    };
    auto project_ball = [](const Mat& y) { return clip_singular_values(y); };
    auto accept = [&](const Mat& y) { return op_norm(y) <= 1.0 + tol && (b * y - c).norm() < tol; };

    DykstraRun run = dykstra(project_affine, project_ball, Mat::Zero(d, d), tol * 1e-3, max_iter, accept);
    res.x = run.x;
    res.norm = op_norm(run.x);
    res.residual = (b * run.x - c).norm();
    res.iterations = run.iterations;
    res.final_gap = run.gaps.empty() ? 0.0 : run.gaps.back();
    res.gap_monotone = run.monotone_after();
    if (run.accepted)
        res.status = SolveStatus::Solved;
    else
        res.status = res.certificate.feasible ? SolveStatus::Undecided : SolveStatus::Infeasible;
    return res;
}

NestSolveResult nest_vector_solve(const Nest& nest, const std::vector<Vec>& u, const std::vector<Vec>& v, double tol,
                                  int max_iter) {
    const int d = nest.side(), k = static_cast<int>(u.size());
    if (u.empty() || v.size() != u.size())
        throw Error(ErrorKind::DimensionMismatch, "nest vectors: u and v must be non-empty and of equal length");
    Mat bu(k, d), cv(k, d);
    for (int i = 0; i < k; ++i) {
        if (u[i].size() != d || v[i].size() != d)
            throw Error(ErrorKind::DimensionMismatch, "nest vectors: vector " + std::to_string(i) + " has the wrong size");
        bu.row(i) = u[i].adjoint();
        cv.row(i) = v[i].adjoint();
    }
    Mat flip = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) flip(i, d - 1 - i) = 1.0;
    std::vector<int> rev(nest.dims.rbegin(), nest.dims.rend());
    NestSolveResult res = nest_feasibility_solve(nest_from_dims(rev), bu * flip, cv * flip, tol, max_iter);
    res.certificate = nest_vector_condition(nest, u, v);
    if (res.status == SolveStatus::Solved) {
        res.x = (flip * res.x * flip).adjoint();
        res.residual = 0.0;
        for (int i = 0; i < k; ++i) res.residual = std::max(res.residual, (res.x * u[i] - v[i]).norm());
        res.norm = op_norm(res.x);
    }
    return res;
}

TruncatedSolveResult truncated_feasibility_solve(const PickProblem& p, const FockPtr& fock, double tol, int max_iter) {
    p.validate();
    const auto& d = *p.dual;
    Certificate cert = pick_condition(p, fock->nilpotent());
    if (!cert.feasible)
        throw Error(ErrorKind::Infeasible,
                    "truncated solve: certificate fails with eigenvalue " + std::to_string(cert.lambda_min));

    const int n = fock->truncation(), k = p.size(), h = d.sigma.dim();
    std::vector<int> dims;
    int total = 0;
    for (int g = 0; g <= n; ++g) {
        dims.push_back(fock->grade_dim(g));
        total += dims.back();
    }
    auto element = [&](const Vec& c) {
        std::vector<Vec> coeffs;
        int off = 0;
        for (int g = 0; g <= n; ++g) {
            coeffs.push_back(c.segment(off, dims[g]));
            off += dims[g];
        }
        return HardyElement(fock, coeffs);
    };

    auto induced = std::make_shared<const InducedFock>(fock, d.sigma);
    std::vector<std::unique_ptr<CovariantRep>> reps;
    for (const auto& eta : p.points) reps.push_back(std::make_unique<CovariantRep>(induced, eta));

    const Eigen::Index fd = fock->dim();
    Mat jmap(fd * fd, total), lmap(static_cast<Eigen::Index>(k) * h * h, total);
    Vec target(static_cast<Eigen::Index>(k) * h * h);
    for (int i = 0; i < k; ++i) target.segment(i * h * h, h * h) = vec(p.c[i]);
    for (int col = 0; col < total; ++col) {
        HardyElement x = element(Vec::Unit(total, col));
        jmap.col(col) = vec(x.op());
        for (int i = 0; i < k; ++i) lmap.block(i * h * h, col, h * h, 1) = vec(p.b[i] * evaluate(x, *reps[i]));
    }

    TruncatedSolveResult res;
    res.exact = fock->nilpotent();
    const Vec c0 = pinv(lmap) * target;
    if ((lmap * c0 - target).norm() > tol * (1.0 + target.norm())) {
        res.x = element(Vec::Zero(total));
        res.residual = (lmap * c0 - target).norm();
        return res;
    }
    const Mat ns = null_space(lmap);
    const Mat jn = jmap * ns, jnp = pinv(jn), jp = pinv(jmap);
    auto to_op = [&](const Vec& c) { return unvec(jmap * c, fd, fd); };
    auto project_affine = [&](const Mat& y) {
        if (ns.cols() == 0) return to_op(c0);
        Vec z = jnp * (vec(y) - jmap * c0);
        return to_op(c0 + ns * z);
    };
    auto project_ball = [](const Mat& y) { return clip_singular_values(y); };
    auto accept = [&](const Mat& y) { return op_norm(y) <= 1.0 + tol; };
    DykstraRun run = dykstra(project_affine, project_ball, Mat::Zero(fd, fd), tol * 1e-3, max_iter, accept);

    const Vec c = jp * vec(run.x);
    res.x = element(c);
    res.norm = op_norm(run.x);
    res.residual = (lmap * c - target).norm();
    res.iterations = run.iterations;
    res.gap_monotone = run.monotone_after();
    res.status = run.accepted && res.residual < tol ? SolveStatus::Solved : SolveStatus::Undecided;
    return res;
}

Mat interval_projection(const Nest& nest, const Interval& iv) {
    return nest.projection(iv.b) - nest.projection(iv.a);
}

Interval interval_of(const Nest& nest, const Mat& g, double tol) {
    if (g.rows() == nest.side() && g.cols() == nest.side())
        for (int a = 0; a <= nest.size(); ++a)
            for (int b = a + 1; b <= nest.size(); ++b)
                if ((interval_projection(nest, {a, b}) - g).norm() <= tol) return {a, b};
    throw Error(ErrorKind::InvalidSpec, "distance: projection is not an interval of the nest");
}

namespace {

void check_interval(const Nest& nest, const Interval& iv) {
    if (iv.a < 0 || iv.b > nest.size() || iv.a >= iv.b)
        throw Error(ErrorKind::InvalidSpec, "distance: interval [" + std::to_string(iv.a) + ", " +
                                                std::to_string(iv.b) + ") is not an interval of the nest");
}

}  // namespace

double distance_to_ideal(const Nest& nest, const Mat& t, const std::vector<Interval>& intervals) {
    if (!nest.contains_pattern(t, 1e-12)) throw Error(ErrorKind::InvalidSpec, "distance: T is not in the nest algebra");
    double m = 0.0;
    for (const auto& iv : intervals) {
        check_interval(nest, iv);
        Mat g = interval_projection(nest, iv);
        m = std::max(m, op_norm(g * t * g));
    }
    return m;
}

double arveson_distance(const Nest& nest, const Mat& t) {
    const Mat id = Mat::Identity(nest.side(), nest.side());
    double m = 0.0;
    for (int j = 1; j < nest.size(); ++j) {
        Mat pj = nest.projection(j);
        m = std::max(m, op_norm((id - pj) * t * pj));
    }
    return m;
}

double min_norm_completion(const Mat& values, const Eigen::MatrixXi& fixed, double tol) {
    // minimize t subject to [[t I, Z], [Z^*, t I]] >= 0 with Z = values on the
    // fixed entries, by a log-barrier path-following method over the real and
    // imaginary parts of the free entries.
    const Eigen::Index r = values.rows(), c = values.cols(), m = r + c;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
    Mat f0 = Mat::Zero(m, m);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) {
            if (fixed(i, j)) {
                f0(i, r + j) = values(i, j);
                f0(r + j, i) = std::conj(values(i, j));
            } else {
                free.emplace_back(i, j);
            }
        }
    const Eigen::Index n = 2 * static_cast<Eigen::Index>(free.size()) + 1;
    std::vector<Mat> basis;
    for (auto [i, j] : free) {
        Mat re = Mat::Zero(m, m), im = Mat::Zero(m, m);
        re(i, r + j) = 1.0;
        re(r + j, i) = 1.0;
        im(i, r + j) = cplx(0.0, 1.0);
        im(r + j, i) = cplx(0.0, -1.0);
        basis.push_back(re);
        basis.push_back(im);
    }
    basis.push_back(Mat::Identity(m, m));

    auto assemble = [&](const RVec& y) {
        Mat f = f0;
        for (Eigen::Index k = 0; k < n; ++k) f += y(k) * basis[k];
        return f;
    };
    auto barrier = [&](const RVec& y, double mu, double& value) {
        Eigen::LLT<Mat> llt(assemble(y));
        if (llt.info() != Eigen::Success) return false;
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
        value = y(n - 1) / mu - logdet;
        return std::isfinite(value);
    };

    RVec y = RVec::Zero(n);
    y(n - 1) = op_norm(values.cwiseProduct(fixed.cast<cplx>())) + 1.0;
    for (double mu = 1.0; mu * static_cast<double>(m) > 0.1 * tol; mu /= 8.0) {
        for (int it = 0; it < 100; ++it) {
            Mat finv = assemble(y).llt().solve(Mat::Identity(m, m));
            std::vector<Mat> a(n);
            RVec g(n);
            for (Eigen::Index k = 0; k < n; ++k) {
                a[k] = finv * basis[k];
                g(k) = -std::real(a[k].trace());
            }
            g(n - 1) += 1.0 / mu;
            Eigen::MatrixXd h(n, n);
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l <= k; ++l)
                    h(k, l) = h(l, k) = std::real(a[k].cwiseProduct(a[l].transpose()).sum());
            RVec dy = -h.ldlt().solve(g);
            const double dec = -g.dot(dy);
            if (dec < 1e-12) break;
            double f_old = 0.0, f_new = 0.0, step = 1.0;
            barrier(y, mu, f_old);
            while (step > 1e-12 && (!barrier(y + step * dy, mu, f_new) || f_new > f_old - 0.25 * step * dec))
                step *= 0.5;
            y += step * dy;
        }
    }
    return y(n - 1);
}

double ideal_distance_oracle(const Nest& nest, const Mat& t, const std::vector<Interval>& intervals, double tol) {
    // J = {Y in Alg N : GYG = 0 for all G}; T - J fixes T on the G-diagonal
    // squares and off the pattern.
    const int d = nest.side();
    const Mat mask = nest.pattern_mask();
    Eigen::MatrixXi fixed = Eigen::MatrixXi::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) fixed(i, j) = mask(i, j) == cplx(0.0) ? 1 : 0;
    for (const auto& iv : intervals) {
        check_interval(nest, iv);
        Mat g = interval_projection(nest, iv);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (g(i, i) != cplx(0.0) && g(j, j) != cplx(0.0)) fixed(i, j) = 1;
    }
    return min_norm_completion(t, fixed, tol);
}

double arveson_distance_oracle(const Nest& nest, const Mat& t, double tol) {
    const int d = nest.side();
    const Mat mask = nest.pattern_mask();
    Eigen::MatrixXi fixed(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) fixed(i, j) = mask(i, j) == cplx(0.0) ? 1 : 0;
    return min_norm_completion(t, fixed, tol);
}

}  // namespace hardy
