#include <doctest.h>

#include <cmath>

#include "hardy/eval.hpp"
#include "support.hpp"

using namespace hardy;

namespace {

Eigen::MatrixXi adj1(int c) { return Eigen::MatrixXi::Constant(1, 1, c); }

Eigen::MatrixXi corner() {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(2, 2);
    a(0, 1) = 1;
    return a;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("grade dimensions") {
    auto nest = fock_truncate(correspondence_from_nest({1, 1, 1}).corr, 5);
    CHECK(nest->nilpotent());
    CHECK(nest->truncation() == 2);
    CHECK(nest->grade_dim(0) == 3);
    CHECK(nest->grade_dim(1) == 2);
    CHECK(nest->grade_dim(2) == 1);
    CHECK(nest->grade_dim(3) == 0);
    CHECK(nest->dim() == 6);

    auto loop = fock_truncate(correspondence_from_quiver(adj1(1)), 4);
    CHECK_FALSE(loop->nilpotent());
    for (int n = 0; n <= 4; ++n) CHECK(loop->grade_dim(n) == 1);

    auto two = fock_truncate(correspondence_from_quiver(adj1(2)), 3);
    for (int n = 0; n <= 3; ++n) CHECK(two->grade_dim(n) == (1 << n));
}

TEST_CASE("creation operators") {
    SUBCASE("scalar model gives the truncated shift") {
        const int n = 5;
        auto f = fock_truncate(correspondence_from_quiver(adj1(1)), n);
        Mat t = f->creation(1, Vec::Ones(1));
        REQUIRE(t.rows() == n + 1);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) CHECK(std::abs(std::abs(t(i, j)) - (i == j + 1 ? 1.0 : 0.0)) < 1e-13);
    }
    SUBCASE("corner unit of a (1,1) nest") {
        auto f = fock_truncate(correspondence_from_nest({1, 1}).corr, 3);
        Mat t = f->creation(1, Vec::Ones(1));
        CHECK(test::rank_of(t) == 1);
        CHECK((t * t).norm() < 1e-14);
        CHECK(test::spectral_norm(t) == doctest::Approx(1.0));
    }
    SUBCASE("zero vector") {
        auto f = fock_truncate(correspondence_from_quiver(adj1(2)), 3);
        CHECK(f->creation(1, Vec::Zero(2)).norm() == 0.0);
    }
}

TEST_CASE("property: creation is a bimodule map") {
    Rng rng(21);
    for (auto e : {correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2)), correspondence_from_nest({2, 1}).corr,
                   column_space_correspondence(2, 2).corr}) {
        auto f = fock_truncate(e, 3);
        const auto& m = e.base();
        for (int trial = 0; trial < 5; ++trial) {
            Vec xi = random_vector(rng, e.dim());
            Mat a = m.element(random_vector(rng, m.dim())), b = m.element(random_vector(rng, m.dim()));
            Mat lhs = f->creation(1, e.left(a) * e.right(b) * xi);
            Mat rhs = f->left(a) * f->creation(1, xi) * f->left(b);
            CHECK((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }
}

TEST_CASE("property: gauge covariance") {
    Rng rng(22);
    auto f = fock_truncate(correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2)), 4);
    Mat below = Mat::Zero(f->dim(), f->dim());
    for (int n = 0; n < f->truncation(); ++n) below += f->grade_projection(n);
    for (double t : {M_PI / 3, 1.0, 2.5}) {
        Vec xi = random_vector(rng, f->grade_dim(1));
        Mat tx = f->creation(1, xi);
        Mat w = f->gauge(t);
        CHECK((w * tx * w.adjoint() * below - std::exp(cplx(0, t)) * tx * below).norm() < 1e-12);
        CHECK((w.adjoint() * tx * w * below - std::exp(cplx(0, -t)) * tx * below).norm() < 1e-12);
    }
}

TEST_CASE("Fourier coefficients") {
    Rng rng(23);
    auto f = fock_truncate(correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2)), 4);
    Mat a = f->creation(1, random_vector(rng, f->grade_dim(1))) * f->creation(1, random_vector(rng, f->grade_dim(1)));
    for (int j = -4; j <= 4; ++j) CHECK((fourier_coefficient(*f, a, j) - (j == 2 ? a : Mat::Zero(a.rows(), a.cols()))).norm() < 1e-13);
    Mat l = f->left(f->base().element(random_vector(rng, f->base().dim())));
    for (int j = -4; j <= 4; ++j) CHECK((fourier_coefficient(*f, l, j) - (j == 0 ? l : Mat::Zero(l.rows(), l.cols()))).norm() < 1e-13);
}

TEST_CASE("property: Fourier projections are orthogonal idempotents") {
    Rng rng(24);
    auto f = fock_truncate(correspondence_from_nest({1, 1, 1}).corr, 5);
    Mat a = random_matrix(rng, f->dim(), f->dim());
    for (int j = -2; j <= 2; ++j)
        for (int k = -2; k <= 2; ++k) {
            Mat jk = fourier_coefficient(*f, fourier_coefficient(*f, a, k), j);
            Mat expected = j == k ? fourier_coefficient(*f, a, j) : Mat::Zero(a.rows(), a.cols());
            CHECK((jk - expected).norm() < 1e-13);
        }
}

TEST_CASE("Cesaro means on a nilpotent Fock space") {
    // The plain Fourier sum reproduces A; the Fejer-weighted mean is off by
    // at most (N / k) sum_j ||Phi_j(A)||.
    Rng rng(25);
    auto f = fock_truncate(correspondence_from_nest({1, 1, 1}).corr, 5);
    const int n = f->truncation();
    Mat a = random_matrix(rng, f->dim(), f->dim());
    Mat sum = Mat::Zero(a.rows(), a.cols());
    double mass = 0.0;
    for (int j = -n; j <= n; ++j) {
        sum += fourier_coefficient(*f, a, j);
        mass += fourier_coefficient(*f, a, j).norm();
    }
    CHECK((sum - a).norm() < 1e-13);
    for (int k : {2 * n + 1, 10, 100}) CHECK((cesaro(*f, a, k) - a).norm() <= n * mass / k + 1e-12);
}

TEST_CASE("Hardy norms") {
    SUBCASE("constants") {
        Rng rng(26);
        auto f = fock_truncate(correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2)), 3);
        Mat a = f->base().element(random_vector(rng, 2));
        CHECK(hardy_norm(HardyElement::constant(f, a)).value == doctest::Approx(test::spectral_norm(a)));
    }
    SUBCASE("1 + z has sup norm 2, the truncation sees a lower bound") {
        auto f = fock_truncate(correspondence_from_quiver(adj1(1)), 8);
        HardyElement x(f, {Vec::Ones(1), Vec::Ones(1)});
        HardyNorm n = hardy_norm(x);
        CHECK_FALSE(n.exact);
        CHECK(n.value >= 1.9);
        CHECK(n.value <= 2.0 + 1e-12);
    }
    SUBCASE("nest: the norm of the upper-triangular matrix") {
        Rng rng(27);
        auto nc = correspondence_from_nest({1, 2, 1});
        auto f = fock_truncate(nc.corr, 4);
        for (int trial = 0; trial < 10; ++trial) {
            Vec x0 = random_vector(rng, f->grade_dim(0)), x1 = random_vector(rng, f->grade_dim(1));
            HardyElement x(f, {x0, x1});
            Mat t = f->base().element(x0);
            for (int i = 0; i < x1.size(); ++i) t += x1(i) * nc.realization.ops[i];
            HardyNorm n = hardy_norm(x);
            CHECK(n.exact);
            CHECK(n.value == doctest::Approx(test::spectral_norm(t)).epsilon(1e-10));
        }
    }
}

TEST_CASE("induced representation") {
    SUBCASE("scalar model: Psi(eta) is eta times the shift") {
        auto f = fock_truncate(correspondence_from_quiver(adj1(1)), 4);
        InducedFock ind(f, NormalRep(f->base(), {1}));
        Mat eta = Mat::Constant(1, 1, 0.5);
        Mat psi = ind.psi(eta);
        for (int i = 0; i < psi.rows(); ++i)
            for (int j = 0; j < psi.cols(); ++j) CHECK(std::abs(std::abs(psi(i, j)) - (i == j + 1 ? 0.5 : 0.0)) < 1e-13);
    }
    SUBCASE("pi of the commutant commutes with the induced algebra") {
        Rng rng(28);
        Eigen::MatrixXi c = Eigen::MatrixXi::Ones(2, 2);
        auto f = fock_truncate(correspondence_from_quiver(c), 3);
        NormalRep sigma(f->base(), {2, 1});
        InducedFock ind(f, sigma);
        Commutant comm = commutant(sigma);
        Mat b = comm.element(random_vector(rng, comm.algebra.dim()));
        Mat pb = ind.pi(b);
        Mat below = Mat::Zero(ind.dim(), ind.dim());
        for (int n = 0; n < ind.truncation(); ++n) below += ind.grade_projection(n);
        Mat x = ind.induce(f->creation(1, random_vector(rng, f->grade_dim(1))));
        CHECK((pb * x - x * pb).norm() < 1e-12);
        Mat l = ind.induce(f->left(f->base().element(random_vector(rng, 2))));
        CHECK((pb * l - l * pb).norm() < 1e-12);
    }
    SUBCASE("corner quiver: U is unitary between dimension 3 spaces") {
        auto f = fock_truncate(correspondence_from_quiver(corner()), 4);
        CommutantSetup s = induced_and_commutant(NormalRep(f->base(), {1, 1}), f);
        CHECK(s.induced->dim() == 3);
        CHECK(s.dual_induced->dim() == 3);
        CHECK(s.u_unitarity < 1e-12);
        CHECK(s.u_intertwining < 1e-12);
    }
}

TEST_CASE("induced algebra commutant and double commutant") {
    SUBCASE("nest(1,1,1): double commutant equality") {
        auto nc = correspondence_from_nest({1, 1, 1});
        auto f = fock_truncate(nc.corr, 6);
        CommutantReport r = verify_commutant(induced_and_commutant(NormalRep(f->base(), {1, 1, 1}), f));
        CHECK(r.span_checked);
        CHECK(r.double_commutant_equal);
        CHECK(r.dim_double_commutant == 6);
        CHECK(r.generator_residual < 1e-12);
    }
    SUBCASE("scalar model, N = 6") {
        auto f = fock_truncate(correspondence_from_quiver(adj1(1)), 6);
        for (int d : {1, 2}) {
            CommutantSetup s = induced_and_commutant(NormalRep(f->base(), {d}), f);
            CommutantReport r = verify_commutant(s);
            CHECK(r.generator_residual < 1e-12);
            CHECK(s.u_unitarity < 1e-9);
        }
    }
}

}  // TEST_SUITE
