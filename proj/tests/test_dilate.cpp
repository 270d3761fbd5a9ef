#include <doctest.h>

#include <cmath>

#include "hardy/dilate.hpp"
#include "support.hpp"

using namespace hardy;

namespace {

struct Setup {
    FockPtr fock;
    NormalRep sigma;
    std::shared_ptr<const DualCorrespondence> dual;
    InducedPtr induced;
};

Setup make_setup(const Correspondence& e, const std::vector<int>& mult, int n) {
    Setup s;
    s.fock = fock_truncate(e, n);
    s.sigma = NormalRep(e.base(), mult);
    s.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(e, s.sigma));
    s.induced = std::make_shared<const InducedFock>(s.fock, s.sigma);
    return s;
}

CovariantRep scalar_rep(const Setup& s, double t) {
    return CovariantRep(s.induced, make_point(*s.dual, Mat::Constant(1, 1, t)));
}

DualPoint random_point(const DualCorrespondence& d, Rng& rng, double norm) {
    Mat m = Mat::Zero(d.eh.dim(), d.sigma.dim());
    for (const auto& b : d.maps) m += random_complex(rng) * b;
    return make_point(d, m * (norm / make_point(d, m).norm));
}

Eigen::MatrixXi loop() { return Eigen::MatrixXi::Ones(1, 1); }

}  // namespace

TEST_SUITE("dilate") {

TEST_CASE("defect operators") {
    Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 4);
    Defects d = defect_operators(scalar_rep(s, 0.6));
    CHECK(std::abs(d.delta(0, 0) - 0.8) < 1e-14);
    CHECK(std::abs(d.delta_star(0, 0) - 0.8) < 1e-14);

    Defects iso = defect_operators(scalar_rep(s, 1.0));
    CHECK(iso.delta.norm() < 1e-14);
    CHECK(iso.d_basis.cols() == 0);

    auto nc = correspondence_from_nest({1, 1, 1});
    Setup n = make_setup(nc.corr, {1, 1, 1}, 4);
    CovariantRep canon(n.induced, point_from_realization(*n.dual, nc.realization, Mat::Identity(3, 3)));
    Defects dn = defect_operators(canon);
    // T~ is an isometry on E kron H whose range misses the last block
    CHECK(dn.delta.norm() < 1e-12);
    CHECK((dn.delta_star - (Mat::Identity(3, 3) - nc.projection(2))).norm() < 1e-12);
    CHECK(dn.commutation_residual < 1e-10);
}

TEST_CASE("dilation of simple scalar contractions") {
    SUBCASE("isometric T~ needs no extension") {
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 6);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 1.0), 6);
        CHECK(dil.dim() == 1);
        CHECK((dil.vtilde - dil.ttilde).norm() < 1e-14);
    }
    // V(1) = Vtilde (1 kron .) on K; the basis of E kron K is not ordered like K.
    auto v_of_one = [](const Dilation& dil, const Correspondence& e) {
        return Mat(dil.vtilde * interior_tensor(e, dil.rho).creation(Vec::Ones(1)));
    };
    SUBCASE("T~ = 0.5: first column (0.5, sqrt(0.75), 0, ...)") {
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 6);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 0.5), 6);
        Vec col = v_of_one(dil, s.fock->grade(1)).col(0);
        CHECK(std::abs(col(0) - 0.5) < 1e-14);
        CHECK(std::abs(std::abs(col(1)) - std::sqrt(0.75)) < 1e-14);
        CHECK(col.tail(col.size() - 2).norm() < 1e-14);
    }
    SUBCASE("T~ = 0: the shift") {
        const int n = 6;
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, n);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 0.0), n);
        REQUIRE(dil.dim() == n + 2);
        Mat v = v_of_one(dil, s.fock->grade(1));
        // every column but the last (cut off by the truncation) moves one step down
        for (int j = 0; j + 1 < dil.dim(); ++j)
            for (int i = 0; i < dil.dim(); ++i)
                CHECK(std::abs(std::abs(v(i, j)) - (i == j + 1 ? 1.0 : 0.0)) < 1e-14);
    }
}

TEST_CASE("dilation residuals") {
    Rng rng(71);
    Eigen::MatrixXi flip(2, 2);
    flip << 0, 1, 1, 0;
    for (auto [e, mult] : {std::pair{correspondence_from_quiver(loop()), std::vector<int>{2}},
                           std::pair{correspondence_from_quiver(flip), std::vector<int>{1, 1}},
                           std::pair{correspondence_from_nest({1, 2}).corr, std::vector<int>{1, 1}}}) {
        const int n = 5;
        Setup s = make_setup(e, mult, n);
        CovariantRep rep(s.induced, random_point(*s.dual, rng, 0.7));
        Dilation dil = minimal_isometric_dilation(rep, n);
        CHECK(dil.isometry_residual < 1e-10);
        CHECK(dil.compression_residual < 1e-10);
        // P_H V(xi_1)...V(xi_n) P_H = T(xi_1)...T(xi_n) for every order n <= N
        CHECK(dil.dilation_residual < 1e-10);
        REQUIRE(dil.power_route_checked);
        CHECK(dil.power_route_gap < 1e-11);
    }
}

TEST_CASE("Wold decay") {
    SUBCASE("||T~|| = 0.5, N = 12") {
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 12);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 0.5), 12);
        WoldReport w = wold_check(dil);
        CHECK(w.monotone);
        CHECK(w.bound_violation <= 0.0);
        // column m = 2 at k = 12 against 13 * 0.5^11
        CHECK(w.column_norm[12][1] <= 13.0 * std::pow(0.5, 11));
        CHECK(w.p_infinity < 14.0 * std::pow(0.5, 6));
        CHECK(w.induced);
    }
    SUBCASE("T~ = 0: projections onto the higher grades") {
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 8);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 0.0), 8);
        WoldReport w = wold_check(dil);
        for (int k = 1; k <= 8; ++k)
            for (int m = 1; m <= k; ++m) CHECK(w.column_norm[k][m - 1] < 1e-14);
        CHECK(w.p_infinity < 1e-14);
        CHECK(w.induced);
    }
    SUBCASE("isometric T~: no decay") {
        Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 6);
        Dilation dil = minimal_isometric_dilation(scalar_rep(s, 1.0), 6);
        WoldReport w = wold_check(dil);
        for (int k = 0; k <= 6; ++k) CHECK(std::abs(w.column_norm[k][0] - 1.0) < 1e-12);
        CHECK_FALSE(w.induced);
    }
}

TEST_CASE("CNC and C.0 classification") {
    Setup s = make_setup(correspondence_from_quiver(loop()), {1}, 8);
    CncReport zero = cnc_classify(scalar_rep(s, 0.0), 8);
    CHECK(zero.h1.cols() == 0);
    CHECK(zero.is_cnc);
    CHECK(zero.is_c0);

    CncReport iso = cnc_classify(scalar_rep(s, 1.0), 8);
    CHECK(iso.h1.cols() == 1);
    CHECK_FALSE(iso.is_cnc);
    CHECK_FALSE(iso.exact);

    auto nc = correspondence_from_nest({1, 1, 1});
    Setup n = make_setup(nc.corr, {1, 1, 1}, 4);
    CncReport canon = cnc_classify(CovariantRep(n.induced, point_from_realization(*n.dual, nc.realization, Mat::Identity(3, 3))), 4);
    CHECK(canon.exact);
    CHECK(canon.is_cnc);
    CHECK(canon.is_c0);
}

TEST_CASE("property: strict contractions are CNC and C.0 with the Wold bounds") {
    Rng rng(72);
    Eigen::MatrixXi c(2, 2);
    c << 1, 1, 1, 0;
    for (auto [e, mult] : {std::pair{correspondence_from_quiver(loop()), std::vector<int>{2}},
                           std::pair{correspondence_from_quiver(c), std::vector<int>{1, 1}},
                           std::pair{column_space_correspondence(1, 2).corr, std::vector<int>{1}}}) {
        const int n = 6;
        Setup s = make_setup(e, mult, n);
        for (int trial = 0; trial < 3; ++trial) {
            const double t = uniform(rng, 0.2, 0.9);
            CovariantRep rep(s.induced, random_point(*s.dual, rng, t));
            CncReport r = cnc_classify(rep, n);
            CHECK(r.is_cnc);
            CHECK(r.is_c0);
            CHECK(r.decay_route_gap < 1e-10);
            for (size_t k = 0; k < r.decay.size(); ++k) CHECK(r.decay[k] <= std::pow(t, k) + 1e-12);
            Dilation dil = minimal_isometric_dilation(rep, n);
            WoldReport w = wold_check(dil);
            CHECK(w.bound_violation <= 0.0);
            CHECK(w.monotone);
            CHECK(w.p_infinity < (n + 2) * std::pow(w.t_norm, n / 2) + 1e-12);
        }
    }
}

}  // TEST_SUITE
