#include <doctest.h>

#include <cmath>

#include "hardy/pick.hpp"
#include "support.hpp"

using namespace hardy;

namespace {

// (1 - w_i conj(w_j)) / (1 - z_i conj(z_j))
Mat classical_pick(const std::vector<cplx>& z, const std::vector<cplx>& w) {
    const int k = static_cast<int>(z.size());
    Mat p(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) p(i, j) = (1.0 - w[i] * std::conj(w[j])) / (1.0 - z[i] * std::conj(z[j]));
    return p;
}

DualPoint random_point(const DualCorrespondence& d, Rng& rng, double norm) {
    Mat m = Mat::Zero(d.eh.dim(), d.sigma.dim());
    for (const auto& b : d.maps) m += random_complex(rng) * b;
    DualPoint p = make_point(d, m);
    return make_point(d, m * (norm / p.norm));
}

HardyElement random_element(const FockPtr& f, Rng& rng, bool vanish) {
    std::vector<Vec> c;
    for (int n = 0; n <= f->truncation(); ++n)
        c.push_back(n == 0 && vanish ? Vec::Zero(f->grade_dim(0)) : random_vector(rng, f->grade_dim(n)));
    HardyElement x(f, c);
    return x.scaled(1.0 / hardy_norm(x).value);
}

Mat on_commutant(const DualCorrespondence& d, const LinearMapOnAlgebra& f, const Mat& a) {
    return d.comm.element(f.apply_coords(d.comm.coords(a)));
}

}  // namespace

TEST_SUITE("pick") {

TEST_CASE("theta and its resolvent") {
    SUBCASE("scalar model") {
        PickProblem p = scalar_problem({cplx(0.3, 0.4)}, {0.0});
        const auto& d = *p.dual;
        auto theta = theta_map(d, p.points[0].map, p.points[0].map);
        Mat one = Mat::Identity(1, 1);
        CHECK(std::abs(on_commutant(d, theta, one)(0, 0) - 0.25) < 1e-14);
        auto t = neumann_inverse(theta);
        CHECK(std::abs(on_commutant(d, t, one)(0, 0) - 1.0 / 0.75) < 1e-13);
    }
    SUBCASE("canonical nest point: theta(Q_j) = Q_{j-1}, t(Q_j) = P_j") {
        auto nc = correspondence_from_nest({1, 2, 1});
        NormalRep sigma(nc.corr.base(), {1, 1, 1});
        DualCorrespondence d = dual_correspondence(nc.corr, sigma);
        DualPoint eta = point_from_realization(d, nc.realization, Mat::Identity(4, 4));
        double residual = 1.0;
        auto theta = theta_map(d, eta.map, eta.map, &residual);
        CHECK(residual < 1e-12);
        auto t = neumann_inverse(theta, true);
        for (int j = 1; j <= 3; ++j) {
            Mat prev = j == 1 ? Mat::Zero(4, 4) : nc.block_projection(j - 1);
            CHECK((on_commutant(d, theta, nc.block_projection(j)) - prev).norm() < 1e-12);
            CHECK((on_commutant(d, t, nc.block_projection(j)) - nc.projection(j)).norm() < 1e-12);
        }
    }
    SUBCASE("row contraction: t is the sum over words") {
        Rng rng(41);
        const int h = 2, n = 2;
        Correspondence e = correspondence_from_quiver(Eigen::MatrixXi::Constant(1, 1, n));
        NormalRep sigma(e.base(), {h});
        DualCorrespondence d = dual_correspondence(e, sigma);
        Mat raw = test::random_contraction(rng, n * h, h, 0.7);
        DualPoint eta = point_from_raw(d, raw);
        std::vector<Mat> a;
        for (int l = 0; l < n; ++l) a.push_back(raw.block(l * h, 0, h, h));
        auto t = neumann_inverse(theta_map(d, eta.map, eta.map));
        Mat x = random_matrix(rng, h, h);
        // depth-truncated sum of A_w^* x A_w over words w
        Mat sum = Mat::Zero(h, h), term = x;
        for (int depth = 0; depth < 80; ++depth) {
            sum += term;
            Mat next = Mat::Zero(h, h);
            for (const auto& al : a) next += al.adjoint() * term * al;
            term = next;
        }
        CHECK((on_commutant(d, t, x) - sum).norm() < 1e-10);
        CHECK((neumann_series(theta_map(d, eta.map, eta.map)).matrix - t.matrix).norm() < 1e-10);
    }
}

TEST_CASE("scalar Pick examples") {
    struct Case {
        std::vector<cplx> z, w;
        bool feasible;
    };
    const std::vector<Case> cases = {{{0.0, 0.5}, {0.0, 0.5}, true},
                                     {{0.0, 0.5}, {0.0, 0.9}, false},
                                     {{0.5, -0.5}, {0.25, -0.25}, true}};
    for (const auto& c : cases) {
        Mat oracle = classical_pick(c.z, c.w);
        Certificate s = scalar_pick(c.z, c.w);
        Certificate g = pick_condition(scalar_problem(c.z, c.w));
        CHECK(s.feasible == c.feasible);
        CHECK(g.feasible == c.feasible);
        CHECK((s.blocks[0] - oracle).norm() < 1e-13);
        CHECK((g.blocks[0] - oracle).norm() < 1e-13);
        CHECK(g.lambda_min == doctest::Approx(test::lambda_min(oracle)));
    }
    Mat m = classical_pick({0.0, 0.5}, {0.0, 0.9});
    CHECK(m(1, 1).real() == doctest::Approx(0.19 / 0.75));
    CHECK(m.determinant().real() < 0.0);
}

TEST_CASE("k = 1, C = 0 is always feasible") {
    Rng rng(42);
    Correspondence e = correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2));
    NormalRep sigma(e.base(), {2, 1});
    auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
    for (int trial = 0; trial < 5; ++trial) {
        DualPoint eta = random_point(*d, rng, uniform(rng, 0.1, 0.95));
        CHECK(membership_test(d, eta, Mat::Zero(3, 3)).feasible);
    }
}

TEST_CASE("membership in the scalar model") {
    PickProblem p = scalar_problem({0.5}, {0.0});
    CHECK(membership_test(p.dual, p.points[0], Mat::Constant(1, 1, 0.5)).feasible);
    Certificate bad = membership_test(p.dual, p.points[0], Mat::Constant(1, 1, 2.0));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.lambda_min < 0.0);
}

TEST_CASE("ball: one point") {
    Rng rng(43);
    Vec v = random_vector(rng, 2);
    v *= 0.6 / v.norm();
    for (double s : {0.8, 1.3}) {
        Mat c = test::random_contraction(rng, 2, 2, s);
        Certificate cert = ball_pick({v}, {c});
        Mat expected = (Mat::Identity(2, 2) - c * c.adjoint()) / (1.0 - 0.36);
        CHECK((cert.blocks[0] - expected).norm() < 1e-12);
        CHECK(cert.feasible == (s <= 1.0));
        Certificate g = pick_condition(ball_problem({v}, {c}));
        CHECK(g.feasible == cert.feasible);
        CHECK(std::abs(g.lambda_min - cert.lambda_min) < 1e-10);
    }
}

TEST_CASE("property: specialized and generic certificates agree") {
    Rng rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 1 + trial % 3;
        std::vector<cplx> z, w;
        std::vector<Mat> b, c;
        std::vector<Vec> y, v;
        Eigen::MatrixXi adj = Eigen::MatrixXi::Ones(2, 2);
        for (int i = 0; i < k; ++i) {
            z.push_back(random_disc(rng, 0.9));
            w.push_back(random_disc(rng, 1.0));
            b.push_back(random_matrix(rng, 2, 2));
            c.push_back(random_matrix(rng, 2, 2) * 0.5);
            Vec yi = random_vector(rng, 4);
            y.push_back(yi * (0.8 / yi.norm()));
            Vec vi = random_vector(rng, 2);
            v.push_back(vi * (0.8 / vi.norm()));
        }
        auto agree = [](const Certificate& s, const Certificate& g) {
            CHECK(s.feasible == g.feasible);
            CHECK(std::abs(s.lambda_min - g.lambda_min) < 1e-8);
        };
        agree(scalar_pick(z, w), pick_condition(scalar_problem(z, w)));
        agree(matrix_pick(z, b, c), pick_condition(matrix_problem(z, b, c)));
        agree(ball_pick(v, c), pick_condition(ball_problem(v, c)));
        std::vector<Mat> cq;
        for (int i = 0; i < k; ++i) cq.push_back(random_matrix(rng, 2, 2) * 0.4);
        agree(quiver_pick(adj, y, cq), pick_condition(quiver_problem(adj, y, cq)));
    }
}

TEST_CASE("quiver blocks match the generic Choi blocks") {
    Rng rng(45);
    Eigen::MatrixXi adj(2, 2);
    adj << 1, 1, 1, 0;
    std::vector<Vec> y;
    std::vector<Mat> c;
    for (int i = 0; i < 2; ++i) {
        Vec yi = random_vector(rng, 3);
        y.push_back(yi * (0.7 / yi.norm()));
        c.push_back(Mat(random_vector(rng, 2).asDiagonal()) * 0.5);
    }
    Certificate q = quiver_pick(adj, y, c);
    Certificate g = pick_condition(quiver_problem(adj, y, c));
    REQUIRE(q.blocks.size() == g.blocks.size());
    for (size_t m = 0; m < q.blocks.size(); ++m) CHECK((q.blocks[m] - g.blocks[m]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("property: necessity on nilpotent families") {
    Rng rng(46);
    Eigen::MatrixXi corner = Eigen::MatrixXi::Zero(2, 2);
    corner(0, 1) = 2;
    for (auto e : {correspondence_from_nest({1, 2, 1}).corr, correspondence_from_quiver(corner)}) {
        auto f = fock_truncate(e, 4);
        NormalRep sigma(e.base(), std::vector<int>(e.base().blocks(), 1));
        auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
        for (int trial = 0; trial < 10; ++trial) {
            HardyElement x = random_element(f, rng, false);
            PickProblem p;
            p.dual = d;
            for (int i = 0; i < 2; ++i) {
                p.points.push_back(random_point(*d, rng, uniform(rng, 0.1, 1.0)));
                p.b.push_back(random_matrix(rng, sigma.dim(), sigma.dim()));
                p.c.push_back(p.b.back() * evaluate(x, p.points.back(), sigma));
            }
            CHECK(pick_condition(p, true).feasible);
        }
    }
}

TEST_CASE("Schwartz lemma") {
    SUBCASE("X = 0") {
        PickProblem p = scalar_problem({0.5}, {0.0});
        auto f = fock_truncate(identity_correspondence(MultiMatrixAlgebra({1})), 3);
        HardyElement x(f, {Vec::Zero(1), Vec::Zero(1)});
        SchwartzReport r = schwartz_check(x, p.dual, p.points[0], Mat::Identity(1, 1));
        CHECK(r.min_lambda() >= -1e-12);
        CHECK(std::abs(r.first_lambda - 0.25) < 1e-12);
    }
    SUBCASE("the extremal X = z") {
        auto e = correspondence_from_quiver(Eigen::MatrixXi::Ones(1, 1));
        auto f = fock_truncate(e, 4);
        NormalRep sigma(e.base(), {1});
        auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
        DualPoint eta = point_from_realization(*d, quiver_realization(Eigen::MatrixXi::Ones(1, 1)), Mat::Constant(1, 1, 0.6));
        SchwartzReport r = schwartz_check(HardyElement::monomial(f, 1, Vec::Ones(1)), d, eta, Mat::Identity(1, 1));
        CHECK(r.norm_premise);
        CHECK(r.vanishing_premise);
        CHECK(std::abs(r.first_lambda) < 1e-12);
        CHECK(std::abs(r.third_lambda) < 1e-12);
    }
    SUBCASE("property: random quiver elements") {
        Rng rng(47);
        Eigen::MatrixXi c(2, 2);
        c << 0, 2, 0, 0;
        auto e = correspondence_from_quiver(c);
        auto f = fock_truncate(e, 3);
        NormalRep sigma(e.base(), {1, 2});
        auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
        for (int trial = 0; trial < 30; ++trial) {
            HardyElement x = random_element(f, rng, true);
            DualPoint eta = random_point(*d, rng, uniform(rng, 0.1, 0.95));
            SchwartzReport r = schwartz_check(x, d, eta, Mat::Identity(3, 3));
            CHECK(r.min_lambda() >= -1e-9);
            CHECK(r.chain_consistency < 1e-10);
        }
    }
}

TEST_CASE("nest Pick condition") {
    Nest nest = nest_from_dims({1, 1});
    Mat e12 = Mat::Zero(2, 2), e21 = Mat::Zero(2, 2);
    e12(0, 1) = 1.0;
    e21(1, 0) = 1.0;
    CHECK(nest_pick_condition(nest, Mat::Identity(2, 2), e12).feasible);
    CHECK_FALSE(nest_pick_condition(nest, Mat::Identity(2, 2), e21).feasible);

    Rng rng(48);
    Nest n3 = nest_from_dims({1, 2, 1});
    std::vector<Vec> u = {random_vector(rng, 4), random_vector(rng, 4)};
    CHECK(nest_vector_condition(n3, u, u).feasible);

    CHECK(nest_from_projections({n3.projection(1), n3.projection(2), n3.projection(3)}).dims == n3.dims);
    CHECK_THROWS_AS(nest_from_projections({n3.projection(2), n3.projection(1)}), Error);
}

TEST_CASE("property: generic certificate at the canonical nest point matches the operator form") {
    // The generic certificate at the canonical point and the nest inequalities agree.
    Rng rng(49);
    auto nc = correspondence_from_nest({1, 2, 1});
    NormalRep sigma(nc.corr.base(), {1, 1, 1});
    auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(nc.corr, sigma));
    DualPoint eta = point_from_realization(*d, nc.realization, Mat::Identity(4, 4));
    Nest nest = nest_from_dims({1, 2, 1});
    int feasible = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Mat x = random_matrix(rng, 4, 4).cwiseProduct(nest.pattern_mask());
        x *= uniform(rng, 0.6, 1.4) / test::spectral_norm(x);
        Mat b = random_matrix(rng, 4, 4);
        Mat c = b * x;
        PickProblem p;
        p.dual = d;
        p.points = {eta};
        p.b = {b};
        p.c = {c};
        const bool generic = pick_condition(p, true).feasible;
        CHECK(generic == nest_pick_condition(nest, b, c).feasible);
        feasible += generic;
    }
    CHECK(feasible > 0);
    CHECK(feasible < 20);
}

TEST_CASE("boundary sweep") {
    Rng rng(50);
    Correspondence e = correspondence_from_quiver(Eigen::MatrixXi::Ones(2, 2));
    NormalRep sigma(e.base(), {1, 1});
    PickProblem p;
    p.dual = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
    for (int i = 0; i < 3; ++i) {
        p.points.push_back(random_point(*p.dual, rng, 0.8));
        p.b.push_back(Mat::Identity(2, 2));
        p.c.push_back(Mat::Zero(2, 2));
    }
    for (const auto& s : boundary_sweep(p, {0.5, 0.9, 0.99})) CHECK(s.certificate.feasible);

    // interior problem: the certificates approach the undeformed one
    PickProblem q = scalar_problem({0.0, 0.5}, {0.1, 0.4});
    Certificate at_one = pick_condition(q);
    auto sweep = boundary_sweep(q, {0.9, 0.99, 0.999});
    CHECK(std::abs(sweep[2].certificate.lambda_min - at_one.lambda_min) <
          std::abs(sweep[0].certificate.lambda_min - at_one.lambda_min));
    CHECK(sweep[2].certificate.feasible == at_one.feasible);
}

TEST_CASE("2x2 maps: [[j, j], [j, Psi]] is CP iff Psi - j is CP") {
    Rng rng(51);
    const int n = 2;
    MultiMatrixAlgebra mn({n}), m2n({2 * n});
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Mat> kraus = {random_matrix(rng, n, n), random_matrix(rng, n, n)};
        const double shift = uniform(rng, 0.0, 4.0);
        auto psi = [&](const Mat& a) {
            Mat out = a;
            for (const auto& k : kraus) out += k * a * k.adjoint() * 0.5;
            out -= shift * a.trace() / static_cast<double>(n) * Mat::Identity(n, n);
            return out;
        };
        auto big = LinearMapOnAlgebra::from_function(m2n, m2n, [&](const Mat& a) {
            Mat out = a;
            out.block(n, n, n, n) = psi(a.block(n, n, n, n));
            return out;
        });
        auto diff = LinearMapOnAlgebra::from_function(mn, mn, [&](const Mat& a) { return Mat(psi(a) - a); });
        CHECK(is_completely_positive(big).completely_positive == is_completely_positive(diff).completely_positive);
    }
}

TEST_CASE("epsilon criterion for 2x2 positivity") {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        Mat g = random_matrix(rng, 2, 2);
        Mat a = g * g.adjoint() + 0.1 * Mat::Identity(2, 2);
        Mat b = random_matrix(rng, 2, 2) * 0.5;
        Mat h = random_matrix(rng, 2, 2);
        Mat c = h * h.adjoint();
        Mat block(4, 4);
        block << a, b, b.adjoint(), c;
        bool criterion = true;
        for (double eps : {1e-3, 1e-6, 1e-9}) {
            Mat s = c + eps * Mat::Identity(2, 2) - b.adjoint() * (a + eps * Mat::Identity(2, 2)).inverse() * b;
            criterion = criterion && test::lambda_min(s) >= -1e-12;
        }
        CHECK(criterion == is_psd(block).psd);
    }
}

}  // TEST_SUITE
