#include <doctest.h>

#include <cmath>

#include "hardy/solve.hpp"
#include "support.hpp"

using namespace hardy;

namespace {

Mat random_in_nest(Rng& rng, const Nest& nest, double norm) {
    Mat x = random_matrix(rng, nest.side(), nest.side()).cwiseProduct(nest.pattern_mask());
    return x * (norm / test::spectral_norm(x));
}

}  // namespace

TEST_SUITE("solve") {

TEST_CASE("Schur interpolation examples") {
    SchurFunction c = schur_interpolate({0.0}, {0.3});
    for (cplx z : {cplx(0.7, 0), cplx(-0.2, 0.5)}) CHECK(std::abs(c(z) - 0.3) < 1e-12);

    SchurFunction id = schur_interpolate({0.0, 0.5}, {0.0, 0.5});
    for (cplx z : {cplx(0.3, 0), cplx(-0.2, 0.6), cplx(0.9, 0)}) CHECK(std::abs(id(z) - z) < 1e-12);
    CHECK(id.boundary_max == doctest::Approx(1.0));

    SchurFunction g = schur_interpolate({0.0, 0.5}, {0.5, 0.2});
    CHECK(std::abs(g(0.0) - 0.5) < 1e-12);
    CHECK(std::abs(g(0.5) - 0.2) < 1e-12);
    CHECK(g.boundary_max <= 1.0 + 1e-12);

    CHECK_THROWS_AS(schur_interpolate({0.0, 0.5}, {0.0, 0.9}), Error);
}

TEST_CASE("property: Schur output re-certifies with an extra sample") {
    Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<cplx> z, w;
        for (int i = 0; i < 3; ++i) z.push_back(random_disc(rng, 0.8));
        // feasible data from a Blaschke factor times a contraction
        const cplx a = random_disc(rng, 0.9), s = random_disc(rng, 1.0);
        for (cplx zi : z) w.push_back(s * (zi - a) / (1.0 - std::conj(a) * zi));
        SchurFunction f = schur_interpolate(z, w);
        CHECK(f.interpolation_residual < 1e-9);
        CHECK(f.sample_boundary(2048) <= 1.0 + 1e-8);
        const cplx extra = random_disc(rng, 0.95);
        z.push_back(extra);
        w.push_back(f(extra));
        CHECK(scalar_pick(z, w).feasible);
    }
}

TEST_CASE("Dykstra on a line and a disc") {
    // A = {x : x_1 = 0.5}, U = unit ball; the projection of (2, 2) onto A n U.
    auto onto_line = [](const Mat& x) { Mat y = x; y(1, 0) = 0.5; return y; };
    auto onto_ball = [](const Mat& x) { return x.norm() <= 1.0 ? x : Mat(x / x.norm()); };
    Mat start(2, 1);
    start << 2.0, 2.0;
    DykstraRun run = dykstra(onto_line, onto_ball, start, 1e-10, 10000);
    CHECK(run.converged);
    CHECK(std::abs(run.x(0, 0).real() - std::sqrt(0.75)) < 1e-6);
    CHECK(std::abs(run.x(1, 0).real() - 0.5) < 1e-12);
    CHECK(run.monotone_after());
}

TEST_CASE("singular value clipping") {
    Rng rng(62);
    Mat x = random_matrix(rng, 3, 4) * 3.0;
    Mat y = clip_singular_values(x);
    CHECK(test::spectral_norm(y) <= 1.0 + 1e-12);
    Mat small = x / (2.0 * test::spectral_norm(x));
    CHECK((clip_singular_values(small) - small).norm() < 1e-14);
}

TEST_CASE("nest solve examples") {
    Rng rng(63);
    Nest nest = nest_from_dims({1, 2});
    Mat c = random_in_nest(rng, nest, 0.9);
    NestSolveResult r = nest_feasibility_solve(nest, Mat::Identity(3, 3), c);
    REQUIRE(r.status == SolveStatus::Solved);
    CHECK((r.x - c).norm() < 1e-6);

    // B = e11 and C = 0.5 e11 on a (1,1) nest; X = 0.5 I is one solution.
    Nest n11 = nest_from_dims({1, 1});
    Mat b = Mat::Zero(2, 2);
    b(0, 0) = 1.0;
    NestSolveResult s = nest_feasibility_solve(n11, b, 0.5 * b);
    REQUIRE(s.status == SolveStatus::Solved);
    CHECK((b * s.x - 0.5 * b).norm() < 1e-6);
    CHECK(s.norm <= 1.0 + 1e-6);
    CHECK(n11.contains_pattern(s.x, 1e-9));

    Mat e21 = Mat::Zero(2, 2);
    e21(1, 0) = 1.0;
    CHECK(nest_feasibility_solve(n11, Mat::Identity(2, 2), e21).status == SolveStatus::Infeasible);
    CHECK_THROWS_AS(nest_feasibility_solve(n11, b, e21), Error);
}

TEST_CASE("property: nest certificate and solver agree") {
    Rng rng(64);
    int solved = 0, certified = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Nest nest = nest_from_dims(trial % 2 ? std::vector<int>{1, 1, 1, 1} : std::vector<int>{2, 2});
        Mat x = random_in_nest(rng, nest, uniform(rng, 0.5, 1.0));
        Mat b = random_matrix(rng, 4, 4);
        Mat c = b * x;
        if (!nest_pick_condition(nest, b, c).feasible) continue;
        ++certified;
        NestSolveResult r = nest_feasibility_solve(nest, b, c);
        if (r.status != SolveStatus::Solved) continue;
        ++solved;
        CHECK(r.norm <= 1.0 + 1e-6);
        CHECK(r.residual < 1e-6);
        CHECK(nest.contains_pattern(r.x, 1e-9));
    }
    CHECK(certified == 60);
    CHECK(solved >= certified * 99 / 100);
}

TEST_CASE("vector interpolation in a nest algebra") {
    Rng rng(65);
    Nest nest = nest_from_dims({1, 2, 1});
    for (int trial = 0; trial < 10; ++trial) {
        Mat x = random_in_nest(rng, nest, 0.9);
        std::vector<Vec> u, v;
        for (int i = 0; i < 2; ++i) {
            u.push_back(random_vector(rng, 4));
            v.push_back(x * u.back());
        }
        CHECK(nest_vector_condition(nest, u, v).feasible);
        NestSolveResult r = nest_vector_solve(nest, u, v);
        REQUIRE(r.status == SolveStatus::Solved);
        CHECK(nest.contains_pattern(r.x, 1e-9));
        CHECK(r.norm <= 1.0 + 1e-6);
        for (int i = 0; i < 2; ++i) CHECK((r.x * u[i] - v[i]).norm() < 1e-6 * (1.0 + v[i].norm()));
    }
}

TEST_CASE("truncated solve") {
    Rng rng(66);
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(2, 2);
    adj(0, 1) = 2;
    Correspondence e = correspondence_from_quiver(adj);
    auto f = fock_truncate(e, 4);
    NormalRep sigma(e.base(), {1, 1});
    auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(e, sigma));
    Mat m = Mat::Zero(d->eh.dim(), 2);
    for (const auto& bm : d->maps) m += random_complex(rng) * bm;
    DualPoint eta = make_point(*d, m * (0.7 / make_point(*d, m).norm));

    SUBCASE("feasible target from a contraction") {
        std::vector<Vec> coeffs = {random_vector(rng, 2), random_vector(rng, 2)};
        HardyElement x(f, coeffs);
        x = x.scaled(0.9 / hardy_norm(x).value);
        PickProblem p{d, {eta}, {Mat::Identity(2, 2)}, {evaluate(x, eta, sigma)}};
        TruncatedSolveResult r = truncated_feasibility_solve(p, f);
        CHECK(r.exact);
        REQUIRE(r.status == SolveStatus::Solved);
        CHECK(r.residual < 1e-6);
        CHECK(r.norm <= 1.0 + 1e-6);
        CHECK((evaluate(r.x, eta, sigma) - p.c[0]).norm() < 1e-6);
    }
    SUBCASE("zero target gives zero") {
        PickProblem p{d, {eta}, {Mat::Identity(2, 2)}, {Mat::Zero(2, 2)}};
        TruncatedSolveResult r = truncated_feasibility_solve(p, f);
        REQUIRE(r.status == SolveStatus::Solved);
        CHECK(r.norm < 1e-9);
    }
    SUBCASE("infeasible target") {
        PickProblem p{d, {eta}, {Mat::Identity(2, 2)}, {2.0 * Mat::Identity(2, 2)}};
        CHECK_THROWS_AS(truncated_feasibility_solve(p, f), Error);
    }
}

TEST_CASE("truncated solve on a nest matches the operator form") {
    Rng rng(67);
    auto nc = correspondence_from_nest({1, 1, 1});
    auto f = fock_truncate(nc.corr, 4);
    NormalRep sigma(nc.corr.base(), {1, 1, 1});
    auto d = std::make_shared<const DualCorrespondence>(dual_correspondence(nc.corr, sigma));
    DualPoint eta = point_from_realization(*d, nc.realization, Mat::Identity(3, 3));
    Nest nest = nest_from_dims({1, 1, 1});
    Mat x = random_in_nest(rng, nest, 0.8);
    Mat b = random_matrix(rng, 3, 3);
    PickProblem p{d, {eta}, {b}, {b * x}};
    TruncatedSolveResult r = truncated_feasibility_solve(p, f);
    NestSolveResult s = nest_feasibility_solve(nest, b, b * x);
    REQUIRE(r.status == SolveStatus::Solved);
    REQUIRE(s.status == SolveStatus::Solved);
    // B is invertible, so both solvers must return X itself
    Mat xr = evaluate(r.x, eta, sigma);
    CHECK((xr - x).norm() < 1e-6 * 10);
    CHECK((s.x - x).norm() < 1e-6 * 10);
    CHECK((xr - s.x).norm() < 1e-5);
}

TEST_CASE("distance formulas") {
    Nest n11 = nest_from_dims({1, 1});
    Mat id = Mat::Identity(2, 2);
    CHECK(distance_to_ideal(n11, id, {{0, 1}}) == doctest::Approx(1.0));
    CHECK(ideal_distance_oracle(n11, id, {{0, 1}}) == doctest::Approx(1.0).epsilon(1e-7));

    Rng rng(68);
    Nest n3 = nest_from_dims({1, 1, 1});
    // T supported away from every G T G block lies in the ideal
    Mat t = Mat::Zero(3, 3);
    t(0, 2) = random_complex(rng);
    CHECK(distance_to_ideal(n3, t, {{0, 2}, {1, 3}}) == 0.0);
    CHECK(ideal_distance_oracle(n3, t, {{0, 2}, {1, 3}}) < 1e-7);

    for (int trial = 0; trial < 20; ++trial) {
        Mat tt = random_matrix(rng, 3, 3).cwiseProduct(n3.pattern_mask());
        std::vector<Interval> ivs;
        for (int k = 0; k < 2; ++k) {
            int a = static_cast<int>(uniform(rng, 0, 3)), b = static_cast<int>(uniform(rng, 0, 3));
            if (a > b) std::swap(a, b);
            ivs.push_back({a, b + 1});
        }
        CHECK(std::abs(distance_to_ideal(n3, tt, ivs) - ideal_distance_oracle(n3, tt, ivs)) < 1e-6);
        Mat any = random_matrix(rng, 3, 3);
        CHECK(std::abs(arveson_distance(n3, any) - arveson_distance_oracle(n3, any)) < 1e-6);
    }
}

TEST_CASE("intervals of a nest") {
    Nest nest = nest_from_dims({2, 1, 1});
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b <= 3; ++b) {
            Interval iv = interval_of(nest, interval_projection(nest, {a, b}));
            CHECK(iv.a == a);
            CHECK(iv.b == b);
        }
    CHECK_THROWS_AS(interval_of(nest, Mat::Identity(4, 4) * 0.5), Error);
}

}  // TEST_SUITE
