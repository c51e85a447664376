#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oracles.hpp"
#include "speclab/errors.hpp"
#include "speclab/lattice.hpp"

using namespace speclab;

namespace {

std::vector<std::vector<int>> square3x3() {
    std::vector<std::vector<int>> pts;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) pts.push_back({i, j});
    return pts;
}

std::vector<std::vector<int>> interval(int a, int b) {
    std::vector<std::vector<int>> pts;
    for (int i = a; i <= b; ++i) pts.push_back({i});
    return pts;
}

} // namespace

TEST_CASE("singular data of simple generators") {
    const auto id2 = singular_data(2, {1, 0, 0, 1});
    CHECK(id2.sigma[0] == doctest::Approx(1.0));
    CHECK(id2.sigma[1] == doctest::Approx(1.0));
    CHECK(id2.condition == doctest::Approx(1.0));
    CHECK(id2.covolume == doctest::Approx(1.0));

    const auto diag = singular_data(2, {2, 0, 0, 1});
    CHECK(diag.sigma[0] == doctest::Approx(1.0));
    CHECK(diag.sigma[1] == doctest::Approx(2.0));
    CHECK(diag.condition == doctest::Approx(2.0));
    CHECK(diag.covolume == doctest::Approx(2.0));
}

TEST_CASE("shear generator matches the quadratic-root oracle") {
    // For [[1,1],[0,1]] the Gram matrix has characteristic polynomial
    // x^2 - 3x + 1 with roots (3 +- sqrt 5)/2.
    const auto sd = singular_data(2, {1, 1, 0, 1});
    const double lo = (3.0 - std::sqrt(5.0)) / 2.0;
    const double hi = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(sd.sigma[0] == doctest::Approx(std::sqrt(lo)).epsilon(1e-12));
    CHECK(sd.sigma[1] == doctest::Approx(std::sqrt(hi)).epsilon(1e-12));
    CHECK(sd.condition == doctest::Approx(std::sqrt(hi / lo)).epsilon(1e-12));
    CHECK(sd.covolume == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("singular generator rejected") {
    CHECK_THROWS_AS(singular_data(2, {1, 1, 1, 1}), SingularGenerator);
    CHECK_THROWS_AS(LatticeSpec::from_generator(2, {1e-7, 0, 0, 1e-7}), SingularGenerator);
}

TEST_CASE("isotropic fineness") {
    CHECK(isotropic_fineness(LatticeSpec::integer(2)) == doctest::Approx(1.0));
    // Isotropic contractions leave it at condition^{2d} = 1.
    for (double eps : {1.0, 0.5, 0.25, 0.01}) {
        CHECK(isotropic_fineness(LatticeSpec::scaled(2, eps)) == doctest::Approx(1.0));
    }
    CHECK(isotropic_fineness(LatticeSpec::diagonal({2, 1})) == doctest::Approx(64.0));
}

TEST_CASE("fineness of contracted anisotropic lattices is condition^2d") {
    const LatticeSpec base = LatticeSpec::diagonal({3, 1});
    const double kappa2d = std::pow(base.condition, 4.0);
    for (double eps : {0.3, 0.1, 1.0 / 3.0}) {
        const LatticeSpec lat = LatticeSpec::diagonal({3 * eps, eps});
        CHECK(isotropic_fineness(lat) == doctest::Approx(kappa2d).epsilon(1e-12));
    }
}

TEST_CASE("discretize disk and rectangle") {
    const LatticeSpec z2 = LatticeSpec::integer(2);
    const auto disk = discretize(ContinuousDomain::disk({0, 0}, 2.5), z2);
    CHECK(disk.size() == 21);

    const auto off = discretize(ContinuousDomain::disk({0.5, 0.5}, 0.4), z2);
    CHECK(off.size() == 0);

    const auto rect = discretize(ContinuousDomain::rect({0, 0}, {3, 2}), z2);
    CHECK(rect.size() == 12);
    CHECK(rect.mass == doctest::Approx(1.0));

    // Row-major enumeration.
    CHECK(rect.points.front() == std::vector<int>{0, 0});
    CHECK(rect.points.back() == std::vector<int>{3, 2});
    CHECK(std::is_sorted(rect.points.begin(), rect.points.end()));
}

TEST_CASE("discretize a triangle") {
    const LatticeSpec z2 = LatticeSpec::integer(2);
    const auto tri = discretize(
        ContinuousDomain::polygon({{{0.0, 0.0}}, {{3.0, 0.0}}, {{0.0, 4.0}}}), z2);
    // Closed triangle x,y >= 0, 4x + 3y <= 12: columns x=0..3 hold 5,3,2,1 points.
    CHECK(tri.size() == 11);
}

TEST_CASE("discrete boundary of standard shapes") {
    const LatticeSpec z2 = LatticeSpec::integer(2);
    const auto sq = make_domain(z2, square3x3());
    const auto bd = discrete_boundary(sq);
    CHECK(bd.size() == 8);
    CHECK(!bd.contains({1, 1}));

    const auto single = make_domain(z2, {{5, -3}});
    CHECK(discrete_boundary(single).size() == 1);

    std::vector<std::vector<int>> strip;
    for (int i = 0; i < 7; ++i) strip.push_back({i, 0});
    CHECK(discrete_boundary(make_domain(z2, strip)).size() == 7);
}

TEST_CASE("discrete boundary matches the brute-force nearest-complement scan") {
    for (int rep = 0; rep < 10; ++rep) {
        const auto pts = oracles::random_blob(2, 30);
        const auto dom = make_domain(LatticeSpec::integer(2), pts);
        const auto bd = discrete_boundary(dom);
        const auto ref = oracles::boundary_brute(dom);
        CHECK(bd.points == ref);
    }
}

TEST_CASE("lattice perimeter") {
    const auto sq = make_domain(LatticeSpec::integer(2), square3x3());
    CHECK(lattice_perimeter(sq) == doctest::Approx(8.0));

    // Same physical square sampled on (Z/2)^2.
    const auto fine = make_domain(LatticeSpec::scaled(2, 0.5), square3x3());
    CHECK(lattice_perimeter(fine) == doctest::Approx(4.0));

    const auto single = make_domain(LatticeSpec::integer(1), {{0}});
    CHECK(lattice_perimeter(single) == doctest::Approx(1.0));

    const auto empty = make_domain(LatticeSpec::integer(2), {});
    CHECK(lattice_perimeter(empty) == doctest::Approx(0.0));
}

TEST_CASE("lattice perimeter scales like eps^{d-1} under isotropic contraction") {
    const auto pts = oracles::random_blob(2, 25);
    const double base = lattice_perimeter(make_domain(LatticeSpec::integer(2), pts));
    for (double eps : {0.5, 0.25, 0.125}) {
        const double scaled = lattice_perimeter(make_domain(LatticeSpec::scaled(2, eps), pts));
        CHECK(scaled == doctest::Approx(eps * base).epsilon(1e-12));
    }
}

TEST_CASE("inflation constant on intervals") {
    const LatticeSpec z1 = LatticeSpec::integer(1);
    CHECK(inflation_constant(make_domain(z1, interval(0, 9)), 1.0) == doctest::Approx(4.0));
    CHECK(inflation_constant(make_domain(z1, {{0}}), 1.0) == doctest::Approx(4.0));
    CHECK(inflation_constant(make_domain(z1, {}), 1.0) == doctest::Approx(0.0));
}

TEST_CASE("inflation constant is translation invariant") {
    const LatticeSpec z2 = LatticeSpec::integer(2);
    const auto pts = oracles::random_blob(2, 18);
    const double base = inflation_constant(make_domain(z2, pts), 2.0);
    for (int shift : {1, -4, 9}) {
        std::vector<std::vector<int>> moved;
        for (auto p : pts) {
            p[0] += shift;
            p[1] -= 2 * shift;
            moved.push_back(p);
        }
        CHECK(inflation_constant(make_domain(z2, moved), 2.0) == doctest::Approx(base));
    }
}

TEST_CASE("inflation constant equals the brute-force enumeration") {
    const LatticeSpec z1 = LatticeSpec::integer(1);
    const LatticeSpec z2 = LatticeSpec::integer(2);
    for (int rep = 0; rep < 4; ++rep) {
        const auto pts1 = oracles::random_blob(1, 12, 20);
        const auto dom1 = make_domain(z1, pts1);
        CHECK(inflation_constant(dom1, 1.0) == oracles::inflation_brute(dom1, 1.0));

        const auto pts2 = oracles::random_blob(2, 15);
        const auto dom2 = make_domain(z2, pts2);
        CHECK(inflation_constant(dom2, 2.0) == oracles::inflation_brute(dom2, 2.0));
    }
}

TEST_CASE("doubling ratios never exceed 5^d") {
    const LatticeSpec z1 = LatticeSpec::integer(1);
    CHECK(doubling_ratio(z1, {{0}}, {1.0}) == doctest::Approx(5.0 / 3.0));

    const LatticeSpec z2 = LatticeSpec::integer(2);
    CHECK(doubling_ratio(z2, {{0, 0}}, {0.5}) == doctest::Approx(5.0));

    std::uniform_real_distribution<double> uni(0.3, 6.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double r = uni(oracles::rng());
        CHECK(doubling_ratio(z1, {{3}, {-7}}, {r}) <= 5.0);
        CHECK(doubling_ratio(z2, {{0, 0}, {2, -1}}, {r}) <= 25.0);
    }
}

TEST_CASE("continuous perimeter") {
    CHECK(continuous_perimeter(ContinuousDomain::rect({0, 0}, {1, 1})) == doctest::Approx(4.0));
    CHECK(continuous_perimeter(ContinuousDomain::polygon({{{0, 0}}, {{3, 0}}, {{0, 4}}})) ==
          doctest::Approx(12.0));
    CHECK(continuous_perimeter(ContinuousDomain::disk({0, 0}, 1.0)) ==
          doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("degenerate shapes are rejected") {
    CHECK_THROWS_AS(ContinuousDomain::rect({0, 0}, {0, 1}), ValidationError);
    CHECK_THROWS_AS(ContinuousDomain::disk({0, 0}, 0.0), ValidationError);
    // Bowtie self-intersection
    CHECK_THROWS_AS(ContinuousDomain::polygon({{{0, 0}}, {{1, 1}}, {{1, 0}}, {{0, 1}}}),
                    ValidationError);
}

TEST_CASE("perimeter sandwich report") {
    const auto sq = make_domain(LatticeSpec::integer(2), square3x3());
    const auto rep = perimeter_sandwich_check(sq);
    CHECK(rep.lower == doctest::Approx(8.0));
    CHECK(rep.upper == doctest::Approx(8.0));  // identity lattice collapses the sandwich
    CHECK(rep.within_slack);

    const auto single = perimeter_sandwich_check(make_domain(LatticeSpec::integer(1), {{0}}));
    CHECK(single.lower == doctest::Approx(1.0));
    CHECK(single.upper == doctest::Approx(1.0));
    CHECK(single.within_slack);

    const auto blob = make_domain(LatticeSpec::integer(2), oracles::random_blob(2, 20));
    const auto rep2 = perimeter_sandwich_check(blob);
    CHECK(rep2.proxy >= rep2.lower / 10.0);
    CHECK(rep2.proxy <= rep2.upper * 10.0);
    CHECK(rep2.within_slack);
}

TEST_CASE("discretized measure approaches the area at a perimeter-controlled rate") {
    const ContinuousDomain disk = ContinuousDomain::disk({0.3, -0.2}, 5.0);
    const double area = std::numbers::pi * 25.0;
    const double perimeter = continuous_perimeter(disk);
    for (double h : {1.0, 0.5, 0.25, 0.125}) {
        const auto dom = discretize(disk, LatticeSpec::scaled(2, h));
        const double gap = std::abs(dom.measure() - area);
        CHECK(gap <= 4.0 * h * perimeter);
    }
    // Fineness of the sampling lattice stays 1 along the refinement.
    CHECK(isotropic_fineness(LatticeSpec::scaled(2, 0.125)) == doctest::Approx(1.0));
}

TEST_CASE("duplicate points are rejected") {
    CHECK_THROWS_AS(make_domain(LatticeSpec::integer(1), {{0}, {0}}), ValidationError);
}

TEST_CASE("domain measure uses weights when present") {
    auto dom = make_domain(LatticeSpec::integer(1), interval(0, 3));
    CHECK(dom.measure() == doctest::Approx(4.0));
    dom.weights = {0.5, 1.0, 1.5, 2.0};
    CHECK(dom.measure() == doctest::Approx(5.0));
}
