#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "speclab/errors.hpp"
#include "speclab/bounds.hpp"
#include "speclab/gabor.hpp"

using namespace speclab;

namespace {

// Naive STFT: one inner product per (n, m) through the shift operator.
Mat stft_brute(const Vec& g, const Vec& f) {
    const std::size_t L = f.size();
    Mat v(L, L);
    for (std::size_t n = 0; n < L; ++n)
        for (std::size_t m = 0; m < L; ++m)
            v(n, m) = inner(f, tf_shift(static_cast<long>(n), static_cast<long>(m), g));
    return v;
}

} // namespace

TEST_CASE("time-frequency shifts: identity, translation, unitarity") {
    Vec e0(8, cplx(0.0, 0.0));
    e0[0] = 1.0;

    const Vec same = tf_shift(0, 0, e0);
    for (std::size_t t = 0; t < 8; ++t) CHECK(std::abs(same[t] - e0[t]) < 1e-15);

    const Vec moved = tf_shift(1, 0, e0);
    CHECK(std::abs(moved[1] - cplx(1.0, 0.0)) < 1e-15);

    const Vec f = oracles::random_vector(16);
    const Vec shifted = tf_shift(5, 11, f);
    CHECK(norm2(shifted) == doctest::Approx(norm2(f)).epsilon(1e-12));
}

TEST_CASE("shift composition is a single shift up to a unimodular phase") {
    const Vec f = oracles::random_vector(12);
    const Vec lhs = tf_shift(3, 7, tf_shift(5, 2, f));
    const Vec rhs = tf_shift(8, 9, f);
    // lhs = c * rhs with |c| = 1
    cplx ratio(0.0, 0.0);
    for (std::size_t t = 0; t < 12; ++t) {
        if (std::abs(rhs[t]) > 1e-9) {
            ratio = lhs[t] / rhs[t];
            break;
        }
    }
    CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-12);
    for (std::size_t t = 0; t < 12; ++t) CHECK(std::abs(lhs[t] - ratio * rhs[t]) < 1e-10);
}

TEST_CASE("stft of the delta window") {
    Vec e0(8, cplx(0.0, 0.0));
    e0[0] = 1.0;
    const Mat v = stft(e0, e0);
    for (std::size_t n = 0; n < 8; ++n)
        for (std::size_t m = 0; m < 8; ++m)
            CHECK(std::abs(v(n, m) - (n == 0 ? cplx(1.0, 0.0) : cplx(0.0, 0.0))) < 1e-14);
}

TEST_CASE("stft agrees with the brute-force inner-product loop at L = 8") {
    const Vec g = make_gauss_window(8);
    const Vec f = oracles::random_vector(8);
    const Mat fast = stft(g, f);
    const Mat ref = stft_brute(g, f);
    CHECK(max_abs(fast - ref) < 1e-12);
}

TEST_CASE("Moyal identity at L = 16") {
    const Vec g = make_gauss_window(16);
    const Vec f = oracles::random_vector(16);
    const Mat v = stft(g, f);
    double sum = 0.0;
    for (const cplx& z : v.data()) sum += std::norm(z);
    const double expect = 16.0 * norm2(f) * norm2(f);
    CHECK(sum == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("window construction") {
    const Vec g = make_gauss_window(32);
    CHECK(norm2(g) == doctest::Approx(1.0).epsilon(1e-12));
    for (const cplx& z : g) CHECK(z.real() > 0.0);

    const Vec b = make_boxcar_window(16, 4);
    CHECK(norm2(b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b[0].real() == doctest::Approx(0.5));
    CHECK(std::abs(b[4]) == 0.0);

    CHECK_THROWS_AS(make_boxcar_window(8, 0), ValidationError);
    CHECK_THROWS_AS(make_boxcar_window(8, 9), ValidationError);
}

TEST_CASE("full-density Gabor system is tight with bound L") {
    const GaborSystem sys = build_gabor_frame(8, 1, 1, make_gauss_window(8));
    CHECK(sys.frame.bound_lower == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(sys.frame.bound_upper == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(sys.redundancy == doctest::Approx(8.0));
    // Dual window is g / L, Wexler-Raz gives 1/L.
    CHECK(sys.wexler_raz == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
}

TEST_CASE("non-divisor steps and sub-critical density are rejected") {
    CHECK_THROWS_AS(build_gabor_frame(8, 3, 1, make_gauss_window(8)), BadDivisor);
    CHECK_THROWS_AS(build_gabor_frame(8, 1, 5, make_gauss_window(8)), BadDivisor);
    CHECK_THROWS_AS(build_gabor_frame(8, 4, 4, make_gauss_window(8)), NotAFrame);
}

TEST_CASE("Gaussian L=16 a=b=2 frame: bounds and Wexler-Raz") {
    const GaborSystem sys = build_gabor_frame(16, 2, 2, make_gauss_window(16));
    CHECK(sys.frame.is_frame);
    CHECK(sys.frame.bound_lower > 0.0);
    CHECK(sys.frame.bound_upper >= sys.frame.bound_lower);
    CHECK(sys.wexler_raz == doctest::Approx(4.0 / 16.0).epsilon(1e-10));
    // omega is constant ab/L across the lattice.
    for (double w : sys.frame.omega) CHECK(w == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("Wexler-Raz for a random (non-Gaussian) window") {
    Vec g = oracles::random_vector(16);
    const GaborSystem sys = build_gabor_frame(16, 2, 2, g);
    CHECK(sys.wexler_raz == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("Gabor weight spread collapses: c_phi = 1") {
    for (const auto& [a, b] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {2, 2}, {4, 2}}) {
        const GaborSystem sys = build_gabor_frame(16, a, b, make_gauss_window(16));
        CHECK(sys.frame.omega_sup == doctest::Approx(sys.frame.omega_inf).epsilon(1e-10));
        CHECK(sys.frame.c_phi == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("gabor multiplier with full and empty masks") {
    const GaborSystem sys = build_gabor_frame(16, 2, 2, make_gauss_window(16));

    const Mat full = gabor_multiplier(sys, tf_mask_full(sys));
    CHECK(max_abs(full - Mat::identity(16)) < 1e-9);

    DiscreteDomain empty = sys.frame.index_set;
    empty.points.clear();
    empty.weights.clear();
    const Mat zero = gabor_multiplier(sys, empty);
    CHECK(max_abs(zero) == 0.0);
}

TEST_CASE("gabor multiplier trace equals the omega mass of the mask") {
    const GaborSystem sys = build_gabor_frame(16, 2, 2, make_gauss_window(16));
    const DiscreteDomain mask = tf_mask_from_shape(sys, ContinuousDomain::disk({8, 8}, 5.0));
    REQUIRE(mask.size() > 0);

    const Mat m = gabor_multiplier(sys, mask);
    cplx tr(0.0, 0.0);
    for (std::size_t i = 0; i < 16; ++i) tr += m(i, i);
    const double mu = mu_weighted(sys.frame, mask);
    CHECK(std::abs(tr - cplx(mu, 0.0)) < 1e-9);

    const auto prof = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));
    CHECK(prof.source_trace == doctest::Approx(mu).epsilon(1e-9));
    for (double ev : prof.eigenvalues) {
        CHECK(ev >= -1e-10);
        CHECK(ev <= 1.0 + 1e-10);
    }
}

TEST_CASE("mask translation conjugates the multiplier: spectra coincide") {
    const GaborSystem sys = build_gabor_frame(16, 2, 2, make_gauss_window(16));
    const DiscreteDomain mask = tf_mask_from_shape(sys, ContinuousDomain::disk({4, 4}, 3.2));
    std::vector<std::vector<int>> moved;
    for (auto p : mask.points) moved.push_back({p[0] + 3, p[1] + 5});
    const DiscreteDomain mask2 = tf_mask_from_points(sys, moved);

    const auto p1 = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));
    const auto p2 = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask2));
    for (std::size_t i = 0; i < p1.eigenvalues.size(); ++i) {
        CHECK(p1.eigenvalues[i] == doctest::Approx(p2.eigenvalues[i]).epsilon(1e-10));
    }
}

TEST_CASE("kernel magnitudes match the generic cross-Gram on a small system") {
    const GaborSystem sys = build_gabor_frame(16, 4, 2, make_gauss_window(16));
    const auto q2 = gabor_kernel_q2(sys);  // indexed by difference, 4x8 lattice
    const auto u = decay_profile(sys.frame);

    const int nt = 4, nf = 8;
    for (int dn = 0; dn < nt; ++dn) {
        for (int dm = 0; dm < nf; ++dm) {
            // max over representatives of this torus difference class
            double umax = 0.0;
            for (const auto& [diff, val] : u) {
                int rn = ((diff[0] % nt) + nt) % nt;
                int rm = ((diff[1] % nf) + nf) % nf;
                if (rn == dn && rm == dm) umax = std::max(umax, val);
            }
            CHECK(std::sqrt(q2[dn * nf + dm]) == doctest::Approx(umax).epsilon(1e-9));
        }
    }
}

TEST_CASE("full system decay profile matches stft samples of the window") {
    const std::size_t L = 8;
    const Vec g = make_gauss_window(L);
    const GaborSystem sys = build_gabor_frame(L, 1, 1, g);
    const auto q2 = gabor_kernel_q2(sys);
    const Mat v = stft(g, g);
    // u(v) = |<g, pi(v) g>| = |V_g g(v)| for the tight full system
    for (std::size_t n = 0; n < L; ++n) {
        for (std::size_t m = 0; m < L; ++m) {
            CHECK(std::sqrt(q2[n * L + m]) == doctest::Approx(std::abs(v(n, m))).epsilon(1e-9));
        }
    }
}

TEST_CASE("Hankel identity along the Gabor route") {
    const GaborSystem sys = build_gabor_frame(16, 2, 2, make_gauss_window(16));
    const DiscreteDomain mask = tf_mask_from_shape(sys, ContinuousDomain::disk({8, 8}, 4.5));
    const auto prof = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));
    double lhs = 0.0;
    for (double ev : prof.eigenvalues) {
        const double c = std::clamp(ev, 0.0, 1.0);
        lhs += c - c * c;
    }
    const double rhs = gabor_boundary_interaction(sys, mask);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("mixed-state multiplier: reductions and trace") {
    const std::size_t L = 16;
    Vec e0(L, cplx(0.0, 0.0)), e1(L, cplx(0.0, 0.0));
    e0[0] = 1.0;
    e1[1] = 1.0;

    // Full torus with one window resolves the identity.
    std::vector<std::vector<int>> full;
    for (int x = 0; x < (int)L; ++x)
        for (int y = 0; y < (int)L; ++y) full.push_back({x, y});
    const Mat id = mixed_state_multiplier({e0}, {cplx(1.0, 0.0)}, full, L);
    CHECK(max_abs(id - Mat::identity(L)) < 1e-10);

    // Half-plane mask, two windows.
    std::vector<std::vector<int>> half;
    for (int x = 0; x < (int)L / 2; ++x)
        for (int y = 0; y < (int)L; ++y) half.push_back({x, y});
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Mat a = mixed_state_multiplier({e0, e1}, {inv_sqrt2, inv_sqrt2}, half, L);
    const auto prof = hermitian_eigenvalues(a);
    CHECK(prof.source_trace == doctest::Approx(128.0 / 16.0).epsilon(1e-10));
    for (double ev : prof.eigenvalues) {
        CHECK(ev >= -1e-10);
        CHECK(ev <= 1.0 + 1e-10);
    }

    // Equals the weighted sum of single-window operators entrywise.
    const Mat a0 = mixed_state_multiplier({e0}, {cplx(1.0, 0.0)}, half, L);
    const Mat a1 = mixed_state_multiplier({e1}, {cplx(1.0, 0.0)}, half, L);
    Mat combo(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) combo(i, j) = 0.5 * a0(i, j) + 0.5 * a1(i, j);
    CHECK(max_abs(a - combo) < 1e-12);
}

TEST_CASE("mixed-state validation errors") {
    const std::size_t L = 8;
    Vec e0(L, cplx(0.0, 0.0)), bad(L, cplx(0.0, 0.0));
    e0[0] = 1.0;
    bad[0] = 1.0;
    bad[1] = 0.5;  // not orthogonal to e0 and not normalized
    std::vector<std::vector<int>> mask{{0, 0}};
    CHECK_THROWS_AS(mixed_state_multiplier({e0, bad}, {1.0, 0.0}, mask, L), NotOrthonormal);
    CHECK_THROWS_AS(mixed_state_multiplier({e0}, {cplx(0.5, 0.0)}, mask, L),
                    WeightsNotNormalized);
}

TEST_CASE("refinement study shapes and stability on a small model") {
    const std::size_t L = 32;
    const Vec g = make_gauss_window(L);
    const ContinuousDomain disk = ContinuousDomain::disk({16, 16}, 6.0);
    const std::vector<std::pair<std::size_t, std::size_t>> ladder{{4, 4}, {2, 2}, {1, 1}};
    const auto res = refinement_study(L, g, disk, ladder, {0.5}, default_s_grid(2.0), 2);

    REQUIRE(res.rungs.size() == 3);
    for (const auto& rung : res.rungs) CHECK(rung.frame_ok);
    REQUIRE(res.rows.size() == 3);

    // Counts are near the mask mass on every rung.
    for (const auto& row : res.rows) {
        CHECK(std::abs(static_cast<double>(row.count) - row.mu) < 4.0);
    }

    // A sub-critical rung is flagged, not fatal.
    const std::vector<std::pair<std::size_t, std::size_t>> bad_ladder{{8, 8}, {2, 2}};
    const auto res2 = refinement_study(L, g, disk, bad_ladder, {0.5}, default_s_grid(2.0), 1);
    CHECK(!res2.rungs[0].frame_ok);
    CHECK(res2.rungs[1].frame_ok);
    CHECK(res2.rows.size() == 1);

    // Empty mask: zero counts across rungs.
    const ContinuousDomain nowhere = ContinuousDomain::disk({0.5, 0.5}, 0.2);
    const auto res3 = refinement_study(L, g, nowhere, {{2, 2}, {1, 1}}, {0.5},
                                       default_s_grid(2.0), 1);
    for (const auto& row : res3.rows) CHECK(row.count == 0);
}
