#include "speclab/gabor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

#include "speclab/bounds.hpp"
#include "speclab/errors.hpp"

namespace speclab {

namespace {

long mod_l(long v, long L) { return ((v % L) + L) % L; }

// exp(2 pi i j / L) for j in [0, L)
std::vector<cplx> twiddle_table(std::size_t L) {
    std::vector<cplx> w(L);
    for (std::size_t j = 0; j < L; ++j) {
        w[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) /
                                   static_cast<double>(L));
    }
    return w;
}

} // namespace

Vec tf_shift(long x, long xi, const Vec& f) {
    const long L = static_cast<long>(f.size());
    const auto w = twiddle_table(f.size());
    Vec out(f.size());
    const long xs = mod_l(x, L);
    const long xis = mod_l(xi, L);
    for (long t = 0; t < L; ++t) {
        out[t] = f[mod_l(t - xs, L)] * w[static_cast<std::size_t>(mod_l(xis * t, L))];
    }
    return out;
}

Mat stft(const Vec& g, const Vec& f) {
    const std::size_t L = f.size();
    if (g.size() != L) throw ValidationError("window and signal lengths differ");
    if (norm2(g) == 0.0) throw ValidationError("stft window must be nonzero");
    const auto w = twiddle_table(L);
    Mat v(L, L);
    Vec h(L);
    for (std::size_t n = 0; n < L; ++n) {
        for (std::size_t t = 0; t < L; ++t) {
            h[t] = f[t] * std::conj(g[(t + L - n) % L]);
        }
        for (std::size_t m = 0; m < L; ++m) {
            cplx acc(0.0, 0.0);
            for (std::size_t t = 0; t < L; ++t) {
                acc += h[t] * std::conj(w[(m * t) % L]);
            }
            v(n, m) = acc;
        }
    }
    return v;
}

Vec make_gauss_window(std::size_t length) {
    Vec g(length);
    const double L = static_cast<double>(length);
    for (std::size_t t = 0; t < length; ++t) {
        double s = 0.0;
        for (int k = -4; k <= 4; ++k) {
            const double u = static_cast<double>(t) + k * L;
            s += std::exp(-std::numbers::pi * u * u / L);
        }
        g[t] = s;
    }
    return normalized_window(std::move(g));
}

Vec make_boxcar_window(std::size_t length, std::size_t width) {
    if (width == 0 || width > length) throw ValidationError("boxcar width must be in [1, L]");
    Vec g(length, cplx(0.0, 0.0));
    for (std::size_t t = 0; t < width; ++t) g[t] = 1.0;
    return normalized_window(std::move(g));
}

Vec normalized_window(Vec g) {
    const double n = norm2(g);
    if (n == 0.0) throw ValidationError("window must be nonzero");
    for (cplx& z : g) z /= n;
    return g;
}

GaborSystem build_gabor_frame(std::size_t length, std::size_t time_step, std::size_t freq_step,
                              const Vec& window) {
    if (time_step == 0 || length % time_step != 0) throw BadDivisor("time step must divide L");
    if (freq_step == 0 || length % freq_step != 0) throw BadDivisor("frequency step must divide L");
    if (window.size() != length) throw ValidationError("window length differs from L");

    GaborSystem sys;
    sys.length = length;
    sys.time_step = time_step;
    sys.freq_step = freq_step;
    sys.window = normalized_window(window);
    sys.redundancy = static_cast<double>(length) /
                     static_cast<double>(time_step * freq_step);

    const std::size_t nt = length / time_step;
    const std::size_t nf = length / freq_step;
    const double mass = static_cast<double>(time_step * freq_step) / static_cast<double>(length);

    const LatticeSpec lat = LatticeSpec::diagonal(
        {static_cast<double>(time_step), static_cast<double>(freq_step)});

    std::vector<std::vector<int>> points;
    std::vector<Vec> vectors;
    points.reserve(nt * nf);
    vectors.reserve(nt * nf);
    for (std::size_t n = 0; n < nt; ++n) {
        for (std::size_t m = 0; m < nf; ++m) {
            points.push_back({static_cast<int>(n), static_cast<int>(m)});
            vectors.push_back(tf_shift(static_cast<long>(n * time_step),
                                       static_cast<long>(m * freq_step), sys.window));
        }
    }
    DiscreteDomain dom = make_domain(lat, std::move(points), mass, static_cast<double>(length));
    sys.frame = build_frame(length, std::move(dom), std::move(vectors));
    if (!sys.frame.is_frame) {
        throw NotAFrame("Gabor system fails the frame condition");
    }
    sys.dual = sys.frame.duals[0];  // index (0,0) comes first
    sys.wexler_raz = inner(sys.window, sys.dual).real();
    return sys;
}

const Vec& dual_window(const GaborSystem& system) {
    if (!system.frame.is_frame) throw NotAFrame("dual window requires a valid frame");
    return system.dual;
}

DiscreteDomain tf_mask_full(const GaborSystem& system) { return system.frame.index_set; }

DiscreteDomain tf_mask_from_shape(const GaborSystem& system, const ContinuousDomain& shape) {
    const std::size_t nt = system.length / system.time_step;
    const std::size_t nf = system.length / system.freq_step;
    const double L = static_cast<double>(system.length);
    std::vector<std::vector<int>> pts;
    for (std::size_t n = 0; n < nt; ++n) {
        for (std::size_t m = 0; m < nf; ++m) {
            const double x = static_cast<double>(n * system.time_step);
            const double y = static_cast<double>(m * system.freq_step);
            bool inside;
            if (shape.shape == ContinuousDomain::Shape::Disk) {
                // Wrap-around distance keeps disk masks covariant on the torus.
                double dx = std::fmod(std::abs(x - shape.center[0]), L);
                double dy = std::fmod(std::abs(y - shape.center[1]), L);
                dx = std::min(dx, L - dx);
                dy = std::min(dy, L - dy);
                inside = dx * dx + dy * dy <= shape.radius * shape.radius;
            } else {
                inside = shape.contains({x, y});
            }
            if (inside) pts.push_back({static_cast<int>(n), static_cast<int>(m)});
        }
    }
    return make_domain(system.frame.index_set.lattice, std::move(pts),
                       system.frame.index_set.mass, static_cast<double>(system.length));
}

DiscreteDomain tf_mask_from_points(const GaborSystem& system,
                                   const std::vector<std::vector<int>>& points) {
    const int nt = static_cast<int>(system.length / system.time_step);
    const int nf = static_cast<int>(system.length / system.freq_step);
    std::vector<std::vector<int>> pts;
    pts.reserve(points.size());
    for (const auto& p : points) {
        if (p.size() != 2) throw ValidationError("time-frequency mask points need 2 coordinates");
        pts.push_back({((p[0] % nt) + nt) % nt, ((p[1] % nf) + nf) % nf});
    }
    return make_domain(system.frame.index_set.lattice, std::move(pts),
                       system.frame.index_set.mass, static_cast<double>(system.length));
}

Mat gabor_multiplier(const GaborSystem& system, const DiscreteDomain& mask) {
    return frame_multiplier(system.frame, mask);
}

Mat gabor_multiplier_hermitian(const GaborSystem& system, const DiscreteDomain& mask) {
    return multiplier_hermitian(system.frame, mask);
}

std::vector<double> gabor_kernel_q2(const GaborSystem& system) {
    const std::size_t nt = system.length / system.time_step;
    const std::size_t nf = system.length / system.freq_step;
    const double omega = static_cast<double>(system.time_step * system.freq_step) /
                         static_cast<double>(system.length);
    std::vector<double> q2(nt * nf, 0.0);
    for (std::size_t n = 0; n < nt; ++n) {
        for (std::size_t m = 0; m < nf; ++m) {
            const Vec shifted = tf_shift(static_cast<long>(n * system.time_step),
                                         static_cast<long>(m * system.freq_step), system.window);
            const double mag = std::abs(inner(system.dual, shifted));
            q2[n * nf + m] = (mag * mag) / (omega * omega);
        }
    }
    return q2;
}

double gabor_boundary_interaction(const GaborSystem& system, const DiscreteDomain& mask) {
    TorusKernel kernel;
    kernel.lattice = system.frame.index_set.lattice;
    kernel.period = static_cast<double>(system.length);
    kernel.sizes = {static_cast<int>(system.length / system.time_step),
                    static_cast<int>(system.length / system.freq_step)};
    kernel.q2 = gabor_kernel_q2(system);
    kernel.mass = system.frame.index_set.mass;
    return boundary_interaction(kernel, mask);
}

Mat mixed_state_multiplier(const std::vector<Vec>& windows, const std::vector<cplx>& weights,
                           const std::vector<std::vector<int>>& mask, std::size_t length) {
    if (windows.empty() || windows.size() != weights.size()) {
        throw ValidationError("need one weight per window");
    }
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].size() != length) throw ValidationError("window length differs from L");
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx ip = inner(windows[i], windows[j]);
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(ip - expected) > 1e-10) {
                throw NotOrthonormal("windows are not orthonormal to 1e-10");
            }
        }
    }
    double wsum = 0.0;
    for (const cplx& nu : weights) wsum += std::norm(nu);
    if (std::abs(wsum - 1.0) > 1e-10) {
        throw WeightsNotNormalized("sum |nu|^2 must equal 1 to 1e-10");
    }

    const long L = static_cast<long>(length);
    std::vector<std::vector<int>> reduced;
    reduced.reserve(mask.size());
    for (const auto& p : mask) {
        if (p.size() != 2) throw ValidationError("mask points need 2 coordinates");
        reduced.push_back({static_cast<int>(mod_l(p[0], L)), static_cast<int>(mod_l(p[1], L))});
    }
    std::sort(reduced.begin(), reduced.end());
    if (std::adjacent_find(reduced.begin(), reduced.end()) != reduced.end()) {
        throw ValidationError("mask contains duplicate torus points");
    }

    Mat a(length, length);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const double scale = std::norm(weights[w]) / static_cast<double>(length);
        if (scale == 0.0) continue;
        for (const auto& p : reduced) {
            const Vec shifted = tf_shift(p[0], p[1], windows[w]);
            add_outer(a, shifted, shifted, scale);
        }
    }
    hermitize(a);
    return a;
}

namespace {

RefinementRung evaluate_rung(std::size_t length, const Vec& window, const ContinuousDomain& shape,
                             std::size_t a, std::size_t b, const std::vector<double>& s_grid) {
    RefinementRung rung;
    rung.time_step = a;
    rung.freq_step = b;
    GaborSystem sys;
    try {
        sys = build_gabor_frame(length, a, b, window);
    } catch (const NotAFrame&) {
        rung.frame_ok = false;
        return rung;
    }
    rung.frame_ok = true;
    rung.wexler_raz = sys.wexler_raz;

    const DiscreteDomain mask = tf_mask_from_shape(sys, shape);
    rung.mu = mu_weighted(sys.frame, mask);
    rung.profile = hermitian_eigenvalues(gabor_multiplier_hermitian(sys, mask));

    TorusKernel kernel;
    kernel.lattice = sys.frame.index_set.lattice;
    kernel.period = static_cast<double>(length);
    kernel.sizes = {static_cast<int>(length / a), static_cast<int>(length / b)};
    kernel.q2 = gabor_kernel_q2(sys);
    kernel.mass = sys.frame.index_set.mass;

    const double gamma = 2.0;  // two-dimensional time-frequency lattice
    rung.n_of_s.reserve(s_grid.size());
    for (double s : s_grid) rung.n_of_s.push_back(dyadic_decay(kernel, s));
    rung.n_gamma = dyadic_decay(kernel, gamma);
    rung.inflation = inflation_constant(mask, gamma);
    rung.mask_perimeter = lattice_perimeter(mask);
    rung.iota = isotropic_fineness(mask.lattice);
    rung.mask_points = mask.size();
    rung.boundary_interaction = gabor_boundary_interaction(sys, mask);

    // Reference bound at delta = 1/2 (tau = 2); rows rescale per delta later.
    const BoundEntry entry = rhs_theorem_main(rung.inflation, gamma, 2.0, s_grid, rung.n_of_s);
    rung.rhs_main = entry.value;
    rung.rhs_s_star = entry.s_star;
    rung.rhs_doubling =
        rhs_theorem_doubling(std::max(rung.inflation, rung.mask_perimeter), gamma, 2.0, s_grid,
                             rung.n_of_s)
            .value;
    return rung;
}

} // namespace

RefinementResult refinement_study(std::size_t length, const Vec& window,
                                  const ContinuousDomain& shape,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& ladder,
                                  const std::vector<double>& deltas,
                                  const std::vector<double>& s_grid, unsigned max_threads) {
    RefinementResult out;
    out.rungs.resize(ladder.size());

    const unsigned workers =
        std::min<unsigned>(std::max(1u, max_threads), static_cast<unsigned>(ladder.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            out.rungs[i] =
                evaluate_rung(length, window, shape, ladder[i].first, ladder[i].second, s_grid);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= ladder.size()) return;
                    try {
                        out.rungs[i] = evaluate_rung(length, window, shape, ladder[i].first,
                                                     ladder[i].second, s_grid);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    for (const RefinementRung& rung : out.rungs) {
        if (!rung.frame_ok) continue;
        for (double delta : deltas) {
            RefinementRow row;
            row.time_step = rung.time_step;
            row.freq_step = rung.freq_step;
            row.delta = delta;
            row.count = count_above(rung.profile, delta);
            row.mu = rung.mu;
            row.deviation = std::abs(static_cast<double>(row.count) - rung.mu);
            if (delta > 0.0 && delta < 0.5) row.plunge = plunge_count(rung.profile, delta);
            row.n_gamma = rung.n_gamma;
            row.rhs_main = rung.rhs_main;
            out.rows.push_back(row);
        }
    }
    return out;
}

} // namespace speclab
