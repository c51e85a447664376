#include "speclab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

constexpr double kLogOverflow = 700.0;

std::vector<std::vector<int>> difference_coords(const TorusKernel& kernel) {
    const int d = kernel.lattice.dim;
    std::vector<std::vector<int>> coords;
    std::vector<int> k(d, 0);
    while (true) {
        coords.push_back(k);
        int i = d - 1;
        while (i >= 0 && ++k[i] == kernel.sizes[i]) k[i--] = 0;
        if (i < 0) break;
    }
    return coords;
}

double torus_distance(const TorusKernel& kernel, const std::vector<int>& diff) {
    double s = 0.0;
    for (int i = 0; i < kernel.lattice.dim; ++i) {
        const double step = kernel.lattice.gen[i * kernel.lattice.dim + i];
        double delta = std::fmod(std::abs(diff[i] * step), kernel.period);
        delta = std::min(delta, kernel.period - delta);
        s += delta * delta;
    }
    return std::sqrt(s);
}

} // namespace

KernelOnDomain densify(const TorusKernel& kernel) {
    const auto coords = difference_coords(kernel);
    const std::size_t n = coords.size();
    KernelOnDomain out;
    out.domain = make_domain(kernel.lattice, coords, kernel.mass, kernel.period);
    out.k2.assign(n * n, 0.0);
    const int d = kernel.lattice.dim;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t flat = 0;
            for (int c = 0; c < d; ++c) {
                const int delta = ((out.domain.points[i][c] - out.domain.points[j][c]) %
                                       kernel.sizes[c] + kernel.sizes[c]) % kernel.sizes[c];
                flat = flat * kernel.sizes[c] + static_cast<std::size_t>(delta);
            }
            out.k2[i * n + j] = kernel.q2[flat];
        }
    }
    out.normalized = true;
    return out;
}

KernelOnDomain kernel_from_frame(const FrameSystem& frame) {
    const CrossGramKernel cg = cross_gram_kernel(frame);
    const std::size_t n = frame.size();
    KernelOnDomain out;
    out.domain = frame.index_set;
    out.domain.weights = frame.omega;  // the measure in play is mu_omega
    out.k2.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.k2[i * n + j] = std::norm(cg.kernel(i, j));
    out.normalized = true;
    return out;
}

double log_star(double x) {
    if (!(x > 0.0)) throw NonPositiveInput("log_star requires a positive argument");
    return std::max(1.0, std::log(x));
}

double dyadic_decay(const KernelOnDomain& kernel, double s) {
    const std::size_t n = kernel.domain.size();
    if (n == 0) return 0.0;
    std::vector<std::vector<double>> amb(n);
    for (std::size_t i = 0; i < n; ++i) amb[i] = kernel.domain.lattice.ambient(kernel.domain.points[i]);

    double diam = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            diam = std::max(diam, ambient_dist2(kernel.domain, amb[i], amb[j]));
    diam = std::sqrt(diam);

    const int n_top = diam <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(diam)));
    double total = 0.0;
    for (int level = 0; level <= n_top; ++level) {
        const double hi = std::exp2(static_cast<double>(level));
        const double lo = level == 0 ? -1.0 : hi / 2.0;  // A_0 is the closed unit ball
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double dist = std::sqrt(ambient_dist2(kernel.domain, amb[i], amb[j]));
                if (dist > lo && dist <= hi) {
                    row += std::pow(1.0 + dist, s) * kernel.at(i, j) *
                           kernel.domain.point_weight(j);
                }
            }
            sup = std::max(sup, row);
        }
        total += sup;
    }
    return total;
}

double dyadic_decay(const TorusKernel& kernel, double s) {
    const auto coords = difference_coords(kernel);
    double total = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double dist = torus_distance(kernel, coords[i]);
        total += std::pow(1.0 + dist, s) * kernel.q2[i] * kernel.mass;
    }
    return total;
}

double exp_decay_constant(const KernelOnDomain& kernel, double alpha, double beta) {
    const std::size_t n = kernel.domain.size();
    std::vector<std::vector<double>> amb(n);
    for (std::size_t i = 0; i < n; ++i) amb[i] = kernel.domain.lattice.ambient(kernel.domain.points[i]);
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = std::sqrt(ambient_dist2(kernel.domain, amb[i], amb[j]));
            col += std::exp(alpha * std::pow(dist, 1.0 / beta)) * kernel.at(i, j) *
                   kernel.domain.point_weight(i);
        }
        sup = std::max(sup, col);
    }
    return sup;
}

double exp_decay_constant(const TorusKernel& kernel, double alpha, double beta) {
    const auto coords = difference_coords(kernel);
    double total = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double dist = torus_distance(kernel, coords[i]);
        total += std::exp(alpha * std::pow(dist, 1.0 / beta)) * kernel.q2[i] * kernel.mass;
    }
    return total;
}

double boundary_interaction(const KernelOnDomain& kernel, const std::vector<std::size_t>& mask) {
    const std::size_t n = kernel.domain.size();
    std::vector<char> in(n, 0);
    for (std::size_t i : mask) in[i] = 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!in[i]) continue;
        const double wi = kernel.domain.point_weight(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (in[j]) continue;
            acc += kernel.at(i, j) * wi * kernel.domain.point_weight(j);
        }
    }
    return acc;
}

double boundary_interaction(const TorusKernel& kernel, const DiscreteDomain& mask) {
    const int d = kernel.lattice.dim;
    std::size_t total = 1;
    for (int c = 0; c < d; ++c) total *= static_cast<std::size_t>(kernel.sizes[c]);

    std::vector<char> in(total, 0);
    for (const auto& p : mask.points) {
        std::size_t flat = 0;
        for (int c = 0; c < d; ++c) {
            const int v = ((p[c] % kernel.sizes[c]) + kernel.sizes[c]) % kernel.sizes[c];
            flat = flat * kernel.sizes[c] + static_cast<std::size_t>(v);
        }
        in[flat] = 1;
    }

    std::vector<int> x(d, 0), y(d, 0);
    double acc = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        if (!in[i]) continue;
        std::size_t rem = i;
        for (int c = d - 1; c >= 0; --c) {
            x[c] = static_cast<int>(rem % kernel.sizes[c]);
            rem /= kernel.sizes[c];
        }
        for (std::size_t j = 0; j < total; ++j) {
            if (in[j]) continue;
            rem = j;
            for (int c = d - 1; c >= 0; --c) {
                y[c] = static_cast<int>(rem % kernel.sizes[c]);
                rem /= kernel.sizes[c];
            }
            std::size_t flat = 0;
            for (int c = 0; c < d; ++c) {
                const int delta = ((x[c] - y[c]) % kernel.sizes[c] + kernel.sizes[c]) % kernel.sizes[c];
                flat = flat * kernel.sizes[c] + static_cast<std::size_t>(delta);
            }
            acc += kernel.q2[flat];
        }
    }
    return acc * kernel.mass * kernel.mass;
}

std::vector<double> default_s_grid(double gamma) {
    std::vector<double> grid;
    grid.reserve(17);
    for (int k = 0; k <= 16; ++k) grid.push_back(gamma * std::exp2(k / 4.0));
    return grid;
}

namespace {

BoundEntry infimum_over_grid(double prefactor, double tau, const std::vector<double>& s_grid,
                             const std::vector<double>& n_of_s,
                             double gamma, bool doubling_form) {
    if (s_grid.empty() || s_grid.size() != n_of_s.size()) {
        throw ValidationError("s-grid and N(s) values must be nonempty and aligned");
    }
    double best = std::numeric_limits<double>::infinity();
    double best_s = s_grid.front();
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        const double nval = n_of_s[i];
        if (!std::isfinite(nval)) continue;
        const double l = std::log(tau) + std::log(nval);  // ln(tau N(s))
        const double denom = doubling_form ? s + gamma - 1.0 : s;
        const double pow_exp = gamma / denom;
        const double log_exp = doubling_form ? (s - 1.0) / denom : 1.0 - gamma / s;
        const double log_part = std::max(1.0, l / denom);
        const double ln_term = pow_exp * l + log_exp * std::log(log_part);
        if (ln_term > kLogOverflow) continue;
        const double term = std::exp(ln_term);
        if (term < best) {
            best = term;
            best_s = s;
        }
    }
    if (!std::isfinite(best)) throw AllInfinite("N(s) overflows on the entire s-grid");
    return BoundEntry{prefactor * best, best_s};
}

} // namespace

BoundEntry rhs_theorem_main(double inflation, double gamma, double tau,
                            const std::vector<double>& s_grid, const std::vector<double>& n_of_s) {
    for (double s : s_grid) {
        if (s < gamma - 1e-12) throw ValidationError("s-grid must satisfy s >= gamma");
    }
    return infimum_over_grid(inflation, tau, s_grid, n_of_s, gamma, false);
}

BoundEntry rhs_theorem_doubling(double maxgeom, double gamma, double tau,
                                const std::vector<double>& s_grid,
                                const std::vector<double>& n_of_s) {
    for (double s : s_grid) {
        if (s < 1.0 - 1e-12) throw ValidationError("s-grid must satisfy s >= 1");
    }
    return infimum_over_grid(maxgeom, tau, s_grid, n_of_s, gamma, true);
}

double rhs_exponential(double inflation, double gamma, double beta, double tau, double d_const) {
    const double inner = log_star(tau * d_const);
    return inflation * std::pow(inner, beta * gamma) * log_star(inner);
}

} // namespace speclab
