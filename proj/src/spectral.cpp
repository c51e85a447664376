#include "speclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "speclab/errors.hpp"

namespace speclab {

namespace {

double offdiag_frobenius(const Mat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

EigResult jacobi_eigh(const Mat& a, bool want_vectors) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw NotHermitian("matrix is not square");
    const double scale = max_abs(a);
    if (hermiticity_defect(a) > 1e-10 * std::max(scale, 1e-300)) {
        throw NotHermitian("Hermiticity defect above 1e-10 relative");
    }

    Mat w = a;
    hermitize(w);
    Mat v = want_vectors ? Mat::identity(n) : Mat();

    const double fro = frobenius_norm(w);
    const double target = 1e-12 * fro;

    int sweeps = 0;
    while (offdiag_frobenius(w) > target) {
        if (++sweeps > 100) throw NoConvergence("Jacobi iteration exceeded 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = w(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                // Unitary 2x2 rotation [[c, sigma],[-conj(sigma), c]] chosen
                // so the (p,q) entry of R^H W R vanishes.
                const double tau = (aqq - app) / (2.0 * mag);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx phase = apq / mag;
                const cplx sigma = s * phase;

                for (std::size_t i = 0; i < n; ++i) {
                    const cplx wip = w(i, p);
                    const cplx wiq = w(i, q);
                    w(i, p) = c * wip - std::conj(sigma) * wiq;
                    w(i, q) = sigma * wip + c * wiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx wpj = w(p, j);
                    const cplx wqj = w(q, j);
                    w(p, j) = c * wpj - sigma * wqj;
                    w(q, j) = std::conj(sigma) * wpj + c * wqj;
                }
                w(p, p) = cplx(app - t * mag, 0.0);
                w(q, q) = cplx(aqq + t * mag, 0.0);
                w(p, q) = cplx(0.0, 0.0);
                w(q, p) = cplx(0.0, 0.0);

                if (want_vectors) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const cplx vip = v(i, p);
                        const cplx viq = v(i, q);
                        v(i, p) = c * vip - std::conj(sigma) * viq;
                        v(i, q) = sigma * vip + c * viq;
                    }
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return w(i, i).real() > w(j, j).real();
    });

    EigResult r;
    r.eigenvalues.resize(n);
    for (std::size_t k = 0; k < n; ++k) r.eigenvalues[k] = w(order[k], order[k]).real();
    if (want_vectors) {
        r.vectors = Mat(n, n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) r.vectors(i, k) = v(i, order[k]);
    }
    return r;
}

SpectralProfile hermitian_eigenvalues(const Mat& a) {
    SpectralProfile prof;
    prof.source_trace = trace_real(a);
    prof.dimension = a.rows();
    prof.eigenvalues = jacobi_eigh(a, false).eigenvalues;

    const double sum = std::accumulate(prof.eigenvalues.begin(), prof.eigenvalues.end(), 0.0);
    const double tol = 1e-9 * std::max(1.0, std::abs(prof.source_trace));
    if (std::abs(sum - prof.source_trace) > tol) {
        throw NoConvergence("eigenvalue sum deviates from the matrix trace");
    }
    return prof;
}

std::size_t count_above(const SpectralProfile& p, double delta) {
    std::size_t c = 0;
    for (double ev : p.eigenvalues)
        if (ev > delta) ++c;
    return c;
}

std::size_t plunge_count(const SpectralProfile& p, double delta) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw DeltaOutOfRange("plunge_count requires delta in (0, 1/2)");
    }
    std::size_t c = 0;
    for (double ev : p.eigenvalues)
        if (ev > delta && ev < 1.0 - delta) ++c;
    return c;
}

double spectral_deviation(const SpectralProfile& p, double delta, double target) {
    return std::abs(static_cast<double>(count_above(p, delta)) - target);
}

double hankel_schatten(const SpectralProfile& p, double schatten_p) {
    if (!(schatten_p > 0.0 && schatten_p <= 2.0)) {
        throw POutOfRange("Schatten exponent must lie in (0, 2]");
    }
    double acc = 0.0;
    for (double ev : p.eigenvalues) {
        const double clipped = std::clamp(ev, 0.0, 1.0);
        if (std::abs(clipped - ev) > 1e-10) {
            throw Error("eigenvalue outside [0,1] beyond the clipping tolerance");
        }
        const double x = clipped - clipped * clipped;
        if (x > 0.0) acc += std::pow(x, schatten_p / 2.0);
    }
    return acc;
}

double tau_of_delta(double delta) {
    return std::max(1.0 / delta, 1.0 / (1.0 - delta));
}

DeviationCheck deviation_inequality_check(const SpectralProfile& p, double delta, double schatten_p) {
    DeviationCheck r;
    const double trace = std::accumulate(p.eigenvalues.begin(), p.eigenvalues.end(), 0.0);
    r.lhs = std::abs(static_cast<double>(count_above(p, delta)) - trace);
    r.rhs = 2.0 * std::pow(tau_of_delta(delta), schatten_p / 2.0) * hankel_schatten(p, schatten_p);
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

} // namespace speclab
