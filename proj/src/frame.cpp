#include "speclab/frame.hpp"

#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"

namespace speclab {

FrameSystem build_frame(std::size_t ambient_dim, DiscreteDomain index_set,
                        std::vector<Vec> vectors) {
    if (vectors.empty()) throw ValidationError("a frame needs at least one vector");
    if (index_set.size() != vectors.size()) {
        throw ValidationError("index set and vector family sizes differ");
    }
    for (const Vec& v : vectors) {
        if (v.size() != ambient_dim) throw ValidationError("vector dimension mismatch");
        if (norm2(v) == 0.0) throw ValidationError("frame vectors must be nonzero");
    }

    FrameSystem f;
    f.ambient_dim = ambient_dim;
    f.index_set = std::move(index_set);
    f.vectors = std::move(vectors);

    f.frame_op = Mat(ambient_dim, ambient_dim);
    for (const Vec& v : f.vectors) add_outer(f.frame_op, v, v);
    hermitize(f.frame_op);

    const auto eig = jacobi_eigh(f.frame_op, false).eigenvalues;
    f.bound_upper = eig.front();
    f.bound_lower = eig.back();
    f.is_frame = f.bound_lower > 1e-10 * f.bound_upper;

    if (f.is_frame) {
        const Cholesky chol(f.frame_op);
        f.duals.reserve(f.size());
        f.omega.reserve(f.size());
        for (const Vec& v : f.vectors) {
            Vec d = chol.solve(v);
            const double w = inner(d, v).real();
            if (w <= 1e-12) throw NonPositiveOmega("degenerate frame element: omega <= 1e-12");
            f.duals.push_back(std::move(d));
            f.omega.push_back(w);
        }
        f.omega_sup = *std::max_element(f.omega.begin(), f.omega.end());
        f.omega_inf = *std::min_element(f.omega.begin(), f.omega.end());
        // The covolume in measure units is the index domain's point mass.
        f.c_phi = std::pow(f.omega_sup, 8.0) /
                  (std::pow(f.omega_inf, 7.0) * f.index_set.mass);
    }
    return f;
}

Mat frame_operator(const FrameSystem& frame) { return frame.frame_op; }

FrameBounds frame_bounds(const FrameSystem& frame) {
    return FrameBounds{frame.bound_lower, frame.bound_upper, frame.is_frame};
}

const std::vector<Vec>& canonical_dual(const FrameSystem& frame) {
    if (!frame.is_frame) throw NotAFrame("canonical dual requires a valid frame");
    return frame.duals;
}

OmegaWeights omega_weights(const FrameSystem& frame) {
    if (!frame.is_frame) throw NotAFrame("omega weights require a valid frame");
    return OmegaWeights{frame.omega, frame.omega_sup, frame.omega_inf, frame.c_phi};
}

CrossGramKernel cross_gram_kernel(const FrameSystem& frame) {
    if (!frame.is_frame) throw NotAFrame("cross-Gram kernel requires a valid frame");
    const std::size_t n = frame.size();
    CrossGramKernel out;
    out.omega = frame.omega;
    out.kernel = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // <phi^d_j, phi_i> normalized by the weight geometric mean
            out.kernel(i, j) =
                inner(frame.duals[j], frame.vectors[i]) / std::sqrt(frame.omega[i] * frame.omega[j]);
        }
    }
    hermitize(out.kernel);
    return out;
}

std::vector<std::size_t> mask_positions(const FrameSystem& frame, const DiscreteDomain& mask) {
    std::vector<std::size_t> pos;
    pos.reserve(mask.size());
    for (const auto& k : mask.points) {
        const std::size_t i = frame.index_set.index_of(k);
        if (i == DiscreteDomain::npos) {
            throw MaskNotSubset("mask point outside the frame index set");
        }
        pos.push_back(i);
    }
    return pos;
}

Mat frame_multiplier(const FrameSystem& frame, const DiscreteDomain& mask) {
    if (!frame.is_frame) throw NotAFrame("frame multiplier requires a valid frame");
    const auto pos = mask_positions(frame, mask);
    Mat m(frame.ambient_dim, frame.ambient_dim);
    for (std::size_t i : pos) add_outer(m, frame.duals[i], frame.vectors[i]);
    return m;
}

namespace {

Mat inv_sqrt(const Mat& s) {
    const auto eig = jacobi_eigh(s, true);
    const std::size_t n = s.rows();
    Mat r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                acc += eig.vectors(i, k) * std::conj(eig.vectors(j, k)) /
                       std::sqrt(eig.eigenvalues[k]);
            }
            r(i, j) = acc;
        }
    }
    hermitize(r);
    return r;
}

} // namespace

Mat multiplier_hermitian(const FrameSystem& frame, const DiscreteDomain& mask) {
    if (!frame.is_frame) throw NotAFrame("frame multiplier requires a valid frame");
    const auto pos = mask_positions(frame, mask);
    Mat a(frame.ambient_dim, frame.ambient_dim);
    for (std::size_t i : pos) add_outer(a, frame.vectors[i], frame.vectors[i]);
    hermitize(a);
    const Mat si = inv_sqrt(frame.frame_op);
    Mat t = si * a * si;
    hermitize(t);
    return t;
}

Mat concentration_operator(const FrameSystem& frame, const DiscreteDomain& mask) {
    if (!frame.is_frame) throw NotAFrame("concentration operator requires a valid frame");
    const auto pos = mask_positions(frame, mask);
    std::vector<char> in_mask(frame.size(), 0);
    for (std::size_t i : pos) in_mask[i] = 1;

    // C = Phi^* S^{-1} Phi, the Hermitian form of the reproducing projection.
    const std::size_t n = frame.size();
    Mat c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c(i, j) = inner(frame.duals[j], frame.vectors[i]);
    hermitize(c);

    Mat t(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                if (!in_mask[k]) continue;
                acc += c(i, k) * c(k, j);
            }
            t(i, j) = acc;
        }
    }
    hermitize(t);
    return t;
}

double mu_weighted(const FrameSystem& frame, const DiscreteDomain& mask) {
    if (!frame.is_frame) throw NotAFrame("weighted measure requires a valid frame");
    const auto pos = mask_positions(frame, mask);
    double s = 0.0;
    for (std::size_t i : pos) s += frame.omega[i];
    return s;
}

std::map<std::vector<int>, double> decay_profile(const FrameSystem& frame) {
    if (!frame.is_frame) throw NotAFrame("decay profile requires a valid frame");
    const std::size_t n = frame.size();
    const int d = frame.index_set.lattice.dim;
    std::map<std::vector<int>, double> u;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<int> diff(d);
            for (int c = 0; c < d; ++c)
                diff[c] = frame.index_set.points[i][c] - frame.index_set.points[j][c];
            const double val = std::abs(inner(frame.duals[j], frame.vectors[i])) /
                               std::sqrt(frame.omega[i] * frame.omega[j]);
            auto [it, inserted] = u.emplace(std::move(diff), val);
            if (!inserted) it->second = std::max(it->second, val);
        }
    }
    return u;
}

} // namespace speclab
