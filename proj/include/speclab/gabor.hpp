#ifndef SPECLAB_GABOR_HPP
#define SPECLAB_GABOR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "speclab/frame.hpp"
#include "speclab/lattice.hpp"
#include "speclab/linalg.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

// (pi(x, xi) f)[t] = f[(t - x) mod L] exp(2 pi i xi t / L)
Vec tf_shift(long x, long xi, const Vec& f);

// V_g f(n, m) = <f, pi(n, m) g>, returned as an L x L matrix (time index n
// along rows, frequency index m along columns).
Mat stft(const Vec& g, const Vec& f);

Vec make_gauss_window(std::size_t length);
Vec make_boxcar_window(std::size_t length, std::size_t width);
Vec normalized_window(Vec g);  // l2-normalizes, rejects zero vectors

// Finite periodic Gabor system over the lattice {(na, mb)} in Z_L x Z_L.
// The index domain carries the torus metric and point mass a b / L.
struct GaborSystem {
    std::size_t length = 0;     // L
    std::size_t time_step = 1;  // a
    std::size_t freq_step = 1;  // b
    double redundancy = 1.0;    // L / (a b)
    Vec window;                 // unit l2 norm
    Vec dual;                   // S^{-1} g (frame validated)
    double wexler_raz = 0.0;    // <g, g^d>, equals ab/L for a frame
    FrameSystem frame;
};

// Throws BadDivisor if a or b does not divide L, NotAFrame if the system
// fails the frame condition.
GaborSystem build_gabor_frame(std::size_t length, std::size_t time_step, std::size_t freq_step,
                              const Vec& window);

const Vec& dual_window(const GaborSystem& system);

// Masks over the system's time-frequency lattice.
DiscreteDomain tf_mask_full(const GaborSystem& system);
DiscreteDomain tf_mask_from_shape(const GaborSystem& system, const ContinuousDomain& shape);
DiscreteDomain tf_mask_from_points(const GaborSystem& system,
                                   const std::vector<std::vector<int>>& points);

Mat gabor_multiplier(const GaborSystem& system, const DiscreteDomain& mask);
Mat gabor_multiplier_hermitian(const GaborSystem& system, const DiscreteDomain& mask);

// |<g^d, pi(v) g>|^2 per lattice difference v, row-major over (n, m). The
// kernel magnitude between lattice points depends only on their difference.
std::vector<double> gabor_kernel_q2(const GaborSystem& system);

// sum over mask x complement of the squared kernel magnitudes (the
// omega-weighted boundary interaction of the cross-Gram kernel).
double gabor_boundary_interaction(const GaborSystem& system, const DiscreteDomain& mask);

// A_Omega = sum_n |nu_n|^2 (1/L) sum_{z in mask} (pi(z) g_n)(pi(z) g_n)^*
// with the mask on the full torus Z_L x Z_L.
Mat mixed_state_multiplier(const std::vector<Vec>& windows, const std::vector<cplx>& weights,
                           const std::vector<std::vector<int>>& mask, std::size_t length);

struct RefinementRung {
    std::size_t time_step = 0;
    std::size_t freq_step = 0;
    bool frame_ok = false;
    double mu = 0.0;
    double wexler_raz = 0.0;
    SpectralProfile profile;         // multiplier spectrum
    std::vector<double> n_of_s;      // dyadic decay on the s-grid
    double n_gamma = 0.0;            // N at s = gamma
    double inflation = 0.0;          // mask inflation constant at gamma = 2
    double mask_perimeter = 0.0;     // lattice perimeter of the mask
    double iota = 0.0;               // fineness of the rung's lattice
    std::size_t mask_points = 0;
    double boundary_interaction = 0.0;
    double rhs_main = 0.0;
    double rhs_s_star = 0.0;
    double rhs_doubling = 0.0;
};

struct RefinementRow {
    std::size_t time_step = 0;
    std::size_t freq_step = 0;
    double delta = 0.0;
    std::size_t count = 0;
    double mu = 0.0;
    double deviation = 0.0;
    std::optional<std::size_t> plunge;  // only for delta < 1/2
    double n_gamma = 0.0;
    double rhs_main = 0.0;
};

struct RefinementResult {
    std::vector<RefinementRung> rungs;  // ladder order; failed rungs flagged
    std::vector<RefinementRow> rows;    // one per (valid rung, delta)
};

// Discretizes the shape on each rung's lattice and reports spectral counts,
// deviations, plunge sizes and bound ingredients per rung. Rungs that fail
// the frame condition are flagged, not fatal. max_threads <= 1 runs serially.
RefinementResult refinement_study(std::size_t length, const Vec& window,
                                  const ContinuousDomain& shape,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& ladder,
                                  const std::vector<double>& deltas,
                                  const std::vector<double>& s_grid, unsigned max_threads = 1);

} // namespace speclab

#endif
