#ifndef SPECLAB_FRAME_HPP
#define SPECLAB_FRAME_HPP

#include <cstddef>
#include <map>
#include <vector>

#include "speclab/lattice.hpp"
#include "speclab/linalg.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

// A finite family of vectors in C^M indexed by a finite lattice domain.
// Construction assembles the frame operator and its bounds; the canonical
// dual family and the omega weights are filled in only when the family
// actually is a frame (bound_lower > 1e-10 * bound_upper).
struct FrameSystem {
    std::size_t ambient_dim = 0;  // M
    DiscreteDomain index_set;     // row-major ordered; one vector per point
    std::vector<Vec> vectors;

    Mat frame_op;  // S = sum phi phi^*
    double bound_lower = 0.0;
    double bound_upper = 0.0;
    bool is_frame = false;

    std::vector<Vec> duals;       // S^{-1} phi
    std::vector<double> omega;    // <phi^d, phi> per index
    double omega_sup = 0.0;       // Theta
    double omega_inf = 0.0;       // vartheta
    double c_phi = 0.0;           // Theta^8 / (vartheta^7 |Lambda|)

    std::size_t size() const { return vectors.size(); }
};

FrameSystem build_frame(std::size_t ambient_dim, DiscreteDomain index_set,
                        std::vector<Vec> vectors);

struct FrameBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool is_frame = false;
};

Mat frame_operator(const FrameSystem& frame);
FrameBounds frame_bounds(const FrameSystem& frame);
const std::vector<Vec>& canonical_dual(const FrameSystem& frame);  // NotAFrame when invalid

struct OmegaWeights {
    std::vector<double> omega;
    double sup = 0.0;   // Theta
    double inf = 0.0;   // vartheta
    double c_phi = 0.0;
};

OmegaWeights omega_weights(const FrameSystem& frame);

// K(l, l') = <phi^d_{l'}, phi_l> / sqrt(omega_l omega_{l'}), Hermitian with
// unit diagonal; acts as the reproducing projection on the omega-weighted
// sequence space.
struct CrossGramKernel {
    Mat kernel;
    std::vector<double> omega;
};

CrossGramKernel cross_gram_kernel(const FrameSystem& frame);

// Positions (in the frame's index order) of the mask points; throws
// MaskNotSubset if the mask has points outside the index set.
std::vector<std::size_t> mask_positions(const FrameSystem& frame, const DiscreteDomain& mask);

// M_{phi,Omega} = sum_{l in mask} phi^d_l phi_l^*, assembled on C^M.
Mat frame_multiplier(const FrameSystem& frame, const DiscreteDomain& mask);

// Hermitian matrix S^{-1/2} (sum_{l in mask} phi_l phi_l^*) S^{-1/2}; same
// spectrum as frame_multiplier.
Mat multiplier_hermitian(const FrameSystem& frame, const DiscreteDomain& mask);

// Hermitian form of T_{phi,Omega} on the omega-weighted sequence space:
// C 1_mask C with C = Phi^* S^{-1} Phi. Same nonzero spectrum as the
// multiplier; trace equals the omega-mass of the mask.
Mat concentration_operator(const FrameSystem& frame, const DiscreteDomain& mask);

// Weighted measure of the mask: sum of omega over mask indices.
double mu_weighted(const FrameSystem& frame, const DiscreteDomain& mask);

// u(v) = max over index pairs at difference v of |K(l, l')|.
std::map<std::vector<int>, double> decay_profile(const FrameSystem& frame);

} // namespace speclab

#endif
