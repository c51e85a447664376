#ifndef SPECLAB_FOURIER_HPP
#define SPECLAB_FOURIER_HPP

#include <cstddef>
#include <vector>

#include "speclab/bounds.hpp"
#include "speclab/linalg.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

// Cyclic index interval {first, first+1, ..., first+size-1} mod L.
struct CyclicInterval {
    long first = 0;
    std::size_t size = 0;
};

CyclicInterval make_interval(long first, long last, std::size_t length);  // inclusive ends

// T = P_I 1_J P_I on C^L with P_I the frequency cut-off through the unitary
// DFT; the time-domain kernel of P_I is the periodic Dirichlet kernel.
struct ProlateInstance {
    std::size_t length = 0;
    CyclicInterval freq;  // I
    CyclicInterval time;  // J
    Mat op;               // Hermitian, 0 <= T <= 1, trace |I||J|/L
};

ProlateInstance prolate_operator(std::size_t length, CyclicInterval freq, CyclicInterval time);

// The renormalized Dirichlet reproducing kernel on Z_L: |K|^2 between t and
// t' divided by (|I|/L)^2, point mass |I|/L, torus metric. Satisfies the
// unit row-sum normalization.
TorusKernel prolate_kernel(std::size_t length, CyclicInterval freq);

std::vector<std::size_t> interval_indices(const CyclicInterval& iv, std::size_t length);

struct PlungeRow {
    std::size_t length = 0;
    std::size_t size_freq = 0;
    std::size_t size_time = 0;
    double trace = 0.0;
    std::size_t count_half = 0;
    std::size_t plunge = 0;
    double log_regressor = 0.0;  // log(trace / delta)
};

struct PlungeStudy {
    std::vector<PlungeRow> rows;
    std::vector<SpectralProfile> profiles;  // aligned with rows
    double fit_slope = 0.0;                 // least-squares M_delta against log(trace)
    double fit_intercept = 0.0;
    double fit_r2 = 0.0;
};

// One row per (L, size) configuration with |I| = |J| = size; sizes and
// lengths are zipped when equal length, otherwise the full product is run.
PlungeStudy plunge_study(const std::vector<std::size_t>& lengths,
                         const std::vector<std::size_t>& sizes, double delta,
                         unsigned max_threads = 1);

} // namespace speclab

#endif
