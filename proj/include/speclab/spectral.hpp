#ifndef SPECLAB_SPECTRAL_HPP
#define SPECLAB_SPECTRAL_HPP

#include <cstddef>
#include <vector>

#include "speclab/linalg.hpp"

namespace speclab {

// Eigenvalues of a Hermitian operator, sorted descending, together with the
// trace of the source matrix computed independently from its diagonal.
struct SpectralProfile {
    std::vector<double> eigenvalues;  // descending
    double source_trace = 0.0;
    std::size_t dimension = 0;
};

struct EigResult {
    std::vector<double> eigenvalues;  // descending
    Mat vectors;                      // columns follow the eigenvalue order; empty if not requested
};

// Cyclic Jacobi diagonalization. Rotations sweep (p,q) in row-major order
// until the off-diagonal Frobenius mass drops below 1e-12 * ||A||_F, capped
// at 100 sweeps. Throws NotHermitian / NoConvergence.
EigResult jacobi_eigh(const Mat& a, bool want_vectors);

SpectralProfile hermitian_eigenvalues(const Mat& a);

// #{lambda > delta}; the inequality is strict.
std::size_t count_above(const SpectralProfile& p, double delta);

// #{delta < lambda < 1 - delta}, delta in (0, 1/2).
std::size_t plunge_count(const SpectralProfile& p, double delta);

double spectral_deviation(const SpectralProfile& p, double delta, double target);

// Schatten p-quasi-norm of the associated Hankel operator, raised to p:
// sum_i (lambda_i - lambda_i^2)^{p/2} with eigenvalues clipped to [0,1].
// p in (0,2]; clips larger than 1e-10 are rejected.
double hankel_schatten(const SpectralProfile& p, double schatten_p);

struct DeviationCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// lhs = |count_above(delta) - trace|, rhs = 2 tau^{p/2} ||H||_{S_p}^p with
// tau = max{1/delta, 1/(1-delta)}.
DeviationCheck deviation_inequality_check(const SpectralProfile& p, double delta, double schatten_p);

double tau_of_delta(double delta);

} // namespace speclab

#endif
