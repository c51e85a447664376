#ifndef SPECLAB_BOUNDS_HPP
#define SPECLAB_BOUNDS_HPP

#include <cstddef>
#include <vector>

#include "speclab/frame.hpp"
#include "speclab/lattice.hpp"

namespace speclab {

// Squared kernel magnitudes |K(x,y)|^2 over a finite metric measure space;
// the points, masses and metric come from the attached domain.
struct KernelOnDomain {
    DiscreteDomain domain;
    std::vector<double> k2;  // n x n row-major
    bool normalized = false;

    double at(std::size_t i, std::size_t j) const { return k2[i * domain.size() + j]; }
};

// Same data for a translation-invariant kernel on a separable torus lattice:
// |K|^2 as a function of the coordinate difference.
struct TorusKernel {
    LatticeSpec lattice;       // diagonal generator
    double period = 0.0;       // ambient torus period
    std::vector<int> sizes;    // points per axis
    std::vector<double> q2;    // row-major over difference coordinates
    double mass = 1.0;         // uniform point mass of the background measure
};

KernelOnDomain densify(const TorusKernel& kernel);

KernelOnDomain kernel_from_frame(const FrameSystem& frame);

double log_star(double x);  // max{1, ln x}; throws NonPositiveInput

// N(s) = sum_n sup_x sum_{x' in A_{n,x}} (1 + d(x,x'))^s |K(x,x')|^2 mass(x'),
// with A_0 the closed unit ball and A_n the dyadic annulus (2^{n-1}, 2^n].
double dyadic_decay(const KernelOnDomain& kernel, double s);

// Group-invariant form: single sum from the origin.
double dyadic_decay(const TorusKernel& kernel, double s);

// D = sup_{x'} sum_x exp(alpha d(x,x')^{1/beta}) |K(x,x')|^2 mass(x).
double exp_decay_constant(const KernelOnDomain& kernel, double alpha, double beta);
double exp_decay_constant(const TorusKernel& kernel, double alpha, double beta);

// sum_{x in mask} sum_{y not in mask} |K(x,y)|^2 mass(x) mass(y).
double boundary_interaction(const KernelOnDomain& kernel, const std::vector<std::size_t>& mask);

// Same sum over the torus ground set; mask points are lattice coordinates.
double boundary_interaction(const TorusKernel& kernel, const DiscreteDomain& mask);

struct BoundEntry {
    double value = 0.0;
    double s_star = 0.0;
};

std::vector<double> default_s_grid(double gamma);  // gamma * 2^{k/4}, k = 0..16

// inflation * min over the grid of (tau N(s))^{gamma/s} *
// (log*((tau N(s))^{1/s}))^{1 - gamma/s}; throws AllInfinite when no grid
// point is finite. Powers are evaluated in log space; anything above e^700
// counts as infinite.
BoundEntry rhs_theorem_main(double inflation, double gamma, double tau,
                            const std::vector<double>& s_grid, const std::vector<double>& n_of_s);

// maxgeom * min over the grid of (tau N(s))^{gamma/(s+gamma-1)} *
// (log*((tau N(s))^{1/(s+gamma-1)}))^{(s-1)/(s+gamma-1)}.
BoundEntry rhs_theorem_doubling(double maxgeom, double gamma, double tau,
                                const std::vector<double>& s_grid,
                                const std::vector<double>& n_of_s);

// inflation * (log*(tau D))^{beta gamma} * log*(log*(tau D)).
double rhs_exponential(double inflation, double gamma, double beta, double tau, double d_const);

} // namespace speclab

#endif
