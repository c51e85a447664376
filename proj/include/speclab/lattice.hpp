#ifndef SPECLAB_LATTICE_HPP
#define SPECLAB_LATTICE_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace speclab {

struct SingularData {
    std::vector<double> sigma;   // ascending
    double spectral_norm = 0.0;  // largest singular value
    double condition = 1.0;      // sigma_d / sigma_1
    double covolume = 0.0;       // |det A| = product of singular values
};

// Requires |det A| > 1e-12, throws SingularGenerator otherwise.
SingularData singular_data(int dim, const std::vector<double>& gen);

// Full-rank lattice A Z^d with its derived spectral quantities.
struct LatticeSpec {
    int dim = 1;
    std::vector<double> gen;      // d x d row-major; ambient point = gen * k
    std::vector<double> gen_inv;  // d x d row-major
    std::vector<double> sigma;    // ascending
    double covolume = 1.0;
    double spectral_norm = 1.0;
    double condition = 1.0;
    double iota = 1.0;  // condition^{2d} * max{1, norm^d}

    static LatticeSpec from_generator(int dim, const std::vector<double>& gen);
    static LatticeSpec integer(int dim);          // Z^d
    static LatticeSpec scaled(int dim, double h); // h Z^d
    static LatticeSpec diagonal(const std::vector<double>& steps);

    std::vector<double> ambient(const std::vector<int>& k) const;
};

double isotropic_fineness(const LatticeSpec& lattice);

// Finite set of lattice points with a uniform point mass (defaults to the
// covolume) and optional per-point weights. A positive torus_period puts the
// domain on the torus with wrap-around distances; this requires a diagonal
// generator whose steps divide the period.
struct DiscreteDomain {
    LatticeSpec lattice;
    std::vector<std::vector<int>> points;  // sorted lexicographically, duplicate-free
    double mass = 1.0;
    std::vector<double> weights;  // empty, or one positive weight per point
    double torus_period = 0.0;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool contains(const std::vector<int>& k) const;
    std::size_t index_of(const std::vector<int>& k) const;  // npos if absent
    double measure() const;                                 // sum of weights, or mass * #points
    double point_weight(std::size_t i) const { return weights.empty() ? mass : weights[i]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

DiscreteDomain make_domain(const LatticeSpec& lattice, std::vector<std::vector<int>> points,
                           double mass = -1.0, double torus_period = 0.0);

// Wrap-aware squared Euclidean distance between ambient points.
double ambient_dist2(const DiscreteDomain& dom, const std::vector<double>& x,
                     const std::vector<double>& y);

struct ContinuousDomain {
    enum class Shape { Rect, Disk, Polygon };
    Shape shape = Shape::Rect;
    int dim = 2;
    std::vector<double> lo, hi;                   // rect
    std::vector<double> center;                   // disk
    double radius = 0.0;                          // disk
    std::vector<std::array<double, 2>> vertices;  // simple polygon, dim 2
    double kappa_reg = 1.0;                       // user-supplied regularity constant
    double eta = 1.0;                             // user-supplied regularity scale

    static ContinuousDomain rect(std::vector<double> lo, std::vector<double> hi);
    static ContinuousDomain disk(std::vector<double> center, double radius);
    static ContinuousDomain polygon(std::vector<std::array<double, 2>> vertices);

    bool contains(const std::vector<double>& x) const;  // closed domain
};

// Lattice points inside the closed domain, enumerated in row-major order of
// integer coordinates; mass per point is the covolume.
DiscreteDomain discretize(const ContinuousDomain& domain, const LatticeSpec& lattice);

// {x in Omega : the integer coordinates of x have a unit neighbor outside}.
DiscreteDomain discrete_boundary(const DiscreteDomain& domain);

// ||A||^{-1} * mass * #boundary points.
double lattice_perimeter(const DiscreteDomain& domain);

// sup over n in {0..n_max}, E in {Omega, Omega^c} of
// 2^{-gamma (n-1)} * mu({x in E^c : d(x, E) <= 2^n}), ambient distances.
double inflation_constant(const DiscreteDomain& domain, double gamma);

double doubling_ratio(const LatticeSpec& lattice, const std::vector<std::vector<int>>& centers,
                      const std::vector<double>& radii);

double continuous_perimeter(const ContinuousDomain& domain);

struct SandwichReport {
    double lower = 0.0;  // lattice perimeter
    double upper = 0.0;  // condition^{2d} * lattice perimeter
    double proxy = 0.0;  // unit-neighbor crossing-edge count, same normalization
    double slack = 10.0;
    bool within_slack = true;
};

SandwichReport perimeter_sandwich_check(const DiscreteDomain& domain, double slack = 10.0);

} // namespace speclab

#endif
