#include "speclab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "speclab/errors.hpp"
#include "speclab/linalg.hpp"
#include "speclab/spectral.hpp"

namespace speclab {

namespace {

std::vector<double> invert(int d, const std::vector<double>& a) {
    // Gauss-Jordan with partial pivoting; d stays tiny.
    std::vector<double> m = a;
    std::vector<double> inv(d * d, 0.0);
    for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(m[r * d + col]) > std::abs(m[piv * d + col])) piv = r;
        if (std::abs(m[piv * d + col]) < 1e-14) {
            throw SingularGenerator("generator matrix is numerically singular");
        }
        if (piv != col) {
            for (int j = 0; j < d; ++j) {
                std::swap(m[piv * d + j], m[col * d + j]);
                std::swap(inv[piv * d + j], inv[col * d + j]);
            }
        }
        const double p = m[col * d + col];
        for (int j = 0; j < d; ++j) {
            m[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = m[r * d + col];
            if (f == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                m[r * d + j] -= f * m[col * d + j];
                inv[r * d + j] -= f * inv[col * d + j];
            }
        }
    }
    return inv;
}

double wrap_delta(double delta, double period) {
    double r = std::fmod(std::abs(delta), period);
    return std::min(r, period - r);
}

// Integer coordinates of every lattice point of the torus ground set, in
// row-major order. Requires a diagonal generator with steps dividing the
// period.
std::vector<std::vector<int>> torus_ground(const LatticeSpec& lat, double period) {
    const int d = lat.dim;
    std::vector<int> sizes(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i != j && lat.gen[i * d + j] != 0.0) {
                throw ValidationError("torus domains require a diagonal generator");
            }
        }
        const double step = lat.gen[i * d + i];
        const double q = period / step;
        sizes[i] = static_cast<int>(std::llround(q));
        if (std::abs(q - sizes[i]) > 1e-9 || sizes[i] <= 0) {
            throw ValidationError("torus period is not a multiple of the lattice step");
        }
    }
    std::vector<std::vector<int>> ground;
    std::vector<int> k(d, 0);
    while (true) {
        ground.push_back(k);
        int i = d - 1;
        while (i >= 0 && ++k[i] == sizes[i]) k[i--] = 0;
        if (i < 0) break;
    }
    return ground;
}

std::pair<std::vector<int>, std::vector<int>> integer_bbox(const DiscreteDomain& dom) {
    const int d = dom.lattice.dim;
    std::vector<int> lo(d, 0), hi(d, 0);
    if (dom.points.empty()) return {lo, hi};
    lo = hi = dom.points.front();
    for (const auto& k : dom.points) {
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], k[i]);
            hi[i] = std::max(hi[i], k[i]);
        }
    }
    return {lo, hi};
}

void for_each_in_box(const std::vector<int>& lo, const std::vector<int>& hi,
                     const std::function<void(const std::vector<int>&)>& fn) {
    const int d = static_cast<int>(lo.size());
    std::vector<int> k = lo;
    while (true) {
        fn(k);
        int i = d - 1;
        while (i >= 0 && ++k[i] > hi[i]) { k[i] = lo[i]; --i; }
        if (i < 0) break;
    }
}

double dist2_points(const DiscreteDomain& dom, const std::vector<int>& a, const std::vector<int>& b) {
    const auto xa = dom.lattice.ambient(a);
    const auto xb = dom.lattice.ambient(b);
    return ambient_dist2(dom, xa, xb);
}

} // namespace

SingularData singular_data(int dim, const std::vector<double>& gen) {
    if (dim <= 0 || gen.size() != static_cast<std::size_t>(dim * dim)) {
        throw ValidationError("generator must be a d x d matrix with d >= 1");
    }
    Mat gram(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) s += gen[k * dim + i] * gen[k * dim + j];
            gram(i, j) = s;
        }
    }
    auto eig = jacobi_eigh(gram, false).eigenvalues;  // descending
    SingularData out;
    out.sigma.resize(dim);
    double det = 1.0;
    for (int i = 0; i < dim; ++i) {
        const double ev = std::max(eig[dim - 1 - i], 0.0);
        out.sigma[i] = std::sqrt(ev);
        det *= out.sigma[i];
    }
    if (!(det > 1e-12)) {
        throw SingularGenerator("|det A| below tolerance 1e-12");
    }
    out.spectral_norm = out.sigma.back();
    out.condition = out.sigma.back() / out.sigma.front();
    out.covolume = det;
    return out;
}

LatticeSpec LatticeSpec::from_generator(int dim, const std::vector<double>& gen) {
    const SingularData sd = singular_data(dim, gen);
    LatticeSpec lat;
    lat.dim = dim;
    lat.gen = gen;
    lat.gen_inv = invert(dim, gen);
    lat.sigma = sd.sigma;
    lat.covolume = sd.covolume;
    lat.spectral_norm = sd.spectral_norm;
    lat.condition = sd.condition;
    lat.iota = std::pow(lat.condition, 2.0 * dim) *
               std::max(1.0, std::pow(lat.spectral_norm, static_cast<double>(dim)));
    return lat;
}

LatticeSpec LatticeSpec::integer(int dim) { return scaled(dim, 1.0); }

LatticeSpec LatticeSpec::scaled(int dim, double h) {
    std::vector<double> gen(dim * dim, 0.0);
    for (int i = 0; i < dim; ++i) gen[i * dim + i] = h;
    return from_generator(dim, gen);
}

LatticeSpec LatticeSpec::diagonal(const std::vector<double>& steps) {
    const int d = static_cast<int>(steps.size());
    std::vector<double> gen(d * d, 0.0);
    for (int i = 0; i < d; ++i) gen[i * d + i] = steps[i];
    return from_generator(d, gen);
}

std::vector<double> LatticeSpec::ambient(const std::vector<int>& k) const {
    std::vector<double> x(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += gen[i * dim + j] * k[j];
        x[i] = s;
    }
    return x;
}

double isotropic_fineness(const LatticeSpec& lattice) { return lattice.iota; }

bool DiscreteDomain::contains(const std::vector<int>& k) const {
    return std::binary_search(points.begin(), points.end(), k);
}

std::size_t DiscreteDomain::index_of(const std::vector<int>& k) const {
    auto it = std::lower_bound(points.begin(), points.end(), k);
    if (it == points.end() || *it != k) return npos;
    return static_cast<std::size_t>(it - points.begin());
}

double DiscreteDomain::measure() const {
    if (weights.empty()) return mass * static_cast<double>(points.size());
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

DiscreteDomain make_domain(const LatticeSpec& lattice, std::vector<std::vector<int>> points,
                           double mass, double torus_period) {
    DiscreteDomain dom;
    dom.lattice = lattice;
    std::sort(points.begin(), points.end());
    if (std::adjacent_find(points.begin(), points.end()) != points.end()) {
        throw ValidationError("domain point set contains duplicates");
    }
    dom.points = std::move(points);
    dom.mass = mass > 0.0 ? mass : lattice.covolume;
    dom.torus_period = torus_period;
    if (torus_period > 0.0) torus_ground(lattice, torus_period);  // validates
    return dom;
}

double ambient_dist2(const DiscreteDomain& dom, const std::vector<double>& x,
                     const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double delta = x[i] - y[i];
        if (dom.torus_period > 0.0) delta = wrap_delta(delta, dom.torus_period);
        s += delta * delta;
    }
    return s;
}

ContinuousDomain ContinuousDomain::rect(std::vector<double> lo, std::vector<double> hi) {
    ContinuousDomain c;
    c.shape = Shape::Rect;
    c.dim = static_cast<int>(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(hi[i] > lo[i])) throw ValidationError("degenerate rectangle");
    }
    c.lo = std::move(lo);
    c.hi = std::move(hi);
    return c;
}

ContinuousDomain ContinuousDomain::disk(std::vector<double> center, double radius) {
    ContinuousDomain c;
    c.shape = Shape::Disk;
    c.dim = static_cast<int>(center.size());
    if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
    c.center = std::move(center);
    c.radius = radius;
    return c;
}

ContinuousDomain ContinuousDomain::polygon(std::vector<std::array<double, 2>> vertices) {
    ContinuousDomain c;
    c.shape = Shape::Polygon;
    c.dim = 2;
    if (vertices.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
    // Simplicity check: no two non-adjacent edges intersect.
    const std::size_t n = vertices.size();
    auto seg = [&](std::size_t i) {
        return std::pair(vertices[i], vertices[(i + 1) % n]);
    };
    auto orient = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                     const std::array<double, 2>& c2) {
        return (b[0] - a[0]) * (c2[1] - a[1]) - (b[1] - a[1]) * (c2[0] - a[0]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            auto [a, b] = seg(i);
            auto [c2, d2] = seg(j);
            const double o1 = orient(a, b, c2), o2 = orient(a, b, d2);
            const double o3 = orient(c2, d2, a), o4 = orient(c2, d2, b);
            if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) {
                throw ValidationError("polygon is self-intersecting");
            }
        }
    }
    c.vertices = std::move(vertices);
    return c;
}

bool ContinuousDomain::contains(const std::vector<double>& x) const {
    switch (shape) {
        case Shape::Rect: {
            for (int i = 0; i < dim; ++i)
                if (x[i] < lo[i] || x[i] > hi[i]) return false;
            return true;
        }
        case Shape::Disk: {
            double s = 0.0;
            for (int i = 0; i < dim; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
            return s <= radius * radius;
        }
        case Shape::Polygon: {
            const double px = x[0], py = x[1];
            const std::size_t n = vertices.size();
            // Points on an edge count as inside (closed domain).
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = vertices[i];
                const auto& b = vertices[(i + 1) % n];
                const double vx = b[0] - a[0], vy = b[1] - a[1];
                const double wx = px - a[0], wy = py - a[1];
                const double len2 = vx * vx + vy * vy;
                const double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
                const double dx = wx - t * vx, dy = wy - t * vy;
                if (dx * dx + dy * dy <= 1e-24) return true;
            }
            bool in = false;
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const auto& vi = vertices[i];
                const auto& vj = vertices[j];
                if ((vi[1] > py) != (vj[1] > py)) {
                    const double xint = vj[0] + (py - vj[1]) / (vi[1] - vj[1]) * (vi[0] - vj[0]);
                    if (px < xint) in = !in;
                }
            }
            return in;
        }
    }
    return false;
}

DiscreteDomain discretize(const ContinuousDomain& domain, const LatticeSpec& lattice) {
    const int d = lattice.dim;
    // Ambient bounding box of the shape.
    std::vector<double> blo(d), bhi(d);
    switch (domain.shape) {
        case ContinuousDomain::Shape::Rect:
            blo = domain.lo;
            bhi = domain.hi;
            break;
        case ContinuousDomain::Shape::Disk:
            for (int i = 0; i < d; ++i) {
                blo[i] = domain.center[i] - domain.radius;
                bhi[i] = domain.center[i] + domain.radius;
            }
            break;
        case ContinuousDomain::Shape::Polygon:
            blo = {domain.vertices[0][0], domain.vertices[0][1]};
            bhi = blo;
            for (const auto& v : domain.vertices) {
                blo[0] = std::min(blo[0], v[0]);
                blo[1] = std::min(blo[1], v[1]);
                bhi[0] = std::max(bhi[0], v[0]);
                bhi[1] = std::max(bhi[1], v[1]);
            }
            break;
    }
    // Map the box corners through A^{-1}; the integer hull of the images
    // bounds every candidate coordinate.
    std::vector<int> klo(d), khi(d);
    std::vector<double> corner(d);
    bool first = true;
    std::vector<double> mn(d), mx(d);
    for (int mask = 0; mask < (1 << d); ++mask) {
        for (int i = 0; i < d; ++i) corner[i] = (mask >> i) & 1 ? bhi[i] : blo[i];
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += lattice.gen_inv[i * d + j] * corner[j];
            if (first) {
                mn[i] = mx[i] = s;
            } else {
                mn[i] = std::min(mn[i], s);
                mx[i] = std::max(mx[i], s);
            }
        }
        first = false;
    }
    for (int i = 0; i < d; ++i) {
        klo[i] = static_cast<int>(std::floor(mn[i])) - 1;
        khi[i] = static_cast<int>(std::ceil(mx[i])) + 1;
    }
    std::vector<std::vector<int>> pts;
    for_each_in_box(klo, khi, [&](const std::vector<int>& k) {
        if (domain.contains(lattice.ambient(k))) pts.push_back(k);
    });
    return make_domain(lattice, std::move(pts));
}

DiscreteDomain discrete_boundary(const DiscreteDomain& domain) {
    const int d = domain.lattice.dim;
    std::vector<int> sizes;
    if (domain.torus_period > 0.0) {
        for (int i = 0; i < d; ++i) {
            sizes.push_back(static_cast<int>(
                std::llround(domain.torus_period / domain.lattice.gen[i * d + i])));
        }
    }
    std::vector<std::vector<int>> bd;
    for (const auto& k : domain.points) {
        bool on_boundary = false;
        for (int i = 0; i < d && !on_boundary; ++i) {
            for (int step : {-1, +1}) {
                std::vector<int> nb = k;
                nb[i] += step;
                if (!sizes.empty()) nb[i] = ((nb[i] % sizes[i]) + sizes[i]) % sizes[i];
                if (!domain.contains(nb)) {
                    on_boundary = true;
                    break;
                }
            }
        }
        if (on_boundary) bd.push_back(k);
    }
    DiscreteDomain out = domain;
    out.points = std::move(bd);
    out.weights.clear();
    return out;
}

double lattice_perimeter(const DiscreteDomain& domain) {
    const DiscreteDomain bd = discrete_boundary(domain);
    return (domain.mass * static_cast<double>(bd.size())) / domain.lattice.spectral_norm;
}

double inflation_constant(const DiscreteDomain& domain, double gamma) {
    if (domain.empty()) return 0.0;
    const int d = domain.lattice.dim;
    const double sigma1 = domain.lattice.sigma.front();

    // Ambient diameter, wrap-aware.
    double diam2 = 0.0;
    std::vector<std::vector<double>> amb(domain.size());
    for (std::size_t i = 0; i < domain.size(); ++i) amb[i] = domain.lattice.ambient(domain.points[i]);
    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i + 1; j < domain.size(); ++j)
            diam2 = std::max(diam2, ambient_dist2(domain, amb[i], amb[j]));
    const double diam = std::sqrt(diam2);
    const int n_max = static_cast<int>(std::ceil(std::log2(diam + 2.0))) + 2;

    std::vector<std::vector<int>> ground;
    if (domain.torus_period > 0.0) ground = torus_ground(domain.lattice, domain.torus_period);

    const auto [blo, bhi] = integer_bbox(domain);

    double best = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double radius = std::exp2(static_cast<double>(n));
        const double r2 = radius * radius;
        const int pad = static_cast<int>(std::ceil(radius / sigma1)) + 1;

        // Strip outside the domain: complement points within `radius` of it.
        std::size_t outer_count = 0;
        auto visit_candidate = [&](const std::vector<int>& k) {
            if (domain.contains(k)) return;
            const auto x = domain.lattice.ambient(k);
            for (std::size_t i = 0; i < amb.size(); ++i) {
                if (ambient_dist2(domain, x, amb[i]) <= r2) {
                    ++outer_count;
                    return;
                }
            }
        };
        if (!ground.empty()) {
            for (const auto& k : ground) visit_candidate(k);
        } else {
            std::vector<int> lo(d), hi(d);
            for (int i = 0; i < d; ++i) {
                lo[i] = blo[i] - pad;
                hi[i] = bhi[i] + pad;
            }
            for_each_in_box(lo, hi, visit_candidate);
        }

        // Strip inside the domain: points within `radius` of the complement.
        double inner_mass = 0.0;
        for (std::size_t i = 0; i < domain.size(); ++i) {
            bool in_strip = false;
            if (!ground.empty()) {
                for (const auto& k : ground) {
                    if (domain.contains(k)) continue;
                    if (dist2_points(domain, domain.points[i], k) <= r2) {
                        in_strip = true;
                        break;
                    }
                }
            } else {
                const auto& kp = domain.points[i];
                std::vector<int> lo(d), hi(d);
                for (int j = 0; j < d; ++j) {
                    lo[j] = kp[j] - pad;
                    hi[j] = kp[j] + pad;
                }
                std::vector<int> k = lo;
                bool done = false;
                while (!done) {
                    if (!domain.contains(k) && dist2_points(domain, kp, k) <= r2) {
                        in_strip = true;
                        break;
                    }
                    int j = d - 1;
                    while (j >= 0 && ++k[j] > hi[j]) { k[j] = lo[j]; --j; }
                    if (j < 0) done = true;
                }
            }
            if (in_strip) inner_mass += domain.point_weight(i);
        }

        const double factor = std::exp2(-gamma * (n - 1));
        best = std::max(best, factor * (static_cast<double>(outer_count) * domain.mass));
        best = std::max(best, factor * inner_mass);
    }
    return best;
}

double doubling_ratio(const LatticeSpec& lattice, const std::vector<std::vector<int>>& centers,
                      const std::vector<double>& radii) {
    const int d = lattice.dim;
    const double sigma1 = lattice.sigma.front();
    double worst = 0.0;
    for (const auto& c : centers) {
        const auto xc = lattice.ambient(c);
        for (double r : radii) {
            if (!(r > 0.0)) throw ValidationError("doubling radius must be positive");
            auto count_ball = [&](double rad) {
                const int pad = static_cast<int>(std::ceil(rad / sigma1)) + 1;
                std::vector<int> lo(d), hi(d);
                for (int i = 0; i < d; ++i) {
                    lo[i] = c[i] - pad;
                    hi[i] = c[i] + pad;
                }
                std::size_t cnt = 0;
                for_each_in_box(lo, hi, [&](const std::vector<int>& k) {
                    const auto x = lattice.ambient(k);
                    double s = 0.0;
                    for (int i = 0; i < d; ++i) s += (x[i] - xc[i]) * (x[i] - xc[i]);
                    if (s <= rad * rad) ++cnt;
                });
                return cnt;
            };
            const std::size_t small = std::max<std::size_t>(count_ball(r), 1);
            const std::size_t big = count_ball(2.0 * r);
            worst = std::max(worst, static_cast<double>(big) / static_cast<double>(small));
        }
    }
    return worst;
}

double continuous_perimeter(const ContinuousDomain& domain) {
    switch (domain.shape) {
        case ContinuousDomain::Shape::Rect: {
            if (domain.dim == 1) return 2.0;
            double s = 0.0;
            for (int i = 0; i < domain.dim; ++i) s += domain.hi[i] - domain.lo[i];
            return 2.0 * s;
        }
        case ContinuousDomain::Shape::Disk:
            if (domain.dim == 1) return 2.0;
            return 2.0 * std::numbers::pi * domain.radius;
        case ContinuousDomain::Shape::Polygon: {
            double s = 0.0;
            const std::size_t n = domain.vertices.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = domain.vertices[i];
                const auto& b = domain.vertices[(i + 1) % n];
                s += std::hypot(b[0] - a[0], b[1] - a[1]);
            }
            return s;
        }
    }
    return 0.0;
}

SandwichReport perimeter_sandwich_check(const DiscreteDomain& domain, double slack) {
    SandwichReport rep;
    rep.slack = slack;
    rep.lower = lattice_perimeter(domain);
    rep.upper = std::pow(domain.lattice.condition, 2.0 * domain.lattice.dim) * rep.lower;

    const int d = domain.lattice.dim;
    std::vector<int> sizes;
    if (domain.torus_period > 0.0) {
        for (int i = 0; i < d; ++i) {
            sizes.push_back(static_cast<int>(
                std::llround(domain.torus_period / domain.lattice.gen[i * d + i])));
        }
    }
    std::size_t edges = 0;
    for (const auto& k : domain.points) {
        for (int i = 0; i < d; ++i) {
            for (int step : {-1, +1}) {
                std::vector<int> nb = k;
                nb[i] += step;
                if (!sizes.empty()) nb[i] = ((nb[i] % sizes[i]) + sizes[i]) % sizes[i];
                if (!domain.contains(nb)) ++edges;
            }
        }
    }
    rep.proxy = (domain.mass * static_cast<double>(edges)) / domain.lattice.spectral_norm;
    if (domain.empty()) {
        rep.within_slack = true;
    } else {
        rep.within_slack = rep.proxy >= rep.lower / slack && rep.proxy <= rep.upper * slack;
    }
    return rep;
}

} // namespace speclab
