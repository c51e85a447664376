#include "speclab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "speclab/errors.hpp"

namespace speclab {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat operator*(const Mat& x, const Mat& y) {
    Mat r(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t k = 0; k < x.cols(); ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < y.cols(); ++j) {
                r(i, j) += xik * y(k, j);
            }
        }
    }
    return r;
}

Mat operator+(const Mat& x, const Mat& y) {
    Mat r(x.rows(), x.cols());
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] = x.data()[i] + y.data()[i];
    return r;
}

Mat operator-(const Mat& x, const Mat& y) {
    Mat r(x.rows(), x.cols());
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] = x.data()[i] - y.data()[i];
    return r;
}

Mat adjoint(const Mat& x) {
    Mat r(x.cols(), x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

Vec matvec(const Mat& x, const Vec& v) {
    Vec r(x.rows(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < x.cols(); ++j) acc += x(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

void add_outer(Mat& a, const Vec& u, const Vec& v, double scale) {
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx ui = scale * u[i];
        for (std::size_t j = 0; j < a.cols(); ++j) {
            a(i, j) += ui * std::conj(v[j]);
        }
    }
}

double frobenius_norm(const Mat& x) {
    double s = 0.0;
    for (const cplx& z : x.data()) s += std::norm(z);
    return std::sqrt(s);
}

double max_abs(const Mat& x) {
    double m = 0.0;
    for (const cplx& z : x.data()) m = std::max(m, std::abs(z));
    return m;
}

double trace_real(const Mat& x) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(x.rows(), x.cols()); ++i) t += x(i, i).real();
    return t;
}

double hermiticity_defect(const Mat& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i; j < x.cols(); ++j)
            m = std::max(m, std::abs(x(i, j) - std::conj(x(j, i))));
    return m;
}

void hermitize(Mat& x) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        x(i, i) = cplx(x(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < x.cols(); ++j) {
            const cplx v = 0.5 * (x(i, j) + std::conj(x(j, i)));
            x(i, j) = v;
            x(j, i) = std::conj(v);
        }
    }
}

cplx inner(const Vec& u, const Vec& v) {
    cplx acc(0.0, 0.0);
    for (std::size_t t = 0; t < u.size(); ++t) acc += u[t] * std::conj(v[t]);
    return acc;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

Cholesky::Cholesky(const Mat& a) : l_(a.rows(), a.cols()) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double djj = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) djj -= std::norm(l_(j, k));
        if (!(djj > 0.0)) {
            throw SingularGenerator("Cholesky breakdown: matrix not positive definite");
        }
        const double ljj = std::sqrt(djj);
        l_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * std::conj(l_(j, k));
            l_(i, j) = s / ljj;
        }
    }
}

Vec Cholesky::solve(const Vec& b) const {
    const std::size_t n = l_.rows();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * y[k];
        y[i] = s / l_(i, i);
    }
    Vec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cplx s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l_(k, ii)) * x[k];
        x[ii] = s / l_(ii, ii);
    }
    return x;
}

} // namespace speclab
