#ifndef SPECLAB_LINALG_HPP
#define SPECLAB_LINALG_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace speclab {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;

// Dense row-major complex matrix. Sizes here stay small (a few thousand at
// most), so no effort is spent on blocking or expression templates.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}

    static Mat identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

Mat operator*(const Mat& x, const Mat& y);
Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat adjoint(const Mat& x);
Vec matvec(const Mat& x, const Vec& v);

// Rank-1 update a += scale * u * v^H.
void add_outer(Mat& a, const Vec& u, const Vec& v, double scale = 1.0);

double frobenius_norm(const Mat& x);
double max_abs(const Mat& x);
double trace_real(const Mat& x);

// ||x - x^H||_max; 0 for Hermitian input.
double hermiticity_defect(const Mat& x);

// In-place (x + x^H)/2, used after assembling operators that are Hermitian
// in exact arithmetic.
void hermitize(Mat& x);

cplx inner(const Vec& u, const Vec& v);  // sum u_t conj(v_t), linear in u
double norm2(const Vec& v);

// Cholesky factorization of a Hermitian positive definite matrix, kept for
// repeated right-hand-side solves.
class Cholesky {
public:
    explicit Cholesky(const Mat& a);  // throws SingularGenerator on breakdown
    Vec solve(const Vec& b) const;

private:
    Mat l_;
};

} // namespace speclab

#endif
