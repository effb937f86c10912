#include "sdde/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "sdde/errors.hpp"

namespace sdde {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw RejectedInputError("matrix multiply: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                out(i, j) += aik * rhs(k, j);
            }
        }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw RejectedInputError("matrix add: shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw RejectedInputError("matrix subtract: shape mismatch");
    Matrix out = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
    return out;
}

Matrix Matrix::scaled(double s) const {
    Matrix out = *this;
    for (double& v : out.a_) v *= s;
    return out;
}

double Matrix::norm_inf() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) row += std::fabs((*this)(i, j));
        worst = std::max(worst, row);
    }
    return worst;
}

double Matrix::max_abs_diff(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw RejectedInputError("matrix diff: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i)
        worst = std::max(worst, std::fabs(a_[i] - rhs.a_[i]));
    return worst;
}

bool lu_solve(Matrix a, std::vector<double> b, std::vector<double>& x, double pivot_tol) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw RejectedInputError("lu_solve: shape mismatch");

    // Scale the pivot tolerance by the matrix magnitude.
    const double scale = std::max(a.norm_inf(), 1.0);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::fabs(a(perm[col], col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::fabs(a(perm[r], col));
            if (v > best) { best = v; piv = r; }
        }
        if (best <= pivot_tol * scale) return false;
        std::swap(perm[col], perm[piv]);
        const std::size_t prow = perm[col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const std::size_t row = perm[r];
            const double f = a(row, col) / a(prow, col);
            a(row, col) = 0.0;
            if (f == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) a(row, j) -= f * a(prow, j);
            b[row] -= f * b[prow];
        }
    }

    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[perm[i]];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(perm[i], j) * x[j];
        x[i] = s / a(perm[i], i);
    }
    return true;
}

namespace {

// Solves D X = N column by column.
Matrix solve_matrix(const Matrix& d, const Matrix& n) {
    const std::size_t dim = d.rows();
    Matrix x(dim, dim);
    std::vector<double> col(dim), sol;
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < dim; ++i) col[i] = n(i, j);
        if (!lu_solve(d, col, sol))
            throw RejectedInputError("expm: Pade denominator is singular");
        for (std::size_t i = 0; i < dim; ++i) x(i, j) = sol[i];
    }
    return x;
}

} // namespace

Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) throw RejectedInputError("expm: matrix must be square");
    const std::size_t n = a.rows();

    // Scale so the [6/6] Pade approximant is well inside its accuracy region.
    int squarings = 0;
    double norm = a.norm_inf();
    while (norm > 0.5) { norm *= 0.5; ++squarings; }
    Matrix b = a.scaled(std::ldexp(1.0, -squarings));

    // Pade [6/6] coefficients.
    static const double c[7] = {
        1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0,
    };

    Matrix power = Matrix::identity(n);
    Matrix num(n, n), den(n, n);
    for (int k = 0; k <= 6; ++k) {
        if (k > 0) power = power * b;
        const Matrix term = power.scaled(c[k]);
        num = num + term;
        den = (k % 2 == 0) ? den + term : den - term;
    }

    Matrix result = solve_matrix(den, num);
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

} // namespace sdde
