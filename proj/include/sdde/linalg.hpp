#ifndef SDDE_LINALG_HPP
#define SDDE_LINALG_HPP

#include <cstddef>
#include <vector>

namespace sdde {

// Small dense row-major matrix. Sized for generator matrices (N is a handful),
// not for large linear algebra.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix scaled(double s) const;

    // Max row sum of absolute values.
    double norm_inf() const;
    // Largest absolute entry difference against another matrix of equal shape.
    double max_abs_diff(const Matrix& rhs) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

// Solves A x = b by LU with partial pivoting. Throws NoUniqueStationaryError
// via the caller's wrapping when singular; here we throw RejectedInputError
// only for shape mismatches and signal singularity through the return flag.
bool lu_solve(Matrix a, std::vector<double> b, std::vector<double>& x,
              double pivot_tol = 1e-13);

// Matrix exponential by scaling-and-squaring with a [6/6] Pade core.
Matrix expm(const Matrix& a);

} // namespace sdde

#endif // SDDE_LINALG_HPP
