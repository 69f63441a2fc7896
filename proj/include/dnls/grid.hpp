#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;

/// Raised when a caller violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two fields (or a field and an operator) live on different grids.
class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * Uniform periodic grid on [-half_width, half_width).
 *
 * Node k sits at -half_width + k*dx, so node n/2 is the origin and the grid is
 * symmetric under x -> -x (node k mirrors to node n-k modulo n).
 */
class Grid {
public:
    Grid(std::size_t n, double half_width);

    std::size_t n() const { return n_; }
    double half_width() const { return half_width_; }
    double dx() const { return 2.0 * half_width_ / static_cast<double>(n_); }
    double length() const { return 2.0 * half_width_; }
    double x(std::size_t k) const { return -half_width_ + static_cast<double>(k) * dx(); }
    std::size_t center_index() const { return n_ / 2; }
    RealVec nodes() const;

    /// Angular wavenumber of DFT bin j (Nyquist bin reported as -pi*n/(2L)).
    double wavenumber(std::size_t j) const;
    RealVec wavenumbers() const;
    double nyquist() const;

    bool operator==(const Grid& other) const
    {
        return n_ == other.n_ && half_width_ == other.half_width_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

    std::string describe() const;

private:
    std::size_t n_;
    double half_width_;
};

struct ComplexField {
    Grid grid;
    CplxVec values;

    ComplexField(Grid g) : grid(g), values(g.n(), cplx{}) {}
    ComplexField(Grid g, CplxVec v);

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t k) { return values[k]; }
    const cplx& operator[](std::size_t k) const { return values[k]; }
};

struct RealField {
    Grid grid;
    RealVec values;

    RealField(Grid g) : grid(g), values(g.n(), 0.0) {}
    RealField(Grid g, RealVec v);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    const double& operator[](std::size_t k) const { return values[k]; }
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// Pointwise algebra used throughout the pipelines.
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);
ComplexField operator*(double s, const ComplexField& a);
ComplexField to_complex(const RealField& f);
ComplexField make_complex(const RealField& re, const RealField& im);
RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);

double max_abs(const ComplexField& f);
double max_abs(const RealField& f);
bool all_finite(const ComplexField& f);

} // namespace dnls
