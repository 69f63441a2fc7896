#include "dnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dnls {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace

Grid::Grid(std::size_t n, double half_width) : n_(n), half_width_(half_width)
{
    if (n < 16 || !is_power_of_two(n)) {
        throw InvalidArgument("grid node count must be a power of two >= 16, got " + std::to_string(n));
    }
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw InvalidArgument("grid half_width must be positive and finite");
    }
}

RealVec Grid::nodes() const
{
    RealVec out(n_);
    for (std::size_t k = 0; k < n_; ++k) out[k] = x(k);
    return out;
}

double Grid::wavenumber(std::size_t j) const
{
    const double base = std::numbers::pi / half_width_;
    const auto half = static_cast<long>(n_ / 2);
    auto m = static_cast<long>(j);
    if (m >= half) m -= static_cast<long>(n_);
    return base * static_cast<double>(m);
}

RealVec Grid::wavenumbers() const
{
    RealVec out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = wavenumber(j);
    return out;
}

double Grid::nyquist() const { return std::numbers::pi * static_cast<double>(n_) / length(); }

std::string Grid::describe() const
{
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n_ << " half_width=" << half_width_ << " dx=" << dx();
    return os.str();
}

ComplexField::ComplexField(Grid g, CplxVec v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.n()) throw GridMismatch("complex field length does not match grid");
}

RealField::RealField(Grid g, RealVec v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.n()) throw GridMismatch("real field length does not match grid");
}

void require_same_grid(const Grid& a, const Grid& b, const char* where)
{
    if (a != b) {
        throw GridMismatch(std::string(where) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
    }
}

ComplexField operator+(const ComplexField& a, const ComplexField& b)
{
    require_same_grid(a.grid, b.grid, "field sum");
    ComplexField out(a.grid);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

ComplexField operator-(const ComplexField& a, const ComplexField& b)
{
    require_same_grid(a.grid, b.grid, "field difference");
    ComplexField out(a.grid);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

ComplexField operator*(cplx s, const ComplexField& a)
{
    ComplexField out(a.grid);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
    return out;
}

ComplexField operator*(double s, const ComplexField& a) { return cplx(s, 0.0) * a; }

ComplexField to_complex(const RealField& f)
{
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k];
    return out;
}

ComplexField make_complex(const RealField& re, const RealField& im)
{
    require_same_grid(re.grid, im.grid, "make_complex");
    ComplexField out(re.grid);
    for (std::size_t k = 0; k < re.size(); ++k) out[k] = cplx(re[k], im[k]);
    return out;
}

RealField real_part(const ComplexField& f)
{
    RealField out(f.grid);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].real();
    return out;
}

RealField imag_part(const ComplexField& f)
{
    RealField out(f.grid);
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].imag();
    return out;
}

double max_abs(const ComplexField& f)
{
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const RealField& f)
{
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const ComplexField& f)
{
    return std::all_of(f.values.begin(), f.values.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

} // namespace dnls
