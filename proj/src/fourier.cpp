#include "dnls/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace dnls {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
public:
    struct Plans {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    static PlanCache& instance()
    {
        static PlanCache cache;
        return cache;
    }

    const Plans& get(std::size_t n)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        auto* a = fftw_alloc_complex(n);
        auto* b = fftw_alloc_complex(n);
        const int ni = static_cast<int>(n);
        Plans p;
        p.fwd = fftw_plan_dft_1d(ni, a, b, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.bwd = fftw_plan_dft_1d(ni, a, b, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        return plans_.emplace(n, p).first->second;
    }

    ~PlanCache()
    {
        for (auto& [n, p] : plans_) {
            fftw_destroy_plan(p.fwd);
            fftw_destroy_plan(p.bwd);
        }
    }

private:
    std::mutex mutex_;
    std::map<std::size_t, Plans> plans_;
};

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void execute(fftw_plan plan, std::span<const cplx> in, CplxVec& out)
{
    CplxVec tmp(in.begin(), in.end());
    out.resize(in.size());
    fftw_execute_dft(plan, as_fftw(tmp.data()), as_fftw(out.data()));
}

std::size_t next_pow2(std::size_t v)
{
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

cplx unit_phase(long double angle)
{
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double r = std::fmod(angle, two_pi);
    return {static_cast<double>(std::cos(r)), static_cast<double>(std::sin(r))};
}

// Spectral symbol (i k)^order with the Nyquist bin zeroed for odd orders.
cplx symbol(const Grid& g, std::size_t j, int order)
{
    if (order == 0) return {1.0, 0.0};
    if (j == g.n() / 2 && order % 2 != 0) return {0.0, 0.0};
    const cplx ik(0.0, g.wavenumber(j));
    cplx s(1.0, 0.0);
    for (int p = 0; p < order; ++p) s *= ik;
    return s;
}

} // namespace

namespace fourier {

CplxVec forward(std::span<const cplx> values)
{
    CplxVec out;
    execute(PlanCache::instance().get(values.size()).fwd, values, out);
    return out;
}

CplxVec backward(std::span<const cplx> spectrum)
{
    CplxVec out;
    execute(PlanCache::instance().get(spectrum.size()).bwd, spectrum, out);
    const double inv = 1.0 / static_cast<double>(spectrum.size());
    for (auto& v : out) v *= inv;
    return out;
}

ComplexField derivative(const ComplexField& f, int order)
{
    if (order < 0) throw InvalidArgument("derivative order must be non-negative");
    auto hat = forward(f.values);
    for (std::size_t j = 0; j < hat.size(); ++j) hat[j] *= symbol(f.grid, j, order);
    return ComplexField(f.grid, backward(hat));
}

RealField derivative(const RealField& f, int order)
{
    const auto d = derivative(to_complex(f), order);
    return real_part(d);
}

RealField antiderivative(const RealField& f)
{
    const Grid& g = f.grid;
    const auto n = g.n();
    auto hat = forward(to_complex(f).values);
    const double mean = hat[0].real() / static_cast<double>(n);
    hat[0] = 0.0;
    hat[n / 2] = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        if (j == n / 2) continue;
        hat[j] /= cplx(0.0, g.wavenumber(j));
    }
    const auto periodic = backward(hat);
    RealField out(g);
    const double base = periodic[0].real();
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = mean * (g.x(k) + g.half_width()) + periodic[k].real() - base;
    }
    return out;
}

CplxVec evaluate_affine(const ComplexField& f, double start, double step, std::size_t count,
                        Outside outside, int order)
{
    const Grid& g = f.grid;
    const std::size_t n = g.n();
    const long double pi = std::numbers::pi_v<long double>;
    const long double L = g.half_width();
    const long double alpha = pi * static_cast<long double>(step) / L;

    auto hat = forward(f.values);
    // a[m'] with m' = m + n/2, m in [-n/2, n/2); the Nyquist bin (m' = 0) is dropped.
    CplxVec a(n, cplx{});
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t mp = 1; mp < n; ++mp) {
        const long m = static_cast<long>(mp) - static_cast<long>(n / 2);
        const std::size_t bin = m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m + static_cast<long>(n));
        const long double km = pi * static_cast<long double>(m) / L;
        cplx coeff = hat[bin] * inv_n * unit_phase(km * (static_cast<long double>(start) + L));
        coeff *= symbol(g, bin, order);
        a[mp] = coeff;
    }

    // Bluestein: X_j = chirp(j) * sum_m a_m chirp(m) conj(chirp(j - m)), chirp(t) = e^{i alpha t^2/2}.
    const std::size_t M = count;
    const std::size_t N = next_pow2(n + M - 1);
    CplxVec y(N, cplx{}), h(N, cplx{});
    auto chirp = [&](long t) {
        const long double tt = static_cast<long double>(t);
        return unit_phase(alpha * tt * tt / 2.0L);
    };
    for (std::size_t m = 0; m < n; ++m) y[m] = a[m] * chirp(static_cast<long>(m));
    for (long t = -static_cast<long>(n) + 1; t < static_cast<long>(M); ++t) {
        const std::size_t idx = t >= 0 ? static_cast<std::size_t>(t) : static_cast<std::size_t>(t + static_cast<long>(N));
        h[idx] = std::conj(chirp(t));
    }
    auto Y = forward(y);
    const auto H = forward(h);
    for (std::size_t k = 0; k < N; ++k) Y[k] *= H[k];
    const auto conv = backward(Y);

    CplxVec out(M);
    const long double half_n = static_cast<long double>(n / 2);
    for (std::size_t j = 0; j < M; ++j) {
        const long double jj = static_cast<long double>(j);
        const cplx val = conv[j] * chirp(static_cast<long>(j)) * unit_phase(-alpha * half_n * jj);
        out[j] = val;
        if (outside == Outside::zero) {
            const double z = start + static_cast<double>(j) * step;
            if (z < -g.half_width() || z >= g.half_width()) out[j] = 0.0;
        }
    }
    return out;
}

ComplexField rescale_translate(const ComplexField& u, double lambda, double shift, Outside outside, int order)
{
    const Grid& g = u.grid;
    const double start = lambda * g.x(0) + shift;
    return ComplexField(g, evaluate_affine(u, start, lambda * g.dx(), g.n(), outside, order));
}

ComplexField translate(const ComplexField& u, double shift)
{
    auto hat = forward(u.values);
    for (std::size_t j = 0; j < hat.size(); ++j) {
        if (j == u.grid.n() / 2) {
            hat[j] = 0.0;
            continue;
        }
        hat[j] *= std::polar(1.0, -u.grid.wavenumber(j) * shift);
    }
    return ComplexField(u.grid, backward(hat));
}

ComplexField resample(const ComplexField& f, const Grid& target)
{
    return ComplexField(target, evaluate_affine(f, target.x(0), target.dx(), target.n(), Outside::zero));
}

RealField resample(const RealField& f, const Grid& target) { return real_part(resample(to_complex(f), target)); }

Eigen::MatrixXd derivative_matrix(const Grid& grid, int order)
{
    const std::size_t n = grid.n();
    CplxVec sym(n);
    for (std::size_t j = 0; j < n; ++j) sym[j] = symbol(grid, j, order);
    const auto col = backward(sym);
    Eigen::MatrixXd D(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            D(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = col[(j + n - k) % n].real();
        }
    }
    return D;
}

} // namespace fourier

double integrate(std::span<const double> values, double dx)
{
    double s = 0.0;
    for (double v : values) s += v;
    return s * dx;
}

double integrate(const RealField& f) { return integrate(f.values, f.grid.dx()); }

double inner(const ComplexField& v, const ComplexField& w)
{
    require_same_grid(v.grid, w.grid, "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        s += v[k].real() * w[k].real() + v[k].imag() * w[k].imag();
    }
    return s * v.grid.dx();
}

double norm_l2(const ComplexField& v) { return std::sqrt(inner(v, v)); }

double h1_inner(const ComplexField& v, const ComplexField& w)
{
    return inner(v, w) + inner(fourier::derivative(v), fourier::derivative(w));
}

double norm_h1(const ComplexField& v) { return std::sqrt(h1_inner(v, v)); }

} // namespace dnls
