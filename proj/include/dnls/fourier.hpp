#pragma once

#include "dnls/grid.hpp"

#include <Eigen/Dense>

#include <span>

namespace dnls {

/// What a band-limited evaluator returns for points outside [-L, L).
enum class Outside { periodic, zero };

namespace fourier {

/// Unnormalized forward DFT (FFTW sign convention e^{-2 pi i jk/n}).
CplxVec forward(std::span<const cplx> values);
/// Inverse DFT including the 1/n factor.
CplxVec backward(std::span<const cplx> spectrum);

ComplexField derivative(const ComplexField& f, int order = 1);
RealField derivative(const RealField& f, int order = 1);

/// G(x_k) = integral of f from -L to x_k, spectrally accurate for smooth periodic f.
RealField antiderivative(const RealField& f);

/**
 * Evaluate the trigonometric interpolant of f (or its derivative of the given
 * order) at the affine point set start + j*step, j = 0..count-1.
 *
 * Uses a Bluestein chirp-z transform, so the cost is O((n + count) log(n + count))
 * for any real step. The Nyquist bin is dropped.
 */
CplxVec evaluate_affine(const ComplexField& f, double start, double step, std::size_t count,
                        Outside outside = Outside::periodic, int order = 0);

/// w(y_k) = u(lambda*y_k + shift) on the grid of u.
ComplexField rescale_translate(const ComplexField& u, double lambda, double shift,
                               Outside outside = Outside::periodic, int order = 0);

/// Exact Fourier phase shift: returns u(x - shift).
ComplexField translate(const ComplexField& u, double shift);

/// Band-limited transfer onto another grid; zero outside the source box.
ComplexField resample(const ComplexField& f, const Grid& target);
RealField resample(const RealField& f, const Grid& target);

/// Dense Fourier differentiation matrix (real circulant). Odd orders drop the Nyquist bin.
Eigen::MatrixXd derivative_matrix(const Grid& grid, int order);

} // namespace fourier

// Quadrature on the periodic grid (trapezoid rule).
double integrate(const RealField& f);
double integrate(std::span<const double> values, double dx);

/// Real L^2 inner product (v, w) = Re integral v * conj(w).
double inner(const ComplexField& v, const ComplexField& w);
double norm_l2(const ComplexField& v);
/// ||v||_{H^1}^2 = ||v||_{L^2}^2 + ||v_x||_{L^2}^2.
double norm_h1(const ComplexField& v);
double h1_inner(const ComplexField& v, const ComplexField& w);

} // namespace dnls
