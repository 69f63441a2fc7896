#pragma once

#include "dnls/soliton.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dnls {

/// Matrix-free linearized operator L v = S''(phi) v on the soliton's grid.
ComplexField apply_L(const Soliton& sol, const ComplexField& v);

/**
 * Dense real discretization of the gauge-conjugated operator
 * L~ = e^{-i eta} L e^{i eta}, acting on w = f + i g through the stacked vector (f, g):
 *
 *   [ L11 + Phi^4/4   L12 ] [f]
 *   [ L21             L22 ] [g]
 *
 * Built from Fourier differentiation matrices and symmetrized.
 */
struct BlockOperator {
    Soliton soliton;
    Eigen::MatrixXd matrix;
    RealVec u_pot;         ///< U_Phi
    RealVec v_pot;         ///< V_Phi
    RealVec phi4_quarter;  ///< Phi^4 / 4
    double asymmetry = 0.0;  ///< max |M - M^T| before symmetrization

    std::size_t n() const { return soliton.grid.n(); }
    Eigen::MatrixXd l11() const;
    Eigen::MatrixXd l12() const;
    Eigen::MatrixXd l21() const;
    Eigen::MatrixXd l22() const;
};

BlockOperator assemble_Ltilde(const Soliton& sol);
BlockOperator assemble_Ltilde(const SolitonParams& params, const Grid& grid);

/// Dense matvec of L~ on a gauge-frame field w.
ComplexField apply_Ltilde(const BlockOperator& op, const ComplexField& w);
Eigen::VectorXd stack(const ComplexField& w);
ComplexField unstack(const Grid& grid, const Eigen::VectorXd& v);

/// Gauge transport between the frames of L and L~.
ComplexField to_gauge_frame(const Soliton& sol, const ComplexField& v);    // e^{-i eta} v
ComplexField from_gauge_frame(const Soliton& sol, const ComplexField& w);  // e^{i eta} w

struct SymmetricEigen {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXd vectors;  ///< orthonormal columns
};
/// Full dense symmetric eigendecomposition.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

struct SignatureCounts {
    int negative = 0;
    int kernel = 0;
    int positive = 0;
    int ambiguous = 0;  ///< eigenvalues between kernel_tol and gap in magnitude
};

class ClassificationError : public std::runtime_error {
public:
    ClassificationError(const std::string& what, SignatureCounts counts)
        : std::runtime_error(what), counts_(counts)
    {
    }
    const SignatureCounts& counts() const { return counts_; }

private:
    SignatureCounts counts_;
};

struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  ///< Euclidean-orthonormal columns in the stacked (f, g) basis
    SignatureCounts counts;
    double gap = 0.0;
    double kernel_tol = 0.0;
    bool classified = false;  ///< false when classification was not enforced (endpoint regime)
    int negative_index = -1;
    std::vector<int> kernel_indices;
    double lambda_neg = 0.0;
    double smallest_positive = 0.0;
    double kernel_angle = 0.0;  ///< largest principal angle to span{i Phi, Phi' - (i/4) Phi^3}
    ComplexField chi_tilde;     ///< L^2-normalized negative eigenvector in the gauge frame
    ComplexField chi;           ///< e^{i eta} chi_tilde

    explicit SpectralData(const Grid& g) : chi_tilde(g), chi(g) {}
};

/// gap and kernel_tol default to 1e-3 omega and 1e-6 omega when passed as negative.
SpectralData spectral_decompose(const BlockOperator& op, double gap = -1.0, double kernel_tol = -1.0,
                                bool enforce = true);

struct QuadraticForm {
    double direct = 0.0;      ///< <L~ w, w>
    double factorized = 0.0;  ///< <L11 f, f> + 1/4 || Phi^2 f + 2 Phi (g/Phi)_x ||^2
};

QuadraticForm quadratic_form_identity(const BlockOperator& op, const ComplexField& w, double positivity_floor = 1e-300);

struct ChiStar {
    ComplexField chi_star;  ///< chi11 + i chi12 in the gauge frame
    RealField chi11;
    RealField chi12;
    double lambda11 = 0.0;
};

/// Negative direction built from the ground state of L11.
ChiStar build_chi_star(const BlockOperator& op);

/// <L p, p> / ||p||_{H^1}^2 for p in the original frame.
double coercivity_ratio(const BlockOperator& op, const ComplexField& p);

struct CoercivityReport {
    double min_ratio = 0.0;
    double smallest_positive = 0.0;
    int trials = 0;
};

/// Random smooth fields projected onto the positive subspace; returns the smallest ratio seen.
CoercivityReport coercivity_probe(const SpectralData& sd, const BlockOperator& op, int trials, std::uint64_t seed = 7);

/// Transfer chi computed on a coarse spectral grid onto an evolution grid and renormalize.
ComplexField transfer_chi(const SpectralData& sd, const Soliton& coarse, const Soliton& target);

} // namespace dnls
