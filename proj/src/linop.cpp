#include "dnls/linop.hpp"

#include "dnls/random_fields.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnls {

ComplexField apply_L(const Soliton& sol, const ComplexField& v)
{
    require_same_grid(sol.grid, v.grid, "apply_L");
    const auto& p = sol.params;
    const ComplexField vx = fourier::derivative(v, 1);
    const ComplexField vxx = fourier::derivative(v, 2);
    const cplx I(0.0, 1.0);
    ComplexField out(v.grid);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const cplx ph = sol.phi[k];
        const double m = std::norm(ph);
        const double re = std::real(ph * std::conj(v[k]));
        out[k] = -vxx[k] + p.omega * v[k] + p.c * I * vx[k] - I * m * vx[k] - 2.0 * I * re * sol.phi_prime[k] -
                 p.b * m * m * v[k] - 4.0 * p.b * m * re * ph;
    }
    return out;
}

Eigen::MatrixXd BlockOperator::l11() const
{
    const auto N = static_cast<Eigen::Index>(n());
    Eigen::MatrixXd out = matrix.topLeftCorner(N, N);
    for (Eigen::Index k = 0; k < N; ++k) out(k, k) -= phi4_quarter[static_cast<std::size_t>(k)];
    return out;
}

Eigen::MatrixXd BlockOperator::l12() const
{
    const auto N = static_cast<Eigen::Index>(n());
    return matrix.topRightCorner(N, N);
}

Eigen::MatrixXd BlockOperator::l21() const
{
    const auto N = static_cast<Eigen::Index>(n());
    return matrix.bottomLeftCorner(N, N);
}

Eigen::MatrixXd BlockOperator::l22() const
{
    const auto N = static_cast<Eigen::Index>(n());
    return matrix.bottomRightCorner(N, N);
}

BlockOperator assemble_Ltilde(const Soliton& sol)
{
    const Grid& g = sol.grid;
    const auto& p = sol.params;
    const auto n = g.n();
    const auto N = static_cast<Eigen::Index>(n);
    const Eigen::MatrixXd D1 = fourier::derivative_matrix(g, 1);
    const Eigen::MatrixXd D2 = fourier::derivative_matrix(g, 2);

    BlockOperator op{sol, Eigen::MatrixXd::Zero(2 * N, 2 * N), RealVec(n), RealVec(n), RealVec(n), 0.0};
    const double base = p.omega - p.c * p.c / 4.0;
    Eigen::VectorXd phi2(N), phiphip(N);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = sol.Phi[k];
        const double f2 = f * f;
        op.u_pot[k] = base + 1.5 * p.c * f2 - 15.0 / 16.0 * p.gamma * f2 * f2;
        op.v_pot[k] = base + 0.5 * p.c * f2 - 3.0 / 16.0 * p.gamma * f2 * f2;
        op.phi4_quarter[k] = 0.25 * f2 * f2;
        phi2(static_cast<Eigen::Index>(k)) = f2;
        phiphip(static_cast<Eigen::Index>(k)) = f * sol.Phi_prime[k];
    }

    auto& M = op.matrix;
    M.topLeftCorner(N, N) = -D2;
    M.bottomRightCorner(N, N) = -D2;
    // Phi^2 d = (Phi^2 d + d Phi^2)/2 - Phi Phi', so
    //   L12 =  (Phi^2 D + D Phi^2)/4 - Phi Phi',  L21 = -(Phi^2 D + D Phi^2)/4 - Phi Phi'.
    // The skew part is exactly antisymmetric on the grid, which keeps the
    // discrete operator free of spurious high-frequency modes.
    const Eigen::MatrixXd skew = 0.25 * (phi2.asDiagonal() * D1 + D1 * phi2.asDiagonal());
    M.topRightCorner(N, N) = skew;
    M.bottomLeftCorner(N, N) = -skew;
    for (Eigen::Index k = 0; k < N; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        M(k, k) += op.u_pot[ks] + op.phi4_quarter[ks];
        M(N + k, N + k) += op.v_pot[ks];
        M(k, N + k) -= phiphip(k);
        M(N + k, k) -= phiphip(k);
    }
    op.asymmetry = (M - M.transpose()).cwiseAbs().maxCoeff();
    M = 0.5 * (M + M.transpose()).eval();
    return op;
}

BlockOperator assemble_Ltilde(const SolitonParams& params, const Grid& grid)
{
    return assemble_Ltilde(Soliton(params, grid));
}

Eigen::VectorXd stack(const ComplexField& w)
{
    const auto N = static_cast<Eigen::Index>(w.size());
    Eigen::VectorXd v(2 * N);
    for (Eigen::Index k = 0; k < N; ++k) {
        v(k) = w[static_cast<std::size_t>(k)].real();
        v(N + k) = w[static_cast<std::size_t>(k)].imag();
    }
    return v;
}

ComplexField unstack(const Grid& grid, const Eigen::VectorXd& v)
{
    const auto N = static_cast<Eigen::Index>(grid.n());
    if (v.size() != 2 * N) throw GridMismatch("unstack: vector length does not match grid");
    ComplexField out(grid);
    for (Eigen::Index k = 0; k < N; ++k) out[static_cast<std::size_t>(k)] = cplx(v(k), v(N + k));
    return out;
}

ComplexField apply_Ltilde(const BlockOperator& op, const ComplexField& w)
{
    require_same_grid(op.soliton.grid, w.grid, "apply_Ltilde");
    return unstack(w.grid, op.matrix * stack(w));
}

ComplexField to_gauge_frame(const Soliton& sol, const ComplexField& v)
{
    require_same_grid(sol.grid, v.grid, "to_gauge_frame");
    ComplexField out(v.grid);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::polar(1.0, -sol.eta[k]) * v[k];
    return out;
}

ComplexField from_gauge_frame(const Soliton& sol, const ComplexField& w)
{
    require_same_grid(sol.grid, w.grid, "from_gauge_frame");
    ComplexField out(w.grid);
    for (std::size_t k = 0; k < w.size(); ++k) out[k] = std::polar(1.0, sol.eta[k]) * w[k];
    return out;
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols()) throw InvalidArgument("symmetric_eigen: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric_eigen: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

// sin of the largest principal angle between two column spaces (both orthonormal).
double max_principal_angle(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2)
{
    const Eigen::MatrixXd residual = Q2 - Q1 * (Q1.transpose() * Q2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    const double s = std::min(1.0, svd.singularValues().maxCoeff());
    return std::asin(s);
}

} // namespace

SpectralData spectral_decompose(const BlockOperator& op, double gap, double kernel_tol, bool enforce)
{
    const Soliton& sol = op.soliton;
    const Grid& g = sol.grid;
    const double omega = sol.params.omega;
    if (gap < 0.0) gap = 1e-3 * omega;
    if (kernel_tol < 0.0) kernel_tol = 1e-6 * omega;

    auto eig = symmetric_eigen(op.matrix);
    SpectralData sd(g);
    sd.eigenvalues = std::move(eig.values);
    sd.eigenvectors = std::move(eig.vectors);
    sd.gap = gap;
    sd.kernel_tol = kernel_tol;

    double smallest_positive = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
        const double lam = sd.eigenvalues(j);
        if (lam < -gap) {
            ++sd.counts.negative;
            if (sd.negative_index < 0) sd.negative_index = static_cast<int>(j);
        } else if (std::abs(lam) < kernel_tol) {
            ++sd.counts.kernel;
            sd.kernel_indices.push_back(static_cast<int>(j));
        } else if (lam > gap) {
            ++sd.counts.positive;
            smallest_positive = std::min(smallest_positive, lam);
        } else {
            ++sd.counts.ambiguous;
        }
    }
    sd.smallest_positive = smallest_positive;

    const bool signature_ok = sd.counts.negative == 1 && sd.counts.kernel == 2 && sd.counts.ambiguous == 0;
    if (enforce && !signature_ok) {
        std::ostringstream os;
        os << "spectral_decompose: expected signature (1 negative, 2 kernel), found (" << sd.counts.negative
           << " negative, " << sd.counts.kernel << " kernel, " << sd.counts.ambiguous << " ambiguous, "
           << sd.counts.positive << " positive); lowest eigenvalues:";
        for (Eigen::Index j = 0; j < std::min<Eigen::Index>(4, sd.eigenvalues.size()); ++j) {
            os << ' ' << sd.eigenvalues(j);
        }
        throw ClassificationError(os.str(), sd.counts);
    }
    sd.classified = enforce;

    // The lowest eigenvector is the negative direction whenever one exists.
    const Eigen::Index neg = sd.negative_index >= 0 ? sd.negative_index : 0;
    sd.lambda_neg = sd.eigenvalues(neg);
    Eigen::VectorXd v = sd.eigenvectors.col(neg);
    const auto N = static_cast<Eigen::Index>(g.n());
    Eigen::Index arg = 0;
    v.head(N).cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    v /= std::sqrt(g.dx());
    sd.chi_tilde = unstack(g, v);
    sd.chi = from_gauge_frame(sol, sd.chi_tilde);

    if (sd.counts.kernel == 2) {
        Eigen::MatrixXd Q1(2 * N, 2);
        Q1.col(0) = sd.eigenvectors.col(sd.kernel_indices[0]);
        Q1.col(1) = sd.eigenvectors.col(sd.kernel_indices[1]);
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2 * N, 2);
        for (Eigen::Index k = 0; k < N; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            const double f = sol.Phi[ks];
            R(N + k, 0) = f;
            R(k, 1) = sol.Phi_prime[ks];
            R(N + k, 1) = -0.25 * f * f * f;
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
        const Eigen::MatrixXd Q2 = qr.householderQ() * Eigen::MatrixXd::Identity(2 * N, 2);
        sd.kernel_angle = max_principal_angle(Q1, Q2);
    } else {
        sd.kernel_angle = std::numeric_limits<double>::quiet_NaN();
    }
    return sd;
}

QuadraticForm quadratic_form_identity(const BlockOperator& op, const ComplexField& w, double positivity_floor)
{
    const Soliton& sol = op.soliton;
    require_same_grid(sol.grid, w.grid, "quadratic_form_identity");
    for (double f : sol.Phi.values) {
        if (!(f > positivity_floor)) {
            throw InvalidArgument("quadratic_form_identity: Phi falls below the positivity floor");
        }
    }
    const double dx = w.grid.dx();
    const Eigen::VectorXd v = stack(w);
    QuadraticForm q;
    q.direct = v.dot(op.matrix * v) * dx;

    const auto N = static_cast<Eigen::Index>(w.size());
    const Eigen::VectorXd f = v.head(N);
    const double l11_form = f.dot(op.l11() * f) * dx;
    const RealField g = imag_part(w);
    const RealField gx = fourier::derivative(g);
    double sq = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double Phi = sol.Phi[k];
        // Phi d/dx (g / Phi) = g_x - (Phi'/Phi) g
        const double term = Phi * Phi * w[k].real() + 2.0 * (gx[k] - sol.log_derivative[k] * g[k]);
        sq += term * term;
    }
    q.factorized = l11_form + 0.25 * sq * dx;
    return q;
}

ChiStar build_chi_star(const BlockOperator& op)
{
    const Soliton& sol = op.soliton;
    const Grid& g = sol.grid;
    const auto eig = symmetric_eigen(op.l11());
    const double lambda11 = eig.values(0);
    if (!(lambda11 < 0.0)) throw std::runtime_error("build_chi_star: L11 has no negative eigenvalue");

    RealField chi11(g);
    const double scale = 1.0 / std::sqrt(g.dx());
    for (std::size_t k = 0; k < g.n(); ++k) chi11[k] = eig.vectors(static_cast<Eigen::Index>(k), 0) * scale;
    if (chi11[g.center_index()] < 0.0) {
        for (auto& v : chi11.values) v = -v;
    }

    RealField weighted(g);
    for (std::size_t k = 0; k < g.n(); ++k) weighted[k] = sol.Phi[k] * chi11[k];
    const RealField cumulative = fourier::antiderivative(weighted);
    RealField chi12(g);
    for (std::size_t k = 0; k < g.n(); ++k) chi12[k] = -0.5 * sol.Phi[k] * cumulative[k];

    return {make_complex(chi11, chi12), chi11, chi12, lambda11};
}

double coercivity_ratio(const BlockOperator& op, const ComplexField& p)
{
    const ComplexField w = to_gauge_frame(op.soliton, p);
    const Eigen::VectorXd v = stack(w);
    const double form = v.dot(op.matrix * v) * w.grid.dx();
    const double h1 = norm_h1(p);
    return form / (h1 * h1);
}

CoercivityReport coercivity_probe(const SpectralData& sd, const BlockOperator& op, int trials, std::uint64_t seed)
{
    const Soliton& sol = op.soliton;
    CoercivityReport rep;
    rep.smallest_positive = sd.smallest_positive;
    rep.trials = trials;
    rep.min_ratio = std::numeric_limits<double>::infinity();

    std::vector<int> excluded = sd.kernel_indices;
    if (sd.negative_index >= 0) excluded.push_back(sd.negative_index);
    for (int t = 0; t < trials; ++t) {
        const ComplexField raw = random_smooth_field(sol.grid, seed + static_cast<std::uint64_t>(t));
        Eigen::VectorXd v = stack(to_gauge_frame(sol, raw));
        for (int j : excluded) {
            const auto col = sd.eigenvectors.col(j);
            v -= col.dot(v) * col;
        }
        const ComplexField p = from_gauge_frame(sol, unstack(sol.grid, v));
        rep.min_ratio = std::min(rep.min_ratio, coercivity_ratio(op, p));
    }
    return rep;
}

ComplexField transfer_chi(const SpectralData& sd, const Soliton& coarse, const Soliton& target)
{
    require_same_grid(sd.chi_tilde.grid, coarse.grid, "transfer_chi");
    ComplexField chi = from_gauge_frame(target, fourier::resample(sd.chi_tilde, target.grid));
    const double norm = norm_l2(chi);
    return (1.0 / norm) * chi;
}

} // namespace dnls
