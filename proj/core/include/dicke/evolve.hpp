#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dicke/hilbert.hpp"

namespace dicke::evolve {

/// Eigenpairs of a real symmetric Hamiltonian; eigenvalues ascending,
/// eigenvectors stored as orthonormal columns.
struct SpectralDecomp {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

struct DecompResiduals {
    double reconstruction;  ///< max |H V - V Lambda| / max |H|
    double orthogonality;   ///< max |V^T V - I|
};

/// Dense symmetric eigensolve (Householder tridiagonalization + implicit QR). Throws
/// NumericalError when the solver does not converge.
SpectralDecomp diagonalize(const HermitianMatrix& H);

/// Same spectrum and eigenspaces as diagonalize(build_hamiltonian(params)),
/// computed one parity sector at a time.
SpectralDecomp diagonalize_by_parity(const hilbert::ModelParams& params);

DecompResiduals residuals(const HermitianMatrix& H, const SpectralDecomp& dec);

/// psi(t) = V exp(-i Lambda t) V^T psi0.
JointState propagate(const SpectralDecomp& dec, const JointState& psi0, double t);

/// Propagates one initial state to many times. The eigenbasis projection is
/// computed once; batches of times are advanced with a single matrix product.
class Propagator {
public:
    Propagator(const SpectralDecomp& dec, const JointState& psi0);

    JointState at(double t) const;

    /// Calls visit(i, psi(times[i])) for every i. Batches run in parallel;
    /// visit must be safe to call concurrently for distinct i.
    void sweep(std::span<const double> times,
               const std::function<void(std::size_t, const JointState&)>& visit) const;

private:
    const SpectralDecomp& dec_;
    Eigen::VectorXd coeff_re_;
    Eigen::VectorXd coeff_im_;
};

/// Reduced atomic state, (2J+1) x (2J+1), indexed by m + J.
struct AtomicDensityMatrix {
    Eigen::MatrixXcd rho;

    HalfInt J() const { return HalfInt::from_twice(static_cast<int>(rho.rows()) - 1); }
    int dim() const { return static_cast<int>(rho.rows()); }
};

/// Partial trace over the field: rho_{m m'} = sum_n psi(n,m) conj(psi(n,m')).
AtomicDensityMatrix reduce_atomic(const JointState& psi, const hilbert::BasisIndex& basis);

/// 1 - Tr(rho^2).
double linear_entropy(const AtomicDensityMatrix& rho);

struct Extremum {
    std::size_t index;
    double t;
    double value;
};

struct Extrema {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;
};

/// Discrete local extrema with a one-sample window on each side.
Extrema find_extrema(std::span<const double> times, std::span<const double> values);

struct PlateauOptions {
    double window = 10.0;       ///< running-mean window, in time units
    double max_rel_change = 0.02;
};

/// First time after which the running mean over `window` changes by less
/// than max_rel_change from one window to the next, for all later times.
std::optional<double> plateau_onset(std::span<const double> times, std::span<const double> values,
                                    const PlateauOptions& options = {});

/// Fock levels counted by the truncation audit, and the population bound.
inline constexpr int kAuditLevels = 10;
inline constexpr double kAuditBound = 1e-8;

struct EntropySeries {
    std::vector<double> times;
    std::vector<double> delta_a;
    Extrema extrema;
    std::optional<double> plateau;
    /// Largest population found in the top kAuditLevels Fock levels.
    double max_tail_population = 0.0;

    bool cutoff_ok() const { return max_tail_population < kAuditBound; }
};

EntropySeries entropy_series(const SpectralDecomp& dec, const hilbert::BasisIndex& basis,
                             const JointState& psi0, std::span<const double> times,
                             const PlateauOptions& plateau = {});

/// Convenience overload: builds and diagonalizes H first.
EntropySeries entropy_series(const hilbert::ModelParams& params, const JointState& psi0,
                             std::span<const double> times, const PlateauOptions& plateau = {});

/// Population of Fock levels n > n_max - levels.
double tail_population(const JointState& psi, const hilbert::BasisIndex& basis, int levels = kAuditLevels);

/// <psi| A |psi> for a real symmetric A.
double expectation(const HermitianMatrix& A, const JointState& psi);
/// <psi| diag(a) |psi>.
double expectation_diagonal(const Eigen::VectorXd& a, const JointState& psi);

/// Uniform grid t_start, t_start + dt, ... up to t_end inclusive (within dt/1000).
std::vector<double> uniform_times(double t_start, double t_end, double dt);

}  // namespace dicke::evolve
