#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dicke/specfun.hpp"

namespace dicke {

using specfun::HalfInt;

/// Real symmetric matrix. The Dicke Hamiltonian has real matrix elements in
/// the Fock x Dicke basis, so its Hermitian form is stored as real.
using HermitianMatrix = Eigen::MatrixXd;

/// Complex amplitudes over the product basis, ordered by hilbert::BasisIndex.
using JointState = Eigen::VectorXcd;

/// Diagonal of a +/-1 matrix.
using DiagonalSignMatrix = Eigen::DiagonalMatrix<double, Eigen::Dynamic>;

namespace hilbert {

/// Physical constants (hbar = 1) and the Fock truncation.
struct ModelParams {
    double omega0 = 1.0;   ///< field frequency
    double omega_a = 1.0;  ///< atomic frequency
    double G = 0.5;        ///< rotating (Jaynes-Cummings) coupling
    double Gp = 0.0;       ///< counter-rotating coupling
    HalfInt J = HalfInt::from_twice(21);
    int n_max = 120;

    double g_plus() const { return G + Gp; }
    double g_minus() const { return G - Gp; }
    int spin_dim() const { return J.twice() + 1; }
    int dim() const { return (n_max + 1) * spin_dim(); }

    /// Throws DomainError when an invariant is broken.
    void validate() const;
};

/// Field-major flat index over |n> (x) |J,m>: flat = n*(2J+1) + (m+J).
/// The reduced atomic matrix relies on this ordering.
class BasisIndex {
public:
    explicit BasisIndex(const ModelParams& params);

    int dim() const { return (n_max_ + 1) * spin_dim_; }
    int spin_dim() const { return spin_dim_; }
    int n_max() const { return n_max_; }
    HalfInt J() const { return J_; }

    int flat(int n, HalfInt m) const;
    int photons(int index) const { return index / spin_dim_; }
    HalfInt projection(int index) const {
        return HalfInt::from_twice(2 * (index % spin_dim_) - J_.twice());
    }
    std::pair<int, HalfInt> unflat(int index) const { return {photons(index), projection(index)}; }

private:
    HalfInt J_;
    int spin_dim_;
    int n_max_;
};

BasisIndex build_basis(const ModelParams& params);

/// Generalized Dicke Hamiltonian
///   omega0 a+a + omega_a Jz + G/sqrt(2J) (a J+ + a+ J-) + G'/sqrt(2J) (a+ J+ + a J-)
/// as a dense matrix. Only the upper triangle is assembled and then mirrored,
/// so the result is exactly symmetric.
HermitianMatrix build_hamiltonian(const ModelParams& params);

/// Parity exp[i pi (a+a + Jz + J)] = (-1)^(n+m+J). Commutes with H for any G, G'.
DiagonalSignMatrix parity_operator(const ModelParams& params);

/// Excitation number n + m + J. Conserved only when G' = 0.
Eigen::VectorXd excitation_number(const ModelParams& params);

/// Flat indices of the even (first) and odd (second) parity sectors, ascending.
std::array<std::vector<int>, 2> parity_sectors(const ModelParams& params);

}  // namespace hilbert
}  // namespace dicke
