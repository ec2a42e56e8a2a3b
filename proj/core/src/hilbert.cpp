#include "dicke/hilbert.hpp"

#include <cmath>
#include <string>

#include "dicke/errors.hpp"

namespace dicke::hilbert {

namespace {

// sqrt(J(J+1) - m(m+1)) for J+ acting on |J,m>, all in doubled units.
double raising_element(HalfInt J, HalfInt m) {
    const double j = J.value();
    const double mm = m.value();
    return std::sqrt(j * (j + 1.0) - mm * (mm + 1.0));
}

}  // namespace

void ModelParams::validate() const {
    if (!(omega0 > 0.0)) throw DomainError("ModelParams: omega0 must be positive");
    if (!(omega_a > 0.0)) throw DomainError("ModelParams: omega_a must be positive");
    if (J.twice() <= 0) throw DomainError("ModelParams: J must be positive");
    if (n_max < 1) throw DomainError("ModelParams: n_max must be at least 1");
    if (!std::isfinite(G) || !std::isfinite(Gp)) throw DomainError("ModelParams: non-finite coupling");
}

BasisIndex::BasisIndex(const ModelParams& params)
    : J_(params.J), spin_dim_(params.spin_dim()), n_max_(params.n_max) {
    params.validate();
}

int BasisIndex::flat(int n, HalfInt m) const {
    if (n < 0 || n > n_max_) throw DomainError("BasisIndex: photon number out of range");
    if (std::abs(m.twice()) > J_.twice() || !(J_ + m).is_integer())
        throw DomainError("BasisIndex: projection " + m.str() + " out of range");
    return n * spin_dim_ + (m + J_).twice() / 2;
}

BasisIndex build_basis(const ModelParams& params) { return BasisIndex(params); }

HermitianMatrix build_hamiltonian(const ModelParams& params) {
    const BasisIndex basis(params);
    const int D = basis.dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.J.twice()));
    const double jc = params.G * scale;
    const double ajc = params.Gp * scale;

    HermitianMatrix H = HermitianMatrix::Zero(D, D);
    for (int i = 0; i < D; ++i) {
        const auto [n, m] = basis.unflat(i);
        H(i, i) = params.omega0 * n + params.omega_a * m.value();
        if (m >= params.J) continue;
        const HalfInt up = m + HalfInt::from_twice(2);
        const double jp = raising_element(params.J, m);
        // a J+ : (n, m) -> (n-1, m+1)
        if (n >= 1 && jc != 0.0) {
            const int k = basis.flat(n - 1, up);
            H(std::min(i, k), std::max(i, k)) += jc * std::sqrt(static_cast<double>(n)) * jp;
        }
        // a+ J+ : (n, m) -> (n+1, m+1)
        if (n < params.n_max && ajc != 0.0) {
            const int k = basis.flat(n + 1, up);
            H(std::min(i, k), std::max(i, k)) += ajc * std::sqrt(static_cast<double>(n + 1)) * jp;
        }
    }
    H.triangularView<Eigen::StrictlyLower>() = H.transpose();
    return H;
}

DiagonalSignMatrix parity_operator(const ModelParams& params) {
    const BasisIndex basis(params);
    Eigen::VectorXd signs(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        const auto [n, m] = basis.unflat(i);
        const int excitations = n + (m + params.J).twice() / 2;
        signs[i] = excitations % 2 == 0 ? 1.0 : -1.0;
    }
    return DiagonalSignMatrix(signs);
}

Eigen::VectorXd excitation_number(const ModelParams& params) {
    const BasisIndex basis(params);
    Eigen::VectorXd N(basis.dim());
    for (int i = 0; i < basis.dim(); ++i) {
        const auto [n, m] = basis.unflat(i);
        N[i] = n + (m + params.J).twice() / 2;
    }
    return N;
}

std::array<std::vector<int>, 2> parity_sectors(const ModelParams& params) {
    const auto P = parity_operator(params);
    std::array<std::vector<int>, 2> sectors;
    for (int i = 0; i < P.rows(); ++i) sectors[P.diagonal()[i] > 0 ? 0 : 1].push_back(i);
    return sectors;
}

}  // namespace dicke::hilbert
