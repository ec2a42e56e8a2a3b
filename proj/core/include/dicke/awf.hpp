#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "dicke/evolve.hpp"
#include "dicke/specfun.hpp"

namespace dicke::awf {

using Complex = std::complex<double>;

/// T_KQ = sum_M (-1)^(J-M) sqrt(2K+1) (J K J; -M Q M-Q) |J,M><J,M-Q|.
/// Rows and columns indexed by M + J. Throws DomainError for K > 2J or |Q| > K.
Eigen::MatrixXd multipole_operator(int K, int Q, HalfInt J);

/// Nonzero entries of every T_KQ for one J, computed once.
class MultipoleBasis {
public:
    explicit MultipoleBasis(HalfInt J);

    HalfInt J() const { return J_; }
    int max_rank() const { return J_.twice(); }
    /// (T_KQ)_{M, M-Q} for the row index M + J; zero when M - Q is out of range.
    double element(int K, int Q, int row) const { return data_[offset(K, Q) + row]; }

    /// Shared instance per J; construction is thread-safe.
    static const MultipoleBasis& cached(HalfInt J);

private:
    std::size_t offset(int K, int Q) const {
        return (static_cast<std::size_t>(K) * K + (Q + K)) * static_cast<std::size_t>(dim_);
    }

    HalfInt J_;
    int dim_;
    std::vector<double> data_;
};

/// rho_KQ = Tr[rho T_KQ] for K = 0..2J, Q = -K..K.
class MultipoleCoeffs {
public:
    MultipoleCoeffs() = default;
    explicit MultipoleCoeffs(HalfInt J)
        : J_(J), data_(static_cast<std::size_t>(J.twice() + 1) * (J.twice() + 1)) {}

    HalfInt J() const { return J_; }
    int max_rank() const { return J_.twice(); }
    Complex& at(int K, int Q) { return data_[index(K, Q)]; }
    const Complex& at(int K, int Q) const { return data_[index(K, Q)]; }
    /// Sum of |rho_KQ|^2; equals Tr(rho^2).
    double squared_norm() const;

private:
    std::size_t index(int K, int Q) const;

    HalfInt J_;
    std::vector<Complex> data_;
};

MultipoleCoeffs multipole_coeffs(const evolve::AtomicDensityMatrix& rho);

struct GridSpec {
    int n_theta = 128;
    int n_phi = 256;
    /// Azimuthal nodes are phi_j = -pi + phi_offset + 2 pi j / n_phi. A zero
    /// offset gives a grid symmetric about phi = 0.
    double phi_offset = 0.0;
};

/// W sampled on Gauss-Legendre nodes in cos(theta) times a uniform periodic
/// azimuthal grid. values(i, j) is W(thetas[i], phis[j]).
struct WignerGrid {
    std::vector<double> thetas;         ///< ascending polar angles
    std::vector<double> theta_weights;  ///< Gauss-Legendre weights in cos(theta)
    std::vector<double> phis;
    double phi_weight = 0.0;            ///< 2 pi / n_phi
    Eigen::MatrixXd values;
    double max_imaginary_residue = 0.0;

    double weight(int i) const { return theta_weights[i] * phi_weight; }
    int n_theta() const { return static_cast<int>(thetas.size()); }
    int n_phi() const { return static_cast<int>(phis.size()); }
    /// Quadrature of W over the sphere.
    double integral() const;
    /// Quadrature of W^2 over the sphere.
    double integral_squared() const;
};

/// Residue threshold above which wigner_on_grid reports a numerical error.
inline constexpr double kMaxImaginaryResidue = 1e-10;

/// W(theta, phi) = sqrt((2J+1)/4pi) sum_KQ rho_KQ e^(iQ phi0) Y_KQ(theta, phi).
/// The phase rotates the frame so that direction phi0 of the unrotated
/// function appears at phi = 0.
WignerGrid wigner_on_grid(const MultipoleCoeffs& coeffs, const GridSpec& spec = {}, double phi0 = 0.0);

/// Frame angle that puts the centre of a coherent packet at phi = 0, read off
/// the dipole coefficient rho_11. Zero when the dipole vanishes.
double frame_angle(const MultipoleCoeffs& initial);

struct NegativityMetrics {
    double min_value;
    double max_value;
    double depth_fraction;        ///< |min W| / max W (0 when W >= 0)
    double negative_solid_angle;  ///< quadrature weight of W < 0 nodes
};

NegativityMetrics negativity_metrics(const WignerGrid& grid);

struct StructureMetrics {
    int component_count;
    double smallest_solid_angle;
    double reference_solid_angle;

    double smallest_relative() const { return smallest_solid_angle / reference_solid_angle; }
};

/// Solid angle of the largest connected component of {|W| > alpha max|W|}.
double packet_solid_angle(const WignerGrid& grid, double alpha);

/// Connected components of {|W| > alpha max|W|} under 4-neighbour adjacency
/// with periodic wraparound in phi. Areas are quadrature-weight sums; the
/// reference is packet_solid_angle of `reference` (the t = 0 grid).
StructureMetrics structure_metrics(const WignerGrid& grid, double alpha, const WignerGrid& reference);

/// max |W(theta,phi) - W(theta,-phi)| / max|W|. Throws DomainError when the
/// azimuthal grid is not symmetric about phi = 0.
double mirror_asymmetry(const WignerGrid& grid);

/// (4 pi / (2J+1)) * integral of W^2; equals Tr(rho^2).
double purity_from_grid(const WignerGrid& grid, HalfInt J);

}  // namespace dicke::awf
