#include "dicke/awf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include "dicke/errors.hpp"
#include "dicke/numeric.hpp"

namespace dicke::awf {

namespace {

using specfun::ThreeJArgs;

void check_rank(int K, int Q, HalfInt J) {
    if (K < 0 || K > J.twice()) throw DomainError("multipole rank K must satisfy 0 <= K <= 2J");
    if (std::abs(Q) > K) throw DomainError("multipole component must satisfy |Q| <= K");
}

// (T_KQ)_{M, M-Q} for row index M + J.
double t_element(int K, int Q, HalfInt J, int row) {
    const HalfInt M = HalfInt::from_twice(2 * row - J.twice());
    const HalfInt MQ = M - HalfInt(Q);
    if (std::abs(MQ.twice()) > J.twice()) return 0.0;
    const double threej = specfun::wigner_3j(ThreeJArgs{J, HalfInt(K), J, -M, HalfInt(Q), MQ});
    const int phase = (J - M).twice() / 2;
    return (phase % 2 == 0 ? 1.0 : -1.0) * std::sqrt(2.0 * K + 1.0) * threej;
}

// Union-find over grid nodes.
class Components {
public:
    explicit Components(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

// Solid angle of each connected component of {|W| > alpha max|W|}.
std::vector<double> component_areas(const WignerGrid& grid, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("structure threshold alpha must lie in (0, 1)");
    const int nt = grid.n_theta();
    const int np = grid.n_phi();
    const double level = alpha * grid.values.cwiseAbs().maxCoeff();
    auto inside = [&](int i, int j) { return std::abs(grid.values(i, j)) > level; };
    auto node = [&](int i, int j) { return i * np + j; };

    Components uf(nt * np);
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            if (!inside(i, j)) continue;
            const int jn = (j + 1) % np;
            if (inside(i, jn)) uf.unite(node(i, j), node(i, jn));
            if (i + 1 < nt && inside(i + 1, j)) uf.unite(node(i, j), node(i + 1, j));
        }
    }
    std::map<int, std::vector<double>> weights;
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j)
            if (inside(i, j)) weights[uf.find(node(i, j))].push_back(grid.weight(i));
    std::vector<double> areas;
    areas.reserve(weights.size());
    for (const auto& [root, w] : weights) areas.push_back(pairwise_sum(w));
    return areas;
}

}  // namespace

Eigen::MatrixXd multipole_operator(int K, int Q, HalfInt J) {
    check_rank(K, Q, J);
    const int d = J.twice() + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
    for (int row = 0; row < d; ++row) {
        const int col = row - Q;
        if (col < 0 || col >= d) continue;
        T(row, col) = t_element(K, Q, J, row);
    }
    return T;
}

MultipoleBasis::MultipoleBasis(HalfInt J) : J_(J), dim_(J.twice() + 1) {
    if (J.twice() <= 0) throw DomainError("MultipoleBasis: J must be positive");
    const int kmax = J.twice();
    data_.assign(static_cast<std::size_t>(kmax + 1) * (kmax + 1) * dim_, 0.0);
    for (int K = 0; K <= kmax; ++K)
        for (int Q = -K; Q <= K; ++Q)
            for (int row = 0; row < dim_; ++row) data_[offset(K, Q) + row] = t_element(K, Q, J, row);
}

const MultipoleBasis& MultipoleBasis::cached(HalfInt J) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const MultipoleBasis>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[J.twice()];
    if (!slot) slot = std::make_unique<const MultipoleBasis>(J);
    return *slot;
}

std::size_t MultipoleCoeffs::index(int K, int Q) const {
    if (K < 0 || K > J_.twice() || std::abs(Q) > K) throw DomainError("MultipoleCoeffs: (K, Q) out of range");
    return static_cast<std::size_t>(K) * K + (Q + K);
}

double MultipoleCoeffs::squared_norm() const {
    std::vector<double> sq(data_.size());
    std::transform(data_.begin(), data_.end(), sq.begin(), [](Complex c) { return std::norm(c); });
    return pairwise_sum(sq);
}

MultipoleCoeffs multipole_coeffs(const evolve::AtomicDensityMatrix& rho) {
    const HalfInt J = rho.J();
    const int d = rho.dim();
    const auto& basis = MultipoleBasis::cached(J);
    MultipoleCoeffs out(J);
    for (int K = 0; K <= J.twice(); ++K) {
        for (int Q = -K; Q <= K; ++Q) {
            // Tr[rho T] = sum_M T_{M, M-Q} rho_{M-Q, M}
            Complex acc = 0.0;
            for (int row = std::max(0, Q); row < std::min(d, d + Q); ++row)
                acc += basis.element(K, Q, row) * rho.rho(row - Q, row);
            out.at(K, Q) = acc;
        }
    }
    return out;
}

double WignerGrid::integral() const {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(values.size()));
    for (int i = 0; i < n_theta(); ++i)
        for (int j = 0; j < n_phi(); ++j) terms.push_back(weight(i) * values(i, j));
    return pairwise_sum(terms);
}

double WignerGrid::integral_squared() const {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(values.size()));
    for (int i = 0; i < n_theta(); ++i)
        for (int j = 0; j < n_phi(); ++j) terms.push_back(weight(i) * values(i, j) * values(i, j));
    return pairwise_sum(terms);
}

WignerGrid wigner_on_grid(const MultipoleCoeffs& coeffs, const GridSpec& spec, double phi0) {
    if (spec.n_theta < 1 || spec.n_phi < 1) throw DomainError("wigner_on_grid: empty grid");
    const int kmax = coeffs.max_rank();
    const double prefactor = std::sqrt((kmax + 1.0) / (4.0 * std::numbers::pi));

    WignerGrid grid;
    const GaussLegendre gl = gauss_legendre(spec.n_theta);
    // Ascending theta means descending cos(theta).
    for (int i = spec.n_theta - 1; i >= 0; --i) {
        grid.thetas.push_back(std::acos(gl.nodes[i]));
        grid.theta_weights.push_back(gl.weights[i]);
    }
    grid.phi_weight = 2.0 * std::numbers::pi / spec.n_phi;
    for (int j = 0; j < spec.n_phi; ++j)
        grid.phis.push_back(-std::numbers::pi + spec.phi_offset + j * grid.phi_weight);
    grid.values.resize(spec.n_theta, spec.n_phi);

    // Rotated coefficients rho_KQ e^(iQ phi0), flattened by (Q, K).
    const int nq = 2 * kmax + 1;
    std::vector<Complex> rotated(static_cast<std::size_t>(nq) * (kmax + 1), 0.0);
    for (int K = 0; K <= kmax; ++K)
        for (int Q = -K; Q <= K; ++Q)
            rotated[static_cast<std::size_t>(Q + kmax) * (kmax + 1) + K] =
                coeffs.at(K, Q) * std::exp(Complex(0.0, Q * phi0));

    std::vector<Complex> azimuthal(static_cast<std::size_t>(spec.n_phi) * nq);
    for (int j = 0; j < spec.n_phi; ++j)
        for (int Q = -kmax; Q <= kmax; ++Q)
            azimuthal[static_cast<std::size_t>(j) * nq + (Q + kmax)] = std::exp(Complex(0.0, Q * grid.phis[j]));

    std::vector<double> residues(spec.n_theta, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < spec.n_theta; ++i) {
        // f_Q(theta) = sum_K rho'_KQ Y_KQ(theta, 0); W = sum_Q f_Q e^(iQ phi)
        std::vector<Complex> f(nq, 0.0);
        for (int Q = -kmax; Q <= kmax; ++Q) {
            Complex acc = 0.0;
            for (int K = std::abs(Q); K <= kmax; ++K)
                acc += rotated[static_cast<std::size_t>(Q + kmax) * (kmax + 1) + K] *
                       specfun::spherical_harmonic(K, Q, grid.thetas[i], 0.0);
            f[Q + kmax] = acc;
        }
        double residue = 0.0;
        for (int j = 0; j < spec.n_phi; ++j) {
            Complex w = 0.0;
            const Complex* e = &azimuthal[static_cast<std::size_t>(j) * nq];
            for (int q = 0; q < nq; ++q) w += f[q] * e[q];
            w *= prefactor;
            grid.values(i, j) = w.real();
            residue = std::max(residue, std::abs(w.imag()));
        }
        residues[i] = residue;
    }
    grid.max_imaginary_residue = *std::max_element(residues.begin(), residues.end());
    if (grid.max_imaginary_residue > kMaxImaginaryResidue) {
        throw NumericalError("wigner_on_grid: imaginary residue " + std::to_string(grid.max_imaginary_residue) +
                             " (coefficients are not Hermitian)");
    }
    return grid;
}

double frame_angle(const MultipoleCoeffs& initial) {
    if (initial.max_rank() < 1) return 0.0;
    const Complex dipole = initial.at(1, 1);
    if (std::abs(dipole) < 1e-14) return 0.0;
    // K = 1 part of W is proportional to -sin(theta) Re[rho_11 e^(i(phi0 + phi))],
    // largest at phi = 0 when rho_11 e^(i phi0) is real and negative.
    double angle = std::numbers::pi - std::arg(dipole);
    angle = std::remainder(angle, 2.0 * std::numbers::pi);
    return angle;
}

NegativityMetrics negativity_metrics(const WignerGrid& grid) {
    NegativityMetrics m{};
    m.min_value = grid.values.minCoeff();
    m.max_value = grid.values.maxCoeff();
    m.depth_fraction = m.min_value < 0.0 ? -m.min_value / m.max_value : 0.0;
    std::vector<double> w;
    for (int i = 0; i < grid.n_theta(); ++i)
        for (int j = 0; j < grid.n_phi(); ++j)
            if (grid.values(i, j) < 0.0) w.push_back(grid.weight(i));
    m.negative_solid_angle = pairwise_sum(w);
    return m;
}

double packet_solid_angle(const WignerGrid& grid, double alpha) {
    const auto areas = component_areas(grid, alpha);
    if (areas.empty()) return 0.0;
    return *std::max_element(areas.begin(), areas.end());
}

StructureMetrics structure_metrics(const WignerGrid& grid, double alpha, const WignerGrid& reference) {
    const auto areas = component_areas(grid, alpha);
    StructureMetrics m{};
    m.component_count = static_cast<int>(areas.size());
    m.smallest_solid_angle = areas.empty() ? 0.0 : *std::min_element(areas.begin(), areas.end());
    m.reference_solid_angle = packet_solid_angle(reference, alpha);
    return m;
}

double mirror_asymmetry(const WignerGrid& grid) {
    const int np = grid.n_phi();
    std::vector<int> mirror(np);
    for (int j = 0; j < np; ++j) {
        // phi_j = -pi + j dphi maps to -phi_j = -pi + (np - j) dphi (mod 2 pi)
        const int jm = (np - j) % np;
        const double target = std::remainder(-grid.phis[j], 2.0 * std::numbers::pi);
        const double have = std::remainder(grid.phis[jm], 2.0 * std::numbers::pi);
        if (std::abs(std::remainder(target - have, 2.0 * std::numbers::pi)) > 1e-9)
            throw DomainError("mirror_asymmetry: azimuthal grid is not symmetric about phi = 0");
        mirror[j] = jm;
    }
    double worst = 0.0;
    for (int i = 0; i < grid.n_theta(); ++i)
        for (int j = 0; j < np; ++j)
            worst = std::max(worst, std::abs(grid.values(i, j) - grid.values(i, mirror[j])));
    const double scale = grid.values.cwiseAbs().maxCoeff();
    return scale > 0.0 ? worst / scale : 0.0;
}

double purity_from_grid(const WignerGrid& grid, HalfInt J) {
    return 4.0 * std::numbers::pi / (J.twice() + 1.0) * grid.integral_squared();
}

}  // namespace dicke::awf
