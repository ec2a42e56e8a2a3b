#include "dicke/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dicke/errors.hpp"
#include "dicke/numeric.hpp"

namespace dicke::evolve {

namespace {

constexpr Eigen::Index kBatch = 64;

// Eigen's tridiagonal QR rather than LAPACK: the OpenBLAS 0.3.20 DGEMM kernel
// selected on Cooper Lake CPUs returns wrong products for n >= 200, which
// corrupts every blocked LAPACK eigensolver built on it.
void solve_symmetric(Eigen::MatrixXd& a, Eigen::VectorXd& w) {
    if (a.rows() == 0) {
        w.resize(0);
        return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "diagonalize: eigensolver did not converge (n=" << a.rows()
            << ", max|H|=" << a.cwiseAbs().maxCoeff() << ")";
        throw NumericalError(msg.str());
    }
    w = solver.eigenvalues();
    a = solver.eigenvectors();
}

}  // namespace

SpectralDecomp diagonalize(const HermitianMatrix& H) {
    if (H.rows() != H.cols()) throw DomainError("diagonalize: matrix is not square");
    if (!H.allFinite()) throw NumericalError("diagonalize: matrix has non-finite entries");
    SpectralDecomp dec;
    dec.eigenvectors = H;
    solve_symmetric(dec.eigenvectors, dec.eigenvalues);
    return dec;
}

SpectralDecomp diagonalize_by_parity(const hilbert::ModelParams& params) {
    const HermitianMatrix H = hilbert::build_hamiltonian(params);
    const auto sectors = hilbert::parity_sectors(params);
    const Eigen::Index D = H.rows();

    std::vector<double> values;
    std::vector<std::pair<int, Eigen::Index>> owner;  // (sector, column within sector)
    std::array<SpectralDecomp, 2> blocks;
    for (int s = 0; s < 2; ++s) {
        const auto& idx = sectors[s];
        const auto n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd block(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) block(i, j) = H(idx[i], idx[j]);
        blocks[s] = diagonalize(block);
        for (Eigen::Index k = 0; k < n; ++k) {
            values.push_back(blocks[s].eigenvalues[k]);
            owner.emplace_back(s, k);
        }
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

    SpectralDecomp dec;
    dec.eigenvalues.resize(D);
    dec.eigenvectors = Eigen::MatrixXd::Zero(D, D);
    for (Eigen::Index col = 0; col < D; ++col) {
        const auto [s, k] = owner[order[col]];
        dec.eigenvalues[col] = values[order[col]];
        const auto& idx = sectors[s];
        for (std::size_t i = 0; i < idx.size(); ++i) dec.eigenvectors(idx[i], col) = blocks[s].eigenvectors(i, k);
    }
    return dec;
}

DecompResiduals residuals(const HermitianMatrix& H, const SpectralDecomp& dec) {
    const Eigen::MatrixXd& V = dec.eigenvectors;
    const Eigen::MatrixXd r = H * V - V * dec.eigenvalues.asDiagonal();
    const Eigen::MatrixXd o = V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols());
    const double hmax = H.cwiseAbs().maxCoeff();
    return {r.cwiseAbs().maxCoeff() / (hmax > 0.0 ? hmax : 1.0), o.cwiseAbs().maxCoeff()};
}

Propagator::Propagator(const SpectralDecomp& dec, const JointState& psi0) : dec_(dec) {
    if (psi0.size() != dec.dim()) throw DomainError("Propagator: state dimension does not match the spectrum");
    coeff_re_ = dec.eigenvectors.transpose() * psi0.real();
    coeff_im_ = dec.eigenvectors.transpose() * psi0.imag();
}

JointState Propagator::at(double t) const {
    const Eigen::Index D = dec_.dim();
    Eigen::VectorXd phi_re(D), phi_im(D);
    for (Eigen::Index k = 0; k < D; ++k) {
        const double c = std::cos(dec_.eigenvalues[k] * t);
        const double s = std::sin(dec_.eigenvalues[k] * t);
        // (re + i im) * (c - i s)
        phi_re[k] = coeff_re_[k] * c + coeff_im_[k] * s;
        phi_im[k] = coeff_im_[k] * c - coeff_re_[k] * s;
    }
    JointState psi(D);
    psi.real() = dec_.eigenvectors * phi_re;
    psi.imag() = dec_.eigenvectors * phi_im;
    return psi;
}

void Propagator::sweep(std::span<const double> times,
                       const std::function<void(std::size_t, const JointState&)>& visit) const {
    const Eigen::Index D = dec_.dim();
    const auto n_times = static_cast<Eigen::Index>(times.size());
    const Eigen::Index n_batches = (n_times + kBatch - 1) / kBatch;

#pragma omp parallel
    {
        Eigen::MatrixXd phi_re, phi_im, psi_re, psi_im;
        JointState psi(D);
#pragma omp for schedule(static)
        for (Eigen::Index b = 0; b < n_batches; ++b) {
            const Eigen::Index first = b * kBatch;
            const Eigen::Index cols = std::min(kBatch, n_times - first);
            phi_re.resize(D, cols);
            phi_im.resize(D, cols);
            for (Eigen::Index j = 0; j < cols; ++j) {
                const double t = times[first + j];
                for (Eigen::Index k = 0; k < D; ++k) {
                    const double c = std::cos(dec_.eigenvalues[k] * t);
                    const double s = std::sin(dec_.eigenvalues[k] * t);
                    phi_re(k, j) = coeff_re_[k] * c + coeff_im_[k] * s;
                    phi_im(k, j) = coeff_im_[k] * c - coeff_re_[k] * s;
                }
            }
            psi_re.noalias() = dec_.eigenvectors * phi_re;
            psi_im.noalias() = dec_.eigenvectors * phi_im;
            for (Eigen::Index j = 0; j < cols; ++j) {
                psi.real() = psi_re.col(j);
                psi.imag() = psi_im.col(j);
                visit(static_cast<std::size_t>(first + j), psi);
            }
        }
    }
}

JointState propagate(const SpectralDecomp& dec, const JointState& psi0, double t) {
    return Propagator(dec, psi0).at(t);
}

AtomicDensityMatrix reduce_atomic(const JointState& psi, const hilbert::BasisIndex& basis) {
    if (psi.size() != basis.dim()) throw DomainError("reduce_atomic: state dimension does not match the basis");
    const int d = basis.spin_dim();
    // Field-major ordering: column n of this view is the spin slice for |n>.
    const Eigen::Map<const Eigen::MatrixXcd> slices(psi.data(), d, basis.n_max() + 1);
    AtomicDensityMatrix out;
    out.rho = slices * slices.adjoint();
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    return out;
}

double linear_entropy(const AtomicDensityMatrix& rho) { return 1.0 - rho.rho.cwiseAbs2().sum(); }

Extrema find_extrema(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw DomainError("find_extrema: length mismatch");
    Extrema out;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double prev = values[i - 1], cur = values[i], next = values[i + 1];
        if (cur > prev && cur >= next) out.maxima.push_back({i, times[i], cur});
        if (cur < prev && cur <= next) out.minima.push_back({i, times[i], cur});
    }
    return out;
}

std::optional<double> plateau_onset(std::span<const double> times, std::span<const double> values,
                                    const PlateauOptions& options) {
    if (times.size() != values.size()) throw DomainError("plateau_onset: length mismatch");
    const std::size_t n = times.size();
    if (n < 2 || !(options.window > 0.0)) return std::nullopt;

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];
    const double slack = 1e-9 * options.window;

    // end_of[i]: first index with t >= t_i + window; a full window exists when
    // that index is inside the series.
    std::vector<std::size_t> end_of(n);
    for (std::size_t i = 0, j = 0; i < n; ++i) {
        j = std::max(j, i);
        while (j < n && times[j] < times[i] + options.window - slack) ++j;
        end_of[i] = j;
    }
    auto mean = [&](std::size_t i) {
        return (prefix[end_of[i]] - prefix[i]) / static_cast<double>(end_of[i] - i);
    };

    std::optional<std::size_t> onset;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = end_of[i];
        if (k >= n || end_of[k] >= n) break;  // no next full window
        const double m0 = mean(i);
        const bool stable = std::abs(mean(k) - m0) < options.max_rel_change * std::abs(m0);
        if (!stable)
            onset.reset();
        else if (!onset)
            onset = i;
    }
    if (!onset) return std::nullopt;
    return times[*onset];
}

double tail_population(const JointState& psi, const hilbert::BasisIndex& basis, int levels) {
    const int d = basis.spin_dim();
    const int first = std::max(0, basis.n_max() + 1 - levels);
    return psi.segment(static_cast<Eigen::Index>(first) * d, static_cast<Eigen::Index>(basis.n_max() + 1 - first) * d)
        .squaredNorm();
}

EntropySeries entropy_series(const SpectralDecomp& dec, const hilbert::BasisIndex& basis,
                             const JointState& psi0, std::span<const double> times,
                             const PlateauOptions& plateau) {
    if (!std::is_sorted(times.begin(), times.end())) throw DomainError("entropy_series: times must be sorted");
    EntropySeries out;
    out.times.assign(times.begin(), times.end());
    out.delta_a.assign(times.size(), 0.0);
    std::vector<double> tails(times.size(), 0.0);
    Propagator(dec, psi0).sweep(times, [&](std::size_t i, const JointState& psi) {
        out.delta_a[i] = linear_entropy(reduce_atomic(psi, basis));
        tails[i] = tail_population(psi, basis);
    });
    out.max_tail_population = tails.empty() ? 0.0 : *std::max_element(tails.begin(), tails.end());
    out.extrema = find_extrema(out.times, out.delta_a);
    out.plateau = plateau_onset(out.times, out.delta_a, plateau);
    return out;
}

EntropySeries entropy_series(const hilbert::ModelParams& params, const JointState& psi0,
                             std::span<const double> times, const PlateauOptions& plateau) {
    const auto dec = diagonalize(hilbert::build_hamiltonian(params));
    return entropy_series(dec, hilbert::build_basis(params), psi0, times, plateau);
}

double expectation(const HermitianMatrix& A, const JointState& psi) {
    const Eigen::VectorXd re = psi.real();
    const Eigen::VectorXd im = psi.imag();
    return re.dot(A * re) + im.dot(A * im);
}

double expectation_diagonal(const Eigen::VectorXd& a, const JointState& psi) {
    return a.dot(psi.cwiseAbs2());
}

std::vector<double> uniform_times(double t_start, double t_end, double dt) {
    if (!(dt > 0.0) || t_end < t_start) throw DomainError("uniform_times: need dt > 0 and t_end >= t_start");
    const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-3)) + 1;
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_start + static_cast<double>(i) * dt;
    return t;
}

}  // namespace dicke::evolve
