#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "dicke/errors.hpp"
#include "dicke/evolve.hpp"
#include "dicke/states.hpp"

using namespace dicke;
using namespace dicke::evolve;

namespace {

constexpr HalfInt kJ = HalfInt::from_twice(21);

hilbert::ModelParams reference_model(double Gp, int n_max) {
    hilbert::ModelParams p;
    p.G = 0.5;
    p.Gp = Gp;
    p.J = kJ;
    p.n_max = n_max;
    return p;
}

JointState initial_state(double q_norm, double p_norm, const hilbert::ModelParams& params) {
    const double s = std::sqrt(2.0 * params.J.twice());
    const auto pt = states::energy_matched_field_point(q_norm * s, p_norm * s, 21.0, params);
    const auto cp = states::phase_point_to_parameters(pt, params.J);
    return states::product_state(cp.w, cp.nu, params);
}

}  // namespace

TEST_CASE("diagonal input") {
    Eigen::MatrixXd H = Eigen::Vector4d(3.0, -1.0, 2.0, 0.5).asDiagonal();
    const auto dec = diagonalize(H);
    CHECK(dec.eigenvalues[0] == -1.0);
    CHECK(dec.eigenvalues[1] == 0.5);
    CHECK(dec.eigenvalues[2] == 2.0);
    CHECK(dec.eigenvalues[3] == 3.0);
    CHECK((dec.eigenvectors.cwiseAbs().colwise().sum().array() == 1.0).all());
}

TEST_CASE("Jaynes-Cummings block eigenvalues") {
    Eigen::Matrix2d block;
    block << 0.5, 0.5, 0.5, 0.5;
    const auto dec = diagonalize(block);
    CHECK(std::abs(dec.eigenvalues[0]) < 1e-15);
    CHECK(std::abs(dec.eigenvalues[1] - 1.0) < 1e-15);
}

TEST_CASE("non-finite input is a numerical error") {
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(3, 3);
    H(1, 1) = std::nan("");
    CHECK_THROWS_AS(diagonalize(H), NumericalError);
}

TEST_CASE("spectral decomposition of the reference Hamiltonian (D = 2222)") {
    const auto p = reference_model(0.2, 100);
    const auto H = hilbert::build_hamiltonian(p);
    REQUIRE(H.rows() == 2222);
    const auto dec = diagonalize(H);
    CHECK(std::is_sorted(dec.eigenvalues.begin(), dec.eigenvalues.end()));
    const auto r = residuals(H, dec);
    CHECK(r.reconstruction < 1e-9);
    CHECK(r.orthogonality < 1e-11);
}

TEST_CASE("propagation") {
    const auto p = reference_model(0.2, 50);
    const auto dec = diagonalize(hilbert::build_hamiltonian(p));
    const auto psi0 = initial_state(0.0, 0.54, reference_model(0.2, 50)).eval();
    CHECK((propagate(dec, psi0, 0.0) - psi0).cwiseAbs().maxCoeff() < 1e-13);

    const Propagator prop(dec, psi0);
    for (double t : {0.5, 7.0, 33.3, 100.0}) CHECK(std::abs(prop.at(t).norm() - 1.0) < 1e-12);

    // eigenstate: global phase only
    const JointState eig = dec.eigenvectors.col(17).cast<std::complex<double>>();
    const auto later = propagate(dec, eig, 12.5);
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, -dec.eigenvalues[17] * 12.5));
    CHECK((later - phase * eig).cwiseAbs().maxCoeff() < 1e-12);

    // batched sweep agrees with single-time propagation
    const std::vector<double> times = uniform_times(0.0, 10.0, 0.1);
    double worst = 0.0;
    prop.sweep(times, [&](std::size_t i, const JointState& psi) {
        const double diff = (psi - prop.at(times[i])).cwiseAbs().maxCoeff();
#pragma omp critical
        worst = std::max(worst, diff);
    });
    CHECK(worst < 1e-13);
}

TEST_CASE("reduced density matrix and linear entropy") {
    const auto p = reference_model(0.0, 3);
    const auto basis = hilbert::build_basis(p);
    JointState bell = JointState::Zero(basis.dim());
    bell[basis.flat(0, kJ)] = 1.0 / std::sqrt(2.0);
    bell[basis.flat(1, kJ - HalfInt(1))] = 1.0 / std::sqrt(2.0);
    const auto rho = reduce_atomic(bell, basis);
    CHECK(linear_entropy(rho) == doctest::Approx(0.5).epsilon(1e-15));

    AtomicDensityMatrix mixed{Eigen::MatrixXcd::Identity(22, 22) / 22.0};
    CHECK(linear_entropy(mixed) == doctest::Approx(1.0 - 1.0 / 22.0).epsilon(1e-15));

    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        JointState psi(basis.dim());
        for (auto& c : psi) c = {g(rng), g(rng)};
        psi.normalize();
        const auto r = reduce_atomic(psi, basis);
        CHECK(std::abs(r.rho.trace() - 1.0) < 1e-12);
        CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r.rho);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        const double delta = linear_entropy(r);
        CHECK(delta >= -1e-12);
        CHECK(delta <= 1.0 - 1.0 / 22.0 + 1e-12);
    }
}

TEST_CASE("extrema and plateau detection on synthetic series") {
    const auto t = uniform_times(0.0, 100.0, 0.05);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = 0.3 + 0.2 * std::sin(t[i]);
    const auto ex = find_extrema(t, v);
    REQUIRE(!ex.maxima.empty());
    REQUIRE(!ex.minima.empty());
    CHECK(std::abs(ex.maxima.front().t - std::numbers::pi / 2) <= 0.025);
    CHECK(ex.maxima.front().value == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(std::abs(ex.minima.front().t - 3 * std::numbers::pi / 2) <= 0.025);
    CHECK(ex.maxima.size() == 16);

    // A drop from 1 to 0.5 at t = 30: a window straddling the drop still
    // passes the 2 % rule once fewer than ~4 % of its samples precede it.
    std::vector<double> step(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) step[i] = t[i] < 30.0 - 1e-9 ? 1.0 : 0.5;
    const auto onset = plateau_onset(t, step);
    REQUIRE(onset.has_value());
    CHECK(*onset >= 29.5);
    CHECK(*onset <= 30.0 + 1e-9);

    std::vector<double> ramp(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) ramp[i] = 0.01 * t[i];
    CHECK(!plateau_onset(t, ramp).has_value());
    const auto flat = find_extrema(t, std::vector<double>(t.size(), 0.3));
    CHECK(flat.maxima.empty());
    CHECK(flat.minima.empty());
}

TEST_CASE("conservation laws along the evolution") {
    for (double Gp : {0.0, 0.2}) {
        const auto p = reference_model(Gp, 60);
        const auto H = hilbert::build_hamiltonian(p);
        const auto dec = diagonalize(H);
        const auto psi0 = initial_state(0.0, Gp == 0.0 ? 0.55 : 0.54, p);
        const Eigen::VectorXd parity = hilbert::parity_operator(p).diagonal();
        const Eigen::VectorXd N = hilbert::excitation_number(p);
        const double e0 = expectation(H, psi0);
        const double par0 = expectation_diagonal(parity, psi0);
        const double n0 = expectation_diagonal(N, psi0);
        const Propagator prop(dec, psi0);
        for (double t : {1.0, 10.0, 50.0}) {
            const auto psi = prop.at(t);
            CHECK(std::abs(expectation(H, psi) - e0) < 1e-10);
            CHECK(std::abs(expectation_diagonal(parity, psi) - par0) < 1e-10);
            if (Gp == 0.0) CHECK(std::abs(expectation_diagonal(N, psi) - n0) < 1e-10);
        }
    }
}

TEST_CASE("parity-block propagation matches the dense path") {
    const auto p = reference_model(0.2, 50);
    const auto full = diagonalize(hilbert::build_hamiltonian(p));
    const auto blocks = diagonalize_by_parity(p);
    CHECK((full.eigenvalues - blocks.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    const auto psi0 = initial_state(0.0, 0.54, reference_model(0.2, 50)).eval();
    const auto times = uniform_times(0.0, 20.0, 0.25);
    const auto basis = hilbert::build_basis(p);
    const auto a = entropy_series(full, basis, psi0, times);
    const auto b = entropy_series(blocks, basis, psi0, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(a.delta_a[i] - b.delta_a[i]));
    CHECK(worst < 1e-10);
}

TEST_CASE("entropy series starts pure and respects bounds") {
    const auto p = reference_model(0.0, 60);
    const auto psi0 = initial_state(0.1, 0.95, p);
    const auto times = uniform_times(0.0, 20.0, 0.05);
    const auto series = entropy_series(p, psi0, times);
    CHECK(series.delta_a.front() < 1e-10);
    for (double d : series.delta_a) {
        CHECK(d >= -1e-12);
        CHECK(d <= 1.0 - 1.0 / 22.0 + 1e-12);
    }
    CHECK(series.cutoff_ok());
    REQUIRE(!series.extrema.maxima.empty());
    CHECK(std::abs(series.extrema.maxima.front().value - 0.5) < 0.1);
    CHECK_THROWS_AS(entropy_series(p, psi0, std::vector<double>{1.0, 0.0}), DomainError);
}
