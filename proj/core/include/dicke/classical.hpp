#pragma once

#include <array>
#include <vector>

#include "dicke/hilbert.hpp"
#include "dicke/states.hpp"

namespace dicke::classical {

/// Coherent-state expectation of the Dicke Hamiltonian:
///   omega0 (p_f^2+q_f^2)/2 + omega_a (p_a^2+q_a^2)/2 - omega_a J
///   + sqrt((4J - p_a^2 - q_a^2)/(4J)) (G+ p_a p_f + G- q_a q_f)
/// Throws DomainError when the atomic radius exceeds sqrt(4J).
double classical_hamiltonian(const PhasePoint& pt, const hilbert::ModelParams& params);

/// Partials ordered (dH/dq_a, dH/dp_a, dH/dq_f, dH/dp_f). Interior points only.
std::array<double, 4> gradient(const PhasePoint& pt, const hilbert::ModelParams& params);

struct IntegratorOptions {
    double tol = 1e-13;             ///< local error tolerance (absolute and relative)
    double h_init = 1e-2;
    double h_min = 1e-13;
    long max_steps = 50'000'000;
    double max_energy_drift = 1e-9; ///< relative; checked on every accepted step
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    double max_energy_drift = 0.0;  ///< max |H - H0| / |H0| seen
};

/// Adaptive Dormand-Prince 5(4) solution of Hamilton's equations from pt0 up
/// to t_end (negative t_end integrates backwards). Every accepted step is
/// recorded. Throws IntegrationError on step underflow or energy drift.
Trajectory integrate(const PhasePoint& pt0, double t_end, const hilbert::ModelParams& params,
                     const IntegratorOptions& options = {});

struct SectionCrossing {
    double t;
    double q_a;
    double p_a;
};

struct SectionPoints {
    std::vector<SectionCrossing> crossings;
    bool complete = true;  ///< false if t_max was reached first
};

struct SectionOptions {
    IntegratorOptions integrator{};
    double t_max = 1e5;
    double crossing_tol = 1e-10;  ///< |q_f| at the refined crossing
};

/// Crossings of q_f = 0 with p_f > 0, refined by bisection on the dense
/// output, projected to (q_a, p_a). A partial result is returned (and a
/// warning logged) when fewer than n_crossings are found before t_max.
SectionPoints poincare_section(const PhasePoint& pt0, int n_crossings,
                               const hilbert::ModelParams& params,
                               const SectionOptions& options = {});

/// J_z / J of the classical spin: (q_a^2 + p_a^2)/(2J) - 1.
double classical_jz_over_j(const PhasePoint& pt, HalfInt J);

}  // namespace dicke::classical
