#pragma once

#include <complex>

#include <Eigen/Core>

#include "dicke/hilbert.hpp"

namespace dicke {

/// Classical phase-space point: atomic pair (q_a, p_a) on the disk of radius
/// sqrt(4J), field pair (q_f, p_f).
struct PhasePoint {
    double q_a = 0.0;
    double p_a = 0.0;
    double q_f = 0.0;
    double p_f = 0.0;

    double atomic_radius2() const { return q_a * q_a + p_a * p_a; }
};

namespace states {

using Complex = std::complex<double>;

struct CoherentParameters {
    Complex w;   ///< spin coherent parameter
    Complex nu;  ///< field coherent amplitude
};

struct FieldAmplitudes {
    Eigen::VectorXcd amplitudes;
    /// 1 - sum |c_n|^2 over the retained levels.
    double truncation_deficit = 0.0;
};

/// Largest truncation deficit accepted by field_coherent_amplitudes.
inline constexpr double kMaxTruncationDeficit = 1e-8;

/// (1+|w|^2)^(-J) exp(w J+) |J,-J>, amplitudes indexed by m+J.
Eigen::VectorXcd spin_coherent_amplitudes(Complex w, HalfInt J);

/// Glauber state truncated at n_max. Throws CutoffError when the deficit
/// exceeds kMaxTruncationDeficit.
FieldAmplitudes field_coherent_amplitudes(Complex nu, int n_max);

/// w = (p_a + i q_a)/sqrt(4J - q_a^2 - p_a^2), nu = (p_f + i q_f)/sqrt(2).
CoherentParameters phase_point_to_parameters(const PhasePoint& pt, HalfInt J);

/// Field point (q_f = 0, p_f > 0) on the energy shell H_cl = E for a given
/// atomic point. When two positive roots exist the larger one is returned.
PhasePoint energy_matched_field_point(double q_a, double p_a, double E,
                                      const hilbert::ModelParams& params);

/// |nu> (x) |w> in the BasisIndex ordering, renormalized after truncation.
JointState product_state(Complex w, Complex nu, const hilbert::ModelParams& params);

/// <J_z> of a spin state given by amplitudes over m = -J..J.
double mean_jz(const Eigen::VectorXcd& spin_amplitudes, HalfInt J);

}  // namespace states
}  // namespace dicke
