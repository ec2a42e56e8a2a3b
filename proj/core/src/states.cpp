#include "dicke/states.hpp"

#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "dicke/classical.hpp"
#include "dicke/errors.hpp"
#include "dicke/specfun.hpp"

namespace dicke::states {

Eigen::VectorXcd spin_coherent_amplitudes(Complex w, HalfInt J) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw DomainError("spin_coherent_amplitudes: non-finite w");
    const int two_j = J.twice();
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(two_j + 1);
    const double r = std::abs(w);
    if (r == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const double ln_r = std::log(r);
    const double arg = std::arg(w);
    const double ln_norm = -J.value() * std::log1p(r * r);
    const double ln_fact_2j = specfun::ln_factorial(two_j);
    for (int k = 0; k <= two_j; ++k) {
        const double ln_binom =
            ln_fact_2j - specfun::ln_factorial(k) - specfun::ln_factorial(two_j - k);
        const double modulus = std::exp(ln_norm + k * ln_r + 0.5 * ln_binom);
        c[k] = Complex(modulus * std::cos(k * arg), modulus * std::sin(k * arg));
    }
    return c;
}

FieldAmplitudes field_coherent_amplitudes(Complex nu, int n_max) {
    if (n_max < 0) throw DomainError("field_coherent_amplitudes: negative cutoff");
    FieldAmplitudes out;
    out.amplitudes = Eigen::VectorXcd::Zero(n_max + 1);
    const double r = std::abs(nu);
    if (r == 0.0) {
        out.amplitudes[0] = 1.0;
        return out;
    }
    const double ln_r = std::log(r);
    const double arg = std::arg(nu);
    for (int n = 0; n <= n_max; ++n) {
        const double modulus = std::exp(-0.5 * r * r + n * ln_r - 0.5 * specfun::ln_factorial(n));
        out.amplitudes[n] = Complex(modulus * std::cos(n * arg), modulus * std::sin(n * arg));
    }
    out.truncation_deficit = std::max(0.0, 1.0 - out.amplitudes.squaredNorm());
    if (out.truncation_deficit > kMaxTruncationDeficit) {
        throw CutoffError(fmt::format("field coherent state |nu|^2={:.6g} loses {:.3e} of its norm at n_max={}",
                                      r * r, out.truncation_deficit, n_max));
    }
    return out;
}

CoherentParameters phase_point_to_parameters(const PhasePoint& pt, HalfInt J) {
    const double four_j = 2.0 * J.twice();
    const double r2 = pt.atomic_radius2();
    if (!(r2 < four_j)) throw DomainError("phase point lies outside the Bloch-sphere border");
    return {Complex(pt.p_a, pt.q_a) / std::sqrt(four_j - r2),
            Complex(pt.p_f, pt.q_f) / std::sqrt(2.0)};
}

PhasePoint energy_matched_field_point(double q_a, double p_a, double E,
                                      const hilbert::ModelParams& params) {
    params.validate();
    PhasePoint pt{q_a, p_a, 0.0, 0.0};
    if (!(pt.atomic_radius2() < 2.0 * params.J.twice()))
        throw DomainError("energy_matched_field_point: atomic point outside the Bloch-sphere border");

    auto excess = [&](double p_f) {
        pt.p_f = p_f;
        return classical::classical_hamiltonian(pt, params) - E;
    };
    // On the q_f = 0 slice H_cl is a parabola in p_f with its vertex at
    // -s G+ p_a / omega0; the larger root lies to the right of it.
    const double s = std::sqrt(1.0 - pt.atomic_radius2() / (2.0 * params.J.twice()));
    double lo = std::max(0.0, -s * params.g_plus() * p_a / params.omega0);
    if (excess(lo) > 0.0) {
        throw EnergyInfeasibleError("no field point with q_f=0, p_f>0 reaches E=" + std::to_string(E) +
                                    " for (q_a, p_a)=(" + std::to_string(q_a) + ", " +
                                    std::to_string(p_a) + ")");
    }
    double hi = std::max(lo, std::sqrt(4.0 * std::max(E, 0.0) / params.omega0));
    for (int grow = 0; excess(hi) < 0.0; ++grow) {
        if (grow > 200) throw EnergyInfeasibleError("energy_matched_field_point: bracket search failed");
        hi = 2.0 * hi + 1.0;
    }
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    // Keep whichever bracket end is closer to the shell.
    pt.p_f = std::abs(excess(lo)) <= std::abs(excess(hi)) ? lo : hi;
    if (!(pt.p_f > 0.0)) throw EnergyInfeasibleError("energy_matched_field_point: root is not positive");
    return pt;
}

JointState product_state(Complex w, Complex nu, const hilbert::ModelParams& params) {
    params.validate();
    const Eigen::VectorXcd spin = spin_coherent_amplitudes(w, params.J);
    const FieldAmplitudes field = field_coherent_amplitudes(nu, params.n_max);
    const int d = params.spin_dim();
    JointState psi(params.dim());
    for (int n = 0; n <= params.n_max; ++n) psi.segment(n * d, d) = field.amplitudes[n] * spin;
    const double norm = psi.norm();
    psi /= norm;
    spdlog::debug("product_state: truncation renormalization factor {:.17g} (deficit {:.3e})",
                  1.0 / norm, field.truncation_deficit);
    return psi;
}

double mean_jz(const Eigen::VectorXcd& spin_amplitudes, HalfInt J) {
    double acc = 0.0;
    for (int k = 0; k < spin_amplitudes.size(); ++k)
        acc += std::norm(spin_amplitudes[k]) * (k - J.value());
    return acc / spin_amplitudes.squaredNorm();
}

}  // namespace dicke::states
