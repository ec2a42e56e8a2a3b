#include "dicke/classical.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <spdlog/spdlog.h>

#include "dicke/errors.hpp"

namespace dicke::classical {

namespace {

using State = std::array<double, 4>;  // (q_a, p_a, q_f, p_f)

State to_state(const PhasePoint& p) { return {p.q_a, p.p_a, p.q_f, p.p_f}; }
PhasePoint to_point(const State& s) { return {s[0], s[1], s[2], s[3]}; }

double four_j(const hilbert::ModelParams& params) { return 2.0 * params.J.twice(); }

// Hamilton's equations; returns false outside the open atomic disk.
bool rhs(const State& y, const hilbert::ModelParams& params, State& dy) {
    const PhasePoint pt = to_point(y);
    if (!(pt.atomic_radius2() < four_j(params))) return false;
    const auto g = gradient(pt, params);
    dy = {g[1], -g[0], g[3], -g[2]};
    return true;
}

// Dormand-Prince 5(4) tableau with Hairer's continuous extension.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> coeff{};

    State at(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State y{};
        for (int i = 0; i < 4; ++i) {
            y[i] = coeff[0][i] +
                   th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
        }
        return y;
    }
};

class Stepper {
public:
    Stepper(const hilbert::ModelParams& params, const IntegratorOptions& options, const State& y0,
            double direction)
        : params_(params), opt_(options), y_(y0), dir_(direction), h_(options.h_init) {
        if (!rhs(y_, params_, k1_)) throw DomainError("integrate: initial point outside the Bloch-sphere border");
    }

    double t() const { return t_; }
    const State& y() const { return y_; }
    const DenseStep& dense() const { return dense_; }

    // Advances by one accepted step without passing t_stop.
    void step(double t_stop) {
        for (int attempt = 0;; ++attempt) {
            double h = std::min(h_, std::abs(t_stop - t_));
            if (h < opt_.h_min && std::abs(t_stop - t_) > opt_.h_min) fail("step size underflow");
            const double hs = dir_ * h;
            State y1{};
            State k7{};
            double err = 0.0;
            if (!try_step(hs, y1, k7, err)) {
                h_ = 0.25 * h;
                continue;
            }
            if (err <= 1.0 || h <= opt_.h_min) {
                accept(hs, y1, k7);
                const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h_ = h * std::clamp(fac, 0.2, 5.0);
                return;
            }
            h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            if (attempt > 10000) fail("too many rejected steps");
        }
    }

private:
    bool try_step(double h, State& y1, State& k7, double& err) {
        using namespace dp;
        State tmp{};
        auto stage = [&](auto&& combine, State& k) {
            for (int i = 0; i < 4; ++i) tmp[i] = y_[i] + h * combine(i);
            return rhs(tmp, params_, k);
        };
        if (!stage([&](int i) { return a21 * k1_[i]; }, k2_)) return false;
        if (!stage([&](int i) { return a31 * k1_[i] + a32 * k2_[i]; }, k3_)) return false;
        if (!stage([&](int i) { return a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]; }, k4_)) return false;
        if (!stage([&](int i) { return a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]; }, k5_))
            return false;
        if (!stage([&](int i) {
                return a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i];
            }, k6_))
            return false;
        for (int i = 0; i < 4; ++i)
            y1[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        if (!rhs(y1, params_, k7)) return false;
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                                  e7 * k7[i]);
            const double sc = opt_.tol * (1.0 + std::max(std::abs(y_[i]), std::abs(y1[i])));
            acc += (e / sc) * (e / sc);
        }
        err = std::sqrt(acc / 4.0);
        return std::isfinite(err);
    }

    void accept(double h, const State& y1, const State& k7) {
        using namespace dp;
        dense_.t0 = t_;
        dense_.h = h;
        for (int i = 0; i < 4; ++i) {
            const double ydiff = y1[i] - y_[i];
            const double bspl = h * k1_[i] - ydiff;
            dense_.coeff[0][i] = y_[i];
            dense_.coeff[1][i] = ydiff;
            dense_.coeff[2][i] = bspl;
            dense_.coeff[3][i] = ydiff - h * k7[i] - bspl;
            dense_.coeff[4][i] =
                h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7[i]);
        }
        t_ += h;
        y_ = y1;
        k1_ = k7;
    }

    [[noreturn]] void fail(const char* what) const {
        const PhasePoint p = to_point(y_);
        std::ostringstream msg;
        msg << "integrate: " << what << " at t=" << t_ << " (q_a=" << p.q_a << ", p_a=" << p.p_a
            << ", q_f=" << p.q_f << ", p_f=" << p.p_f << ", atomic radius^2=" << p.atomic_radius2()
            << " of " << four_j(params_) << ", h=" << h_ << ")";
        throw IntegrationError(msg.str());
    }

    const hilbert::ModelParams& params_;
    IntegratorOptions opt_;
    State y_;
    double dir_;
    double t_ = 0.0;
    double h_;
    State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{};
    DenseStep dense_{};
};

class EnergyMonitor {
public:
    EnergyMonitor(const PhasePoint& p0, const hilbert::ModelParams& params, double bound)
        : params_(params), e0_(classical_hamiltonian(p0, params)), bound_(bound) {}

    double check(const PhasePoint& p, double t) {
        const double scale = std::max(std::abs(e0_), 1e-300);
        const double drift = std::abs(classical_hamiltonian(p, params_) - e0_) / scale;
        worst_ = std::max(worst_, drift);
        if (drift > bound_) {
            std::ostringstream msg;
            msg << "integrate: relative energy drift " << drift << " exceeds " << bound_ << " at t=" << t;
            throw IntegrationError(msg.str());
        }
        return drift;
    }
    double worst() const { return worst_; }

private:
    const hilbert::ModelParams& params_;
    double e0_;
    double bound_;
    double worst_ = 0.0;
};

}  // namespace

double classical_hamiltonian(const PhasePoint& pt, const hilbert::ModelParams& params) {
    const double fj = four_j(params);
    const double r2 = pt.atomic_radius2();
    if (r2 > fj) throw DomainError("classical_hamiltonian: atomic radius exceeds sqrt(4J)");
    const double s = std::sqrt((fj - r2) / fj);
    return 0.5 * params.omega0 * (pt.p_f * pt.p_f + pt.q_f * pt.q_f) + 0.5 * params.omega_a * r2 -
           params.omega_a * params.J.value() +
           s * (params.g_plus() * pt.p_a * pt.p_f + params.g_minus() * pt.q_a * pt.q_f);
}

std::array<double, 4> gradient(const PhasePoint& pt, const hilbert::ModelParams& params) {
    const double fj = four_j(params);
    const double r2 = pt.atomic_radius2();
    if (!(r2 < fj)) throw DomainError("gradient: point is not strictly inside the Bloch-sphere border");
    const double s = std::sqrt((fj - r2) / fj);
    const double gp = params.g_plus();
    const double gm = params.g_minus();
    const double coupling = gp * pt.p_a * pt.p_f + gm * pt.q_a * pt.q_f;
    // ds/dx = -x / (4J s)
    const double ds_scale = -1.0 / (fj * s);
    return {
        params.omega_a * pt.q_a + ds_scale * pt.q_a * coupling + s * gm * pt.q_f,
        params.omega_a * pt.p_a + ds_scale * pt.p_a * coupling + s * gp * pt.p_f,
        params.omega0 * pt.q_f + s * gm * pt.q_a,
        params.omega0 * pt.p_f + s * gp * pt.p_a,
    };
}

Trajectory integrate(const PhasePoint& pt0, double t_end, const hilbert::ModelParams& params,
                     const IntegratorOptions& options) {
    params.validate();
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.points.push_back(pt0);
    if (t_end == 0.0) return traj;

    const double dir = t_end > 0.0 ? 1.0 : -1.0;
    Stepper stepper(params, options, to_state(pt0), dir);
    EnergyMonitor energy(pt0, params, options.max_energy_drift);
    long steps = 0;
    while (dir * (t_end - stepper.t()) > 0.0) {
        if (++steps > options.max_steps) throw IntegrationError("integrate: step budget exhausted");
        stepper.step(t_end);
        const PhasePoint p = to_point(stepper.y());
        energy.check(p, stepper.t());
        traj.times.push_back(stepper.t());
        traj.points.push_back(p);
    }
    traj.max_energy_drift = energy.worst();
    return traj;
}

SectionPoints poincare_section(const PhasePoint& pt0, int n_crossings,
                               const hilbert::ModelParams& params, const SectionOptions& options) {
    params.validate();
    SectionPoints out;
    if (n_crossings <= 0) return out;
    Stepper stepper(params, options.integrator, to_state(pt0), 1.0);
    EnergyMonitor energy(pt0, params, options.integrator.max_energy_drift);
    long steps = 0;
    while (static_cast<int>(out.crossings.size()) < n_crossings && stepper.t() < options.t_max) {
        if (++steps > options.integrator.max_steps) break;
        const State before = stepper.y();
        stepper.step(options.t_max);
        const State after = stepper.y();
        energy.check(to_point(after), stepper.t());

        const bool sign_change = (before[2] < 0.0 && after[2] >= 0.0) || (before[2] > 0.0 && after[2] <= 0.0);
        if (!sign_change) continue;
        const DenseStep& dense = stepper.dense();
        double lo = dense.t0;
        double hi = dense.t0 + dense.h;
        const double f_lo = before[2];
        State y = after;
        double t_cross = hi;
        for (int it = 0; it < 200; ++it) {
            t_cross = 0.5 * (lo + hi);
            y = dense.at(t_cross);
            if (std::abs(y[2]) < options.crossing_tol || hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) break;
            ((y[2] < 0.0) == (f_lo < 0.0) ? lo : hi) = t_cross;
        }
        if (y[3] > 0.0) out.crossings.push_back({t_cross, y[0], y[1]});
    }
    if (static_cast<int>(out.crossings.size()) < n_crossings) {
        out.complete = false;
        spdlog::warn("poincare_section: found {} of {} crossings before t={}", out.crossings.size(),
                     n_crossings, stepper.t());
    }
    return out;
}

double classical_jz_over_j(const PhasePoint& pt, HalfInt J) {
    return pt.atomic_radius2() / J.twice() - 1.0;
}

}  // namespace dicke::classical
