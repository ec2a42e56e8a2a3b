#include "dicke_cli/runs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <optional>

#include <fmt/core.h>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "dicke/awf.hpp"
#include "dicke/classical.hpp"
#include "dicke/errors.hpp"
#include "dicke/evolve.hpp"
#include "dicke/numeric.hpp"
#include "dicke/states.hpp"

namespace dicke::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class F>
auto with_context(const std::string& context, F&& f) {
    try {
        return f();
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(context + ": " + e.what());
    }
}

void append(fmt::memory_buffer& buf, double x) { fmt::format_to(std::back_inserter(buf), "{:.17g}", x); }

void write_file(const fs::path& path, const fmt::memory_buffer& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RunError(fmt::format("cannot open {} for writing", path.string()));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw RunError(fmt::format("write to {} failed", path.string()));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Shared bookkeeping for one invocation: output directory, data files and
// the manifest written at the end.
class Session {
public:
    Session(std::string command, const RunConfig& config, const RunOptions& options)
        : command_(std::move(command)), config_(config), options_(options), start_(Clock::now()) {
        out_dir_ = options.out_dir.empty() ? fs::path(config.output_dir) : options.out_dir;
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) throw RunError(fmt::format("cannot create output directory {}: {}", out_dir_.string(), ec.message()));
        set_worker_count(options.threads);
        spdlog::info("{}: writing to {} with {} worker(s)", command_, out_dir_.string(), worker_count());
    }

    const fs::path& out_dir() const { return out_dir_; }

    void write(const std::string& name, const fmt::memory_buffer& buf) {
        write_file(out_dir_ / name, buf);
        files_.push_back(name);
    }

    void timing(const std::string& key, double seconds) { timings_[key] = seconds; }
    ojson& results() { return results_; }
    void set_audit(ojson audit) { audit_ = std::move(audit); }

    RunResult finish(bool cutoff_ok) {
        ojson m;
        m["schema_version"] = kSchemaVersion;
        m["command"] = command_;
        m["config_sha256"] = sha256_hex(config_.source_text);
        m["seedless"] = options_.seedless;
        m["model"] = {{"omega0", config_.model.omega0}, {"omega_a", config_.model.omega_a},
                      {"G", config_.model.G},           {"G_prime", config_.model.Gp},
                      {"J", config_.model.J.value()},   {"n_max", config_.model.n_max},
                      {"dim", config_.model.dim()},     {"energy", config_.energy}};
        m["cutoff_audit"] = audit_;
        m["results"] = results_;
        timings_["total"] = elapsed(start_);
        ojson t = ojson::object();
        for (const auto& [k, v] : timings_) t[k] = v;
        m["timings_s"] = t;
        m["threads"] = worker_count();
        ojson files = ojson::array();
        for (const auto& name : files_) {
            const std::string bytes = read_file(out_dir_ / name);
            files.push_back({{"path", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
        }
        m["files"] = files;
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf), "{}\n", m.dump(2));
        write_file(out_dir_ / "manifest.json", buf);
        RunResult r;
        r.out_dir = out_dir_;
        for (const auto& name : files_) r.files.emplace_back(name);
        r.cutoff_ok = cutoff_ok;
        return r;
    }

private:
    std::string command_;
    const RunConfig& config_;
    RunOptions options_;
    Clock::time_point start_;
    fs::path out_dir_;
    std::vector<std::string> files_;
    std::map<std::string, double> timings_;
    ojson results_ = ojson::object();
    ojson audit_ = nullptr;
};

PhasePoint start_point(const RunConfig& config, const InitialCondition& ic) {
    const double s = std::sqrt(2.0 * config.model.J.twice());
    return states::energy_matched_field_point(ic.q_norm * s, ic.p_norm * s, config.energy, config.model);
}

ojson point_json(const PhasePoint& p) {
    return {{"q_a", p.q_a}, {"p_a", p.p_a}, {"q_f", p.q_f}, {"p_f", p.p_f}};
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

// Quantum evolution of every initial condition, shared by entropy and wigner.
struct QuantumRun {
    InitialCondition ic;
    PhasePoint start;
    JointState psi0;
    evolve::EntropySeries series;
};

struct QuantumBatch {
    evolve::SpectralDecomp dec;
    hilbert::BasisIndex basis;
    std::vector<QuantumRun> runs;
    bool cutoff_ok = true;
};

QuantumBatch evolve_all(const RunConfig& config, Session& session) {
    auto t0 = Clock::now();
    QuantumBatch batch{with_context("diagonalize", [&] { return evolve::diagonalize_by_parity(config.model); }),
                       hilbert::build_basis(config.model), {}};
    session.timing("diagonalize", elapsed(t0));
    spdlog::info("diagonalized D={} in {:.1f} s", batch.basis.dim(), elapsed(t0));

    t0 = Clock::now();
    const auto times = evolve::uniform_times(config.time.t_start, config.time.t_end, config.time.dt);
    ojson audit = {{"levels", evolve::kAuditLevels}, {"bound", evolve::kAuditBound}};
    ojson tails = ojson::object();
    for (const auto& ic : config.initial_conditions) {
        QuantumRun run{ic, {}, {}, {}};
        with_context("initial condition " + ic.label, [&] {
            run.start = start_point(config, ic);
            const auto cp = states::phase_point_to_parameters(run.start, config.model.J);
            run.psi0 = states::product_state(cp.w, cp.nu, config.model);
            run.series = evolve::entropy_series(batch.dec, batch.basis, run.psi0, times);
            return 0;
        });
        tails[ic.label] = run.series.max_tail_population;
        if (!run.series.cutoff_ok()) {
            batch.cutoff_ok = false;
            spdlog::warn("{}: top {} Fock levels reach population {:.3e} (bound {:.0e}); raise n_max", ic.label,
                         evolve::kAuditLevels, run.series.max_tail_population, evolve::kAuditBound);
        }
        batch.runs.push_back(std::move(run));
    }
    audit["max_tail_population"] = tails;
    audit["ok"] = batch.cutoff_ok;
    session.set_audit(audit);
    session.timing("series", elapsed(t0));
    return batch;
}

ojson series_summary(const QuantumRun& run) {
    const auto& ex = run.series.extrema;
    auto first = [](const std::vector<evolve::Extremum>& v) {
        return v.empty() ? ojson(nullptr) : ojson{{"t", v.front().t}, {"delta_a", v.front().value}};
    };
    return {{"start", point_json(run.start)},
            {"first_maximum", first(ex.maxima)},
            {"first_minimum", first(ex.minima)},
            {"plateau_onset", optional_json(run.series.plateau)},
            {"max_tail_population", run.series.max_tail_population}};
}

struct Snapshot {
    std::string kind;
    double t;
};

std::vector<Snapshot> snapshot_plan(const RunConfig& config, const evolve::EntropySeries& series) {
    std::vector<Snapshot> plan;
    const auto& w = config.wigner;
    if (w.policy == SnapshotPolicy::FixedTimes) {
        for (std::size_t i = 0; i < w.times.size(); ++i) plan.push_back({fmt::format("fixed{}", i + 1), w.times[i]});
        return plan;
    }
    plan.push_back({"t0", series.times.front()});
    const auto& ex = series.extrema;
    for (int i = 0; i < w.extrema_count && i < static_cast<int>(ex.maxima.size()); ++i)
        plan.push_back({fmt::format("max{}", i + 1), ex.maxima[i].t});
    for (int i = 0; i < w.extrema_count && i < static_cast<int>(ex.minima.size()); ++i)
        plan.push_back({fmt::format("min{}", i + 1), ex.minima[i].t});
    if (series.plateau) plan.push_back({"plateau", *series.plateau});
    std::stable_sort(plan.begin(), plan.end(), [](const Snapshot& a, const Snapshot& b) { return a.t < b.t; });
    return plan;
}

fmt::memory_buffer grid_csv(const awf::WignerGrid& g) {
    fmt::memory_buffer buf;
    auto out = std::back_inserter(buf);
    fmt::format_to(out, "theta");
    for (double th : g.thetas) {
        buf.push_back(',');
        append(buf, th);
    }
    fmt::format_to(out, "\nphi");
    for (double ph : g.phis) {
        buf.push_back(',');
        append(buf, ph);
    }
    buf.push_back('\n');
    for (int i = 0; i < g.n_theta(); ++i) {
        for (int j = 0; j < g.n_phi(); ++j) {
            if (j) buf.push_back(',');
            append(buf, g.values(i, j));
        }
        buf.push_back('\n');
    }
    return buf;
}

std::string alpha_tag(double alpha) { return fmt::format("{:g}", alpha); }

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw RunError("SHA-256 computation failed");
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) fmt::format_to(std::back_inserter(hex), "{:02x}", md[i]);
    return hex;
}

RunResult run_spectrum(const RunConfig& config, const RunOptions& options) {
    Session session("spectrum", config, options);
    const auto t0 = Clock::now();
    const auto dec = with_context("diagonalize", [&] { return evolve::diagonalize_by_parity(config.model); });
    session.timing("diagonalize", elapsed(t0));
    const Eigen::VectorXd parity = hilbert::parity_operator(config.model).diagonal();

    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "index,energy,parity\n");
    int even = 0;
    for (Eigen::Index k = 0; k < dec.dim(); ++k) {
        const double p = parity.dot(dec.eigenvectors.col(k).cwiseAbs2());
        const int sign = p >= 0.0 ? 1 : -1;
        even += sign > 0;
        fmt::format_to(std::back_inserter(buf), "{},", k);
        append(buf, dec.eigenvalues[k]);
        fmt::format_to(std::back_inserter(buf), ",{}\n", sign);
    }
    session.write("spectrum.csv", buf);
    session.results() = {{"levels", dec.dim()},
                         {"even_levels", even},
                         {"ground_energy", dec.eigenvalues[0]},
                         {"highest_energy", dec.eigenvalues[dec.dim() - 1]}};
    return session.finish(true);
}

RunResult run_entropy(const RunConfig& config, const RunOptions& options) {
    Session session("entropy", config, options);
    const auto batch = evolve_all(config, session);
    for (const auto& run : batch.runs) {
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf), "t,delta_a\n");
        for (std::size_t i = 0; i < run.series.times.size(); ++i) {
            append(buf, run.series.times[i]);
            buf.push_back(',');
            append(buf, run.series.delta_a[i]);
            buf.push_back('\n');
        }
        session.write("entropy_" + run.ic.label + ".csv", buf);
        session.results()[run.ic.label] = series_summary(run);
    }
    return session.finish(batch.cutoff_ok);
}

RunResult run_wigner(const RunConfig& config, const RunOptions& options) {
    Session session("wigner", config, options);
    const auto batch = evolve_all(config, session);
    const auto t0 = Clock::now();
    const awf::GridSpec spec{config.wigner.n_theta, config.wigner.n_phi, 0.0};
    const auto& alphas = config.wigner.alphas;

    fmt::memory_buffer summary;
    auto out = std::back_inserter(summary);
    fmt::format_to(out, "label,kind,t,min_value,max_value,depth_fraction,negative_solid_angle,mirror_asymmetry,purity");
    for (double a : alphas) fmt::format_to(out, ",components_a{0},smallest_relative_a{0}", alpha_tag(a));
    summary.push_back('\n');

    for (const auto& run : batch.runs) {
        ojson info = series_summary(run);
        ojson snaps = ojson::array();
        with_context("wigner " + run.ic.label, [&] {
            const auto initial = awf::multipole_coeffs(evolve::reduce_atomic(run.psi0, batch.basis));
            const double phi0 = awf::frame_angle(initial);
            const auto reference = awf::wigner_on_grid(initial, spec, phi0);
            info["frame_angle"] = phi0;
            for (const auto& snap : snapshot_plan(config, run.series)) {
                const auto psi = evolve::propagate(batch.dec, run.psi0, snap.t);
                const auto grid = snap.t == run.series.times.front() && config.time.t_start == 0.0
                                      ? reference
                                      : awf::wigner_on_grid(
                                            awf::multipole_coeffs(evolve::reduce_atomic(psi, batch.basis)), spec, phi0);
                if (grid.max_imaginary_residue > awf::kMaxImaginaryResidue)
                    throw NumericalError(fmt::format("imaginary residue {:.3e} at t={}", grid.max_imaginary_residue, snap.t));
                const std::string name = fmt::format("wigner_{}_{}.csv", run.ic.label, snap.kind);
                session.write(name, grid_csv(grid));

                const auto neg = awf::negativity_metrics(grid);
                const double mirror = awf::mirror_asymmetry(grid);
                const double purity = awf::purity_from_grid(grid, config.model.J);
                fmt::format_to(out, "{},{},", run.ic.label, snap.kind);
                for (double v : {snap.t, neg.min_value, neg.max_value, neg.depth_fraction, neg.negative_solid_angle,
                                 mirror, purity}) {
                    append(summary, v);
                    summary.push_back(',');
                }
                ojson structure = ojson::object();
                for (std::size_t k = 0; k < alphas.size(); ++k) {
                    const auto s = awf::structure_metrics(grid, alphas[k], reference);
                    fmt::format_to(out, "{},", s.component_count);
                    append(summary, s.smallest_relative());
                    if (k + 1 < alphas.size()) summary.push_back(',');
                    structure[alpha_tag(alphas[k])] = {{"components", s.component_count},
                                                       {"smallest_relative", s.smallest_relative()}};
                }
                summary.push_back('\n');
                snaps.push_back({{"kind", snap.kind}, {"t", snap.t}, {"file", name},
                                 {"depth_fraction", neg.depth_fraction}, {"mirror_asymmetry", mirror},
                                 {"structure", structure}});
            }
            return 0;
        });
        info["snapshots"] = snaps;
        session.results()[run.ic.label] = info;
    }
    session.write("wigner_summary.csv", summary);
    session.timing("snapshots", elapsed(t0));
    return session.finish(batch.cutoff_ok);
}

RunResult run_poincare(const RunConfig& config, const RunOptions& options) {
    Session session("poincare", config, options);
    const auto t0 = Clock::now();
    const auto& ics = config.initial_conditions;
    const int n = static_cast<int>(ics.size());
    std::vector<classical::SectionPoints> sections(ics.size());
    std::vector<PhasePoint> starts(ics.size());
    std::vector<std::exception_ptr> errors(ics.size());
    classical::SectionOptions opts;
    opts.t_max = config.poincare.t_max;

    // Trajectories are independent; each one runs sequentially.
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            with_context("poincare " + ics[i].label, [&] {
                starts[i] = start_point(config, ics[i]);
                sections[i] = classical::poincare_section(starts[i], config.poincare.n_crossings, config.model, opts);
                return 0;
            });
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (int i = 0; i < n; ++i) {
        fmt::memory_buffer buf;
        fmt::format_to(std::back_inserter(buf), "t_cross,q_a,p_a\n");
        for (const auto& c : sections[i].crossings) {
            append(buf, c.t);
            buf.push_back(',');
            append(buf, c.q_a);
            buf.push_back(',');
            append(buf, c.p_a);
            buf.push_back('\n');
        }
        session.write("poincare_" + ics[i].label + ".csv", buf);
        session.results()[ics[i].label] = {{"start", point_json(starts[i])},
                                           {"crossings", sections[i].crossings.size()},
                                           {"requested", config.poincare.n_crossings},
                                           {"complete", sections[i].complete}};
    }
    session.timing("integrate", elapsed(t0));
    return session.finish(true);
}

}  // namespace dicke::cli
