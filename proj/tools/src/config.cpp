#include "dicke_cli/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

namespace dicke::cli {

namespace {

using json = nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Section {
public:
    Section(const json& node, std::string path, const std::string& origin)
        : node_(node), path_(std::move(path)), origin_(origin) {
        if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const char* key) const { return node_.contains(key); }

    const json& raw(const char* key) {
        used_.insert(key);
        return node_.at(key);
    }

    double number(const char* key) {
        if (!has(key)) fail(field(key), "missing required field");
        const json& v = raw(key);
        if (!v.is_number()) fail(field(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(field(key), "expected a finite number");
        return x;
    }
    double number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

    int integer(const char* key) {
        if (!has(key)) fail(field(key), "missing required field");
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(field(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const char* key, int fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const char* key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) fail(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const char* key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array()) fail(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(fmt::format("{}[{}]", field(key), i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    Section child(const char* key) { return Section(raw(key), field(key), origin_); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!used_.count(key)) fail(field(key), "unknown key");
    }

    [[noreturn]] void fail(const std::string& where, const std::string& what) const {
        throw ConfigError(fmt::format("{}: field '{}': {}", origin_, where, what));
    }

private:
    const json& node_;
    std::string path_;
    const std::string& origin_;
    std::set<std::string> used_;
};

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void parse_model(Section s, hilbert::ModelParams& m) {
    m.omega0 = s.number("omega0", 1.0);
    m.omega_a = s.number("omega_a", 1.0);
    m.G = s.number("G");
    m.Gp = s.number("G_prime");
    const double J = s.number("J");
    const double twice = 2.0 * J;
    if (!(J > 0.0) || twice != std::round(twice) || twice > 400.0)
        s.fail(s.field("J"), "expected a positive half-integer no larger than 200");
    m.J = HalfInt::from_twice(static_cast<int>(twice));
    m.n_max = s.integer("n_max", 120);
    if (!(m.omega0 > 0.0)) s.fail(s.field("omega0"), "must be positive");
    if (!(m.omega_a > 0.0)) s.fail(s.field("omega_a"), "must be positive");
    if (m.G < 0.0) s.fail(s.field("G"), "must be non-negative");
    if (m.Gp < 0.0) s.fail(s.field("G_prime"), "must be non-negative");
    if (m.n_max < 1 || m.n_max > 2000) s.fail(s.field("n_max"), "must be in [1, 2000]");
    s.finish();
}

void parse_conditions(const json& node, const std::string& origin, std::vector<InitialCondition>& out) {
    const std::string path = "initial_conditions";
    if (!node.is_array()) throw ConfigError(fmt::format("{}: field '{}': expected an array", origin, path));
    if (node.empty()) throw ConfigError(fmt::format("{}: field '{}': at least one initial condition is required", origin, path));
    std::set<std::string> labels;
    for (std::size_t i = 0; i < node.size(); ++i) {
        Section s(node[i], fmt::format("{}[{}]", path, i), origin);
        InitialCondition ic;
        ic.label = s.string("label", "");
        if (ic.label.empty()) s.fail(s.field("label"), "missing or empty label");
        for (char c : ic.label)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
                s.fail(s.field("label"), "labels may contain only letters, digits, '_' and '-'");
        if (!labels.insert(ic.label).second) s.fail(s.field("label"), "duplicate label '" + ic.label + "'");
        ic.q_norm = s.number("q_a");
        ic.p_norm = s.number("p_a");
        if (!(ic.q_norm * ic.q_norm + ic.p_norm * ic.p_norm < 1.0))
            s.fail(s.field("q_a"), "normalized coordinates must lie inside the unit disk");
        s.finish();
        out.push_back(ic);
    }
}

}  // namespace

std::string_view policy_name(SnapshotPolicy policy) {
    return policy == SnapshotPolicy::AleExtrema ? "ale-extrema" : "fixed-times";
}

RunConfig parse_config_text(std::string_view text, std::string_view origin_view) {
    const std::string origin(origin_view);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(fmt::format("{}:{}:{}: malformed JSON: {}", origin, line, col, e.what()));
    }

    RunConfig cfg;
    cfg.source_text = std::string(text);
    Section root(doc, "", origin);

    if (!root.has("schema_version")) root.fail("schema_version", "missing required field");
    const int version = root.integer("schema_version");
    if (version != kSchemaVersion)
        root.fail("schema_version", fmt::format("unsupported version {} (expected {})", version, kSchemaVersion));

    if (!root.has("model")) root.fail("model", "missing required field");
    parse_model(root.child("model"), cfg.model);

    cfg.energy = root.number("energy");

    if (!root.has("initial_conditions")) root.fail("initial_conditions", "missing required field");
    parse_conditions(root.raw("initial_conditions"), origin, cfg.initial_conditions);

    if (root.has("time_grid")) {
        Section s = root.child("time_grid");
        cfg.time.t_start = s.number("t_start", cfg.time.t_start);
        cfg.time.t_end = s.number("t_end", cfg.time.t_end);
        cfg.time.dt = s.number("dt", cfg.time.dt);
        if (!(cfg.time.dt > 0.0)) s.fail(s.field("dt"), "must be positive");
        if (!(cfg.time.t_end > cfg.time.t_start)) s.fail(s.field("t_end"), "must exceed t_start");
        if ((cfg.time.t_end - cfg.time.t_start) / cfg.time.dt > 1e7) s.fail(s.field("dt"), "grid exceeds 1e7 points");
        s.finish();
    }

    if (root.has("wigner")) {
        Section s = root.child("wigner");
        auto& w = cfg.wigner;
        w.n_theta = s.integer("n_theta", w.n_theta);
        w.n_phi = s.integer("n_phi", w.n_phi);
        const std::string policy = s.string("snapshot_policy", "ale-extrema");
        if (policy == "ale-extrema")
            w.policy = SnapshotPolicy::AleExtrema;
        else if (policy == "fixed-times")
            w.policy = SnapshotPolicy::FixedTimes;
        else
            s.fail(s.field("snapshot_policy"), "expected \"ale-extrema\" or \"fixed-times\", got \"" + policy + "\"");
        w.times = s.numbers("snapshot_times", {});
        w.extrema_count = s.integer("extrema_count", w.extrema_count);
        w.alphas = s.numbers("alphas", w.alphas);
        if (w.n_theta < 2 || w.n_theta > 4096) s.fail(s.field("n_theta"), "must be in [2, 4096]");
        if (w.n_phi < 4 || w.n_phi > 8192) s.fail(s.field("n_phi"), "must be in [4, 8192]");
        if (w.extrema_count < 0) s.fail(s.field("extrema_count"), "must be non-negative");
        if (w.policy == SnapshotPolicy::FixedTimes && w.times.empty())
            s.fail(s.field("snapshot_times"), "required by the fixed-times policy");
        if (w.policy == SnapshotPolicy::AleExtrema && !w.times.empty())
            s.fail(s.field("snapshot_times"), "only allowed with the fixed-times policy");
        for (std::size_t i = 0; i < w.times.size(); ++i)
            if (w.times[i] < cfg.time.t_start || w.times[i] > cfg.time.t_end)
                s.fail(fmt::format("{}[{}]", s.field("snapshot_times"), i), "outside the time grid");
        if (w.alphas.empty()) s.fail(s.field("alphas"), "at least one threshold is required");
        for (std::size_t i = 0; i < w.alphas.size(); ++i)
            if (!(w.alphas[i] > 0.0 && w.alphas[i] < 1.0))
                s.fail(fmt::format("{}[{}]", s.field("alphas"), i), "must lie in (0, 1)");
        s.finish();
    }

    if (root.has("poincare")) {
        Section s = root.child("poincare");
        cfg.poincare.n_crossings = s.integer("n_crossings", cfg.poincare.n_crossings);
        cfg.poincare.t_max = s.number("t_max", cfg.poincare.t_max);
        if (cfg.poincare.n_crossings < 1) s.fail(s.field("n_crossings"), "must be positive");
        if (!(cfg.poincare.t_max > 0.0)) s.fail(s.field("t_max"), "must be positive");
        s.finish();
    }

    cfg.output_dir = root.string("output_dir", cfg.output_dir);
    root.finish();
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

}  // namespace dicke::cli
