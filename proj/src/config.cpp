#include "curveflow/config.hpp"

#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "curveflow/curve_io.hpp"

namespace curveflow {

namespace {

struct KeyValues {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
    std::string origin;

    bool has(const std::string& k) const { return values.count(k) > 0; }

    std::string where(const std::string& k) const {
        auto it = lines.find(k);
        return origin + (it != lines.end() ? ":" + std::to_string(it->second) : "");
    }
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    return s.substr(b, e - b + 1);
}

KeyValues parse_kv(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin = origin;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.has(key))
            throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                             key + "'");
        kv.values[key] = value;
        kv.lines[key] = lineno;
    }
    return kv;
}

double get_double(const KeyValues& kv, const std::string& key, double fallback) {
    if (!kv.has(key))
        return fallback;
    const std::string& s = kv.values.at(key);
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(kv.where(key) + ": field '" + key + "' is not a number: '" + s + "'");
    }
}

long get_long(const KeyValues& kv, const std::string& key, long fallback) {
    if (!kv.has(key))
        return fallback;
    const std::string& s = kv.values.at(key);
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(kv.where(key) + ": field '" + key + "' is not an integer: '" + s +
                         "'");
    }
}

bool get_bool(const KeyValues& kv, const std::string& key, bool fallback) {
    if (!kv.has(key))
        return fallback;
    const std::string& s = kv.values.at(key);
    if (s == "true" || s == "1" || s == "yes")
        return true;
    if (s == "false" || s == "0" || s == "no")
        return false;
    throw ParseError(kv.where(key) + ": field '" + key + "' is not a boolean: '" + s + "'");
}

Eigen::RowVectorXd get_vector(const KeyValues& kv, const std::string& key, int dim) {
    if (!kv.has(key))
        throw ParseError(kv.origin + ": required field '" + key + "' is missing");
    std::stringstream ss(kv.values.at(key));
    std::vector<double> parts;
    std::string tok;
    while (ss >> tok) {
        try {
            parts.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ParseError(kv.where(key) + ": field '" + key + "' has a bad component '" +
                             tok + "'");
        }
    }
    if (static_cast<int>(parts.size()) != dim)
        throw ParseError(kv.where(key) + ": field '" + key + "' needs " + std::to_string(dim) +
                         " components, got " + std::to_string(parts.size()));
    Eigen::RowVectorXd v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = parts[i];
    return v;
}

} // namespace

FlowConfig Config::flow_config() const {
    FlowConfig fc;
    fc.params = params;
    fc.integrator = integrator;
    fc.velocity_mode = velocity_mode;
    fc.dt_mode = dt_mode;
    fc.dt = dt;
    fc.cfl_safety = cfl_safety;
    fc.t_end = t_end;
    fc.max_steps = max_steps;
    fc.stationarity_tol = stationarity_tol;
    fc.redistribute_every = redistribute_every;
    fc.h_min_factor = h_min_factor;
    fc.snapshot_every = snapshot_every;
    fc.validate_bc0 = validate_bc0;
    fc.bc0_tol = bc0_tol;
    return fc;
}

void Config::validate() const {
    if (dim < 2)
        throw ValidationError("dim must be >= 2");
    if (N < 4)
        throw ValidationError("N must be >= 4");
    if (f_minus.size() != dim || f_plus.size() != dim)
        throw ValidationError("f_minus/f_plus must have 'dim' components");
    if ((f_plus - f_minus).norm() <= 0.0)
        throw ValidationError("f_minus must differ from f_plus");
    if (params.lambda < 0.0)
        throw ValidationError("lambda must be >= 0");
    if (params.zeta.size() != dim)
        throw ValidationError("zeta must have 'dim' components");
    if (amplitude < 0.0)
        throw ValidationError("initial.amplitude must be >= 0");
    if (mode < 1)
        throw ValidationError("initial.mode must be >= 1");
    if (initial == InitialKind::arc && bulge == 0.0)
        throw ValidationError("initial.bulge must be nonzero");
    if (stationarity_tol < 0.0)
        throw ValidationError("stationarity_tol must be positive (or 0 for the default)");
    if (bc0_tol <= 0.0)
        throw ValidationError("bc0_tol must be > 0");
    if (snapshot_every < 0)
        throw ValidationError("snapshot_every must be >= 0");
    flow_config().validate();
}

Config parse_config_text(const std::string& text, const std::string& origin) {
    KeyValues kv = parse_kv(text, origin);
    Config c;
    c.dim = static_cast<int>(get_long(kv, "dim", 2));
    c.N = static_cast<int>(get_long(kv, "N", 64));
    c.f_minus = get_vector(kv, "f_minus", c.dim);
    c.f_plus = get_vector(kv, "f_plus", c.dim);
    c.params.lambda = get_double(kv, "lambda", 0.0);
    c.params.zeta = kv.has("zeta") ? get_vector(kv, "zeta", c.dim)
                                   : Eigen::RowVectorXd::Zero(c.dim);

    if (kv.has("integrator")) {
        const std::string& s = kv.values.at("integrator");
        if (s == "explicit")
            c.integrator = Integrator::explicit_euler;
        else if (s == "semi_implicit")
            c.integrator = Integrator::semi_implicit;
        else
            throw ParseError(kv.where("integrator") + ": unknown integrator '" + s + "'");
    }
    if (kv.has("velocity_mode")) {
        const std::string& s = kv.values.at("velocity_mode");
        if (s == "normal")
            c.velocity_mode = VelocityMode::normal;
        else if (s == "gradient")
            c.velocity_mode = VelocityMode::gradient;
        else
            throw ParseError(kv.where("velocity_mode") + ": unknown velocity_mode '" + s + "'");
    }
    if (kv.has("dt_mode")) {
        const std::string& s = kv.values.at("dt_mode");
        if (s == "fixed")
            c.dt_mode = DtMode::fixed;
        else if (s == "cfl")
            c.dt_mode = DtMode::cfl;
        else
            throw ParseError(kv.where("dt_mode") + ": unknown dt_mode '" + s + "'");
    }
    c.dt = get_double(kv, "dt", 0.0);
    c.cfl_safety = get_double(kv, "cfl_safety", 0.1);
    c.t_end = get_double(kv, "t_end", 0.0);
    c.max_steps = get_long(kv, "max_steps", 100000);
    c.stationarity_tol = get_double(kv, "stationarity_tol", 0.0);
    c.redistribute_every = static_cast<int>(get_long(kv, "redistribute_every", -1));
    c.h_min_factor = get_double(kv, "h_min_factor", 1e-3);

    if (kv.has("initial")) {
        const std::string& s = kv.values.at("initial");
        if (s == "line")
            c.initial = InitialKind::line;
        else if (s == "arc")
            c.initial = InitialKind::arc;
        else if (s == "perturbed_line")
            c.initial = InitialKind::perturbed_line;
        else if (s == "file")
            c.initial = InitialKind::file;
        else
            throw ParseError(kv.where("initial") + ": unknown initial '" + s + "'");
    }
    c.bulge = get_double(kv, "initial.bulge", 1.0);
    c.amplitude = get_double(kv, "initial.amplitude", 0.0);
    c.mode = static_cast<int>(get_long(kv, "initial.mode", 1));
    c.seed = static_cast<std::uint64_t>(get_long(kv, "initial.seed", 0));
    if (kv.has("initial.path"))
        c.initial_path = kv.values.at("initial.path");
    else if (c.initial == InitialKind::file)
        throw ParseError(kv.origin + ": initial = file requires initial.path");

    if (kv.has("output_dir"))
        c.output_dir = kv.values.at("output_dir");
    c.snapshot_every = static_cast<int>(get_long(kv, "snapshot_every", 0));
    c.validate_bc0 = get_bool(kv, "validate_bc0", false);
    c.bc0_tol = get_double(kv, "bc0_tol", 1e-3);

    static const char* known[] = {
        "dim", "N", "f_minus", "f_plus", "lambda", "zeta", "integrator", "velocity_mode",
        "dt_mode", "dt", "cfl_safety", "t_end", "max_steps", "stationarity_tol",
        "redistribute_every", "h_min_factor", "initial", "initial.bulge", "initial.amplitude",
        "initial.mode", "initial.seed", "initial.path", "output_dir", "snapshot_every",
        "validate_bc0", "bc0_tol"};
    for (const auto& [key, value] : kv.values) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw ParseError(kv.where(key) + ": unknown field '" + key + "'");
    }

    c.validate();
    return c;
}

Config parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FileError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

namespace {

// Deterministic unit normal to the chord: the coordinate axis least aligned
// with it, orthonormalized.
Eigen::RowVectorXd chord_normal(const Eigen::RowVectorXd& u) {
    const int n = static_cast<int>(u.size());
    int pick = 0;
    for (int d = 1; d < n; ++d)
        if (std::abs(u(d)) < std::abs(u(pick)))
            pick = d;
    Eigen::RowVectorXd nu = Eigen::RowVectorXd::Zero(n);
    nu(pick) = 1.0;
    nu -= nu.dot(u) * u;
    return nu / nu.norm();
}

} // namespace

DiscreteCurve build_initial(const Config& config) {
    config.validate();
    const int N = config.N;
    const int n = config.dim;

    if (config.initial == InitialKind::file) {
        DiscreteCurve c = read_curve_csv(config.initial_path);
        if (c.dim() != n)
            throw ValidationError("curve file dimension " + std::to_string(c.dim()) +
                                  " does not match dim = " + std::to_string(n));
        c.validate(4);
        return c;
    }

    Eigen::RowVectorXd u_dir = config.f_plus - config.f_minus;
    const double chord = u_dir.norm();
    u_dir /= chord;

    Eigen::MatrixXd verts(N + 1, n);
    if (config.initial == InitialKind::line || config.initial == InitialKind::perturbed_line) {
        for (int j = 0; j <= N; ++j) {
            const double uj = static_cast<double>(j) / N;
            verts.row(j) = config.f_minus + uj * (config.f_plus - config.f_minus);
        }
        if (config.initial == InitialKind::perturbed_line && config.amplitude > 0.0) {
            const Eigen::RowVectorXd nu = chord_normal(u_dir);
            std::vector<double> coeff(config.mode, 0.0);
            coeff[config.mode - 1] = config.amplitude;
            if (config.seed != 0) {
                std::mt19937_64 rng(config.seed);
                std::uniform_real_distribution<double> cdist(-1.0, 1.0);
                for (int m = 0; m + 1 < config.mode; ++m)
                    coeff[m] = config.amplitude * cdist(rng);
            }
            for (int j = 1; j < N; ++j) {
                const double uj = static_cast<double>(j) / N;
                double displacement = 0.0;
                for (int m = 0; m < config.mode; ++m)
                    displacement += coeff[m] * std::sin((m + 1) * std::numbers::pi * uj);
                verts.row(j) += displacement * nu;
            }
        }
    } else { // arc
        CurveRecipe recipe;
        recipe.dim = n;
        recipe.bulge = std::abs(config.bulge);
        recipe.f_minus = config.f_minus;
        recipe.f_plus = config.f_plus;
        DiscreteCurve arc = recipe.sample(N);
        verts = arc.vertices;
    }
    DiscreteCurve curve{std::move(verts)};
    curve.validate(4);
    return curve;
}

std::string defaults_table() {
    std::ostringstream os;
    os << "key                  default        notes\n"
       << "dim                  2\n"
       << "N                    64\n"
       << "f_minus              (required)     dim components, space separated\n"
       << "f_plus               (required)\n"
       << "lambda               0\n"
       << "zeta                 0 ... 0\n"
       << "integrator           semi_implicit  explicit | semi_implicit\n"
       << "velocity_mode        normal         normal | gradient\n"
       << "dt_mode              cfl            fixed | cfl\n"
       << "dt                   0              required when dt_mode = fixed\n"
       << "cfl_safety           0.1\n"
       << "t_end                0              0 disables the time limit\n"
       << "max_steps            100000\n"
       << "stationarity_tol     0              0 resolves to 1e-6 * (1 + W0)\n"
       << "redistribute_every   -1             -1 resolves to 50 (normal), 0 (gradient)\n"
       << "h_min_factor         1e-3\n"
       << "initial              line           line | arc | perturbed_line | file\n"
       << "initial.bulge        1\n"
       << "initial.amplitude    0\n"
       << "initial.mode         1\n"
       << "initial.seed         0              0 keeps the single exact sine mode\n"
       << "initial.path         (none)         required when initial = file\n"
       << "output_dir           out            overridden by CURVEFLOW_OUTPUT\n"
       << "snapshot_every       0              0 writes only the final snapshot\n"
       << "validate_bc0         false\n"
       << "bc0_tol              1e-3\n";
    return os.str();
}

} // namespace curveflow
