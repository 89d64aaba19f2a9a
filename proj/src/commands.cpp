#include "curveflow/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "curveflow/curve_io.hpp"
#include "curveflow/diagnostics.hpp"

namespace curveflow {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string snapshot_stem(long step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%08ld", step);
    return buf;
}

fs::path resolve_output_dir(const fs::path& configured) {
    if (const char* env = std::getenv("CURVEFLOW_OUTPUT"); env && *env)
        return fs::path(env);
    return configured;
}

ordered_json json_of_energy(const EnergyBreakdown& e) {
    ordered_json j;
    j["bending"] = e.bending;
    j["coupling"] = e.coupling;
    j["length"] = e.length;
    j["total"] = e.total;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out)
        throw FileError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw FileError("write failed for " + path.string());
}

} // namespace

int cmd_run(const Config& config, bool resolve_env) {
    config.validate();
    const fs::path dir = resolve_env ? resolve_output_dir(config.output_dir)
                                     : fs::path(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FileError("cannot create output dir " + dir.string() + ": " + ec.message());

    DiscreteCurve initial = build_initial(config);
    FlowConfig fc = config.flow_config();

    std::vector<long> snapshot_steps;
    SnapshotSink sink = [&](const FlowState& s) {
        const std::string stem = snapshot_stem(s.step_index);
        write_curve_csv(s.curve, dir / (stem + ".csv"));
        const EnergyBreakdown e = energy(s.cache, config.params);
        const auto bc = natural_bc_residual(s.cache, config.params);
        const double v_l2 = stationarity_residual(s.cache, config.params).second;
        ordered_json j;
        j["t"] = s.t;
        j["step"] = s.step_index;
        j["energy"] = json_of_energy(e);
        j["v_l2"] = v_l2;
        j["bc_residual"] = {bc[0], bc[1]};
        j["length"] = e.length;
        write_text(dir / (stem + ".json"), j.dump(2) + "\n");
        if (snapshot_steps.empty() || snapshot_steps.back() != s.step_index)
            snapshot_steps.push_back(s.step_index);
    };

    RunReport report = run(initial, fc, sink);
    write_series_csv(report.series, dir / "series.csv");

    // report.json: run outcome plus enough parameters for `check` to audit.
    ordered_json j;
    j["termination"] = to_string(report.termination);
    if (!report.error_message.empty())
        j["error"] = report.error_message;
    j["steps"] = report.series.rows.empty() ? 0 : report.series.rows.back().step;
    j["t_final"] = report.series.rows.empty() ? 0.0 : report.series.rows.back().t;
    j["initial_energy"] = report.initial_energy;
    j["chord"] = report.chord;
    j["stationarity_tol"] = report.stationarity_tol;
    {
        const EnergyBreakdown ef = energy(report.final_curve, config.params);
        j["final_energy"] = json_of_energy(ef);
        const auto bcf = natural_bc_residual(report.final_curve, config.params);
        j["final_bc_residual"] = {bcf[0], bcf[1]};
        j["final_v_l2"] = report.series.rows.empty() ? 0.0 : report.series.rows.back().v_l2;
    }
    j["params"]["lambda"] = config.params.lambda;
    j["params"]["zeta"] = std::vector<double>(config.params.zeta.data(),
                                              config.params.zeta.data() + config.params.zeta.size());
    j["params"]["dim"] = config.dim;
    j["params"]["N"] = config.N;
    j["params"]["velocity_mode"] =
        config.velocity_mode == VelocityMode::normal ? "normal" : "gradient";
    j["params"]["integrator"] =
        config.integrator == Integrator::explicit_euler ? "explicit" : "semi_implicit";
    j["redistribution_steps"] = report.redistribution_steps;
    auto violations = ordered_json::array();
    for (const Violation& v : report.violations) {
        ordered_json item;
        item["step"] = v.step;
        item["invariant"] = v.invariant;
        item["magnitude"] = v.magnitude;
        violations.push_back(item);
    }
    j["violations"] = violations;
    write_text(dir / "report.json", j.dump(2) + "\n");

    // overlay of up to 6 snapshots plus the final curve
    std::vector<DiscreteCurve> overlay;
    overlay.push_back(initial);
    const std::size_t stride = std::max<std::size_t>(1, snapshot_steps.size() / 5);
    for (std::size_t i = stride; i + 1 < snapshot_steps.size(); i += stride)
        overlay.push_back(read_curve_csv(dir / (snapshot_stem(snapshot_steps[i]) + ".csv")));
    overlay.push_back(report.final_curve);
    write_curves_svg(overlay, dir / "curves.svg");

    switch (report.termination) {
    case Termination::stationary:
    case Termination::t_end:
        return 0;
    case Termination::max_steps:
        return 2;
    case Termination::error:
        std::cerr << "run terminated on error: " << report.error_message << "\n";
        return 3;
    }
    return 3;
}

int cmd_run(const fs::path& config_path) {
    return cmd_run(parse_config(config_path));
}

int cmd_check(const fs::path& dir) {
    if (!fs::exists(dir / "series.csv"))
        throw MissingData("no series.csv in " + dir.string());
    if (!fs::exists(dir / "report.json"))
        throw MissingData("no report.json in " + dir.string());

    Series series = read_series_csv(dir / "series.csv");
    ordered_json meta;
    {
        std::ifstream in(dir / "report.json");
        try {
            in >> meta;
        } catch (const std::exception& e) {
            throw ParseError("report.json: " + std::string(e.what()));
        }
    }
    FlowParams params;
    params.lambda = meta["params"]["lambda"].get<double>();
    const auto zeta = meta["params"]["zeta"].get<std::vector<double>>();
    params.zeta = Eigen::Map<const Eigen::RowVectorXd>(zeta.data(), zeta.size());
    const double W0 = meta["initial_energy"].get<double>();
    const double chord = meta["chord"].get<double>();
    const std::string mode = meta["params"]["velocity_mode"].get<std::string>();
    const std::string integ = meta["params"]["integrator"].get<std::string>();
    std::vector<long> redistributions;
    if (meta.contains("redistribution_steps"))
        redistributions = meta["redistribution_steps"].get<std::vector<long>>();

    bool all_pass = true;
    ordered_json summary;

    // dissipation
    const double rel_tol = (mode == "gradient" && integ == "explicit") ? 1e-12 : 1e-8;
    if (series.size() >= 2) {
        DissipationReport d = dissipation_audit(series, rel_tol, redistributions);
        ordered_json jd;
        jd["pass"] = d.pass;
        jd["rel_tol"] = d.rel_tol;
        jd["violations"] = d.violations.size();
        jd["max_identity_residual"] = d.max_identity_residual;
        auto items = ordered_json::array();
        for (const Violation& v : d.violations) {
            ordered_json it;
            it["step"] = v.step;
            it["magnitude"] = v.magnitude;
            items.push_back(it);
        }
        jd["steps"] = items;
        write_text(dir / "audit_dissipation.json", jd.dump(2) + "\n");
        summary["dissipation"] = d.pass;
        all_pass = all_pass && d.pass;
    } else {
        summary["dissipation"] = "skipped (single-row series)";
    }

    // bounds
    {
        BoundsReport b = bounds_audit(series, params, W0, chord);
        ordered_json jb;
        jb["pass"] = b.pass;
        jb["violations"] = b.violations.size();
        jb["max_length"] = b.max_length;
        jb["max_curvature_integral"] = b.max_curvature_integral;
        write_text(dir / "audit_bounds.json", jb.dump(2) + "\n");
        summary["bounds"] = b.pass;
        all_pass = all_pass && b.pass;
    }

    // snapshots, curvature norms, identities
    std::vector<std::pair<long, DiscreteCurve>> snapshots;
    std::vector<fs::path> snap_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".csv")
            snap_files.push_back(entry.path());
    }
    std::sort(snap_files.begin(), snap_files.end());
    for (const fs::path& p : snap_files) {
        const long step = std::stol(p.stem().string().substr(5));
        snapshots.emplace_back(step, read_curve_csv(p));
    }

    if (!snapshots.empty()) {
        const int min_n = snapshots.front().second.segments();
        const int l_max = std::min(2, min_n - 4);
        CurvatureNormSeries cn = curvature_norm_series(snapshots, l_max);
        ordered_json jc;
        jc["pass"] = cn.bounded;
        jc["l_max"] = l_max;
        jc["max_nabla_l2"] = cn.max_nabla_l2;
        jc["max_partial_l2"] = cn.max_partial_l2;
        jc["max_partial_inf"] = cn.max_partial_inf;
        write_text(dir / "audit_curvature_norms.json", jc.dump(2) + "\n");
        summary["curvature_norms"] = cn.bounded;
        all_pass = all_pass && cn.bounded;
    }

    auto sidecar_t = [&](long step) -> std::optional<double> {
        const fs::path p = dir / (snapshot_stem(step) + ".json");
        if (!fs::exists(p))
            return std::nullopt;
        std::ifstream in(p);
        ordered_json j;
        in >> j;
        return j["t"].get<double>();
    };

    if (mode == "normal") {
        auto identities = ordered_json::array();
        bool identities_ok = true;
        auto redistributed = [&](long step) {
            return std::find(redistributions.begin(), redistributions.end(), step) !=
                   redistributions.end();
        };
        for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
            if (snapshots[i + 1].first != snapshots[i].first + 1)
                continue;
            if (redistributed(snapshots[i + 1].first))
                continue; // the pair spans a resampling, not a flow step
            auto t0 = sidecar_t(snapshots[i].first);
            auto t1 = sidecar_t(snapshots[i + 1].first);
            if (!t0 || !t1 || *t1 <= *t0)
                continue;
            const double dt = *t1 - *t0;
            FlowState a = FlowState::make(snapshots[i].second);
            FlowState b = FlowState::make(snapshots[i + 1].second);
            b.velocity = (b.curve.vertices - a.curve.vertices) / dt;
            IdentityReport rep;
            try {
                rep = identity_audit(a, b, dt, params);
            } catch (const InsufficientData&) {
                break; // curve too short for bulk identity windows
            }
            ordered_json jr;
            jr["step"] = snapshots[i].first;
            jr["dt"] = dt;
            jr["N"] = rep.segments;
            jr["res_ds"] = rep.res_ds;
            jr["res_tau"] = rep.res_tau;
            jr["res_kappa"] = rep.res_kappa;
            jr["res_kappa_split"] = rep.res_kappa_split;
            jr["res_edge_length"] = rep.res_edge_length;
            identities.push_back(jr);
            identities_ok = identities_ok && std::isfinite(rep.max_residual());
        }
        if (!identities.empty()) {
            ordered_json ji;
            ji["pass"] = identities_ok;
            ji["pairs"] = identities;
            write_text(dir / "audit_identities.json", ji.dump(2) + "\n");
            summary["identities"] = identities_ok;
            all_pass = all_pass && identities_ok;
        }
    }

    std::cout << summary.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

int cmd_audit(const fs::path& spec_path) {
    std::ifstream in(spec_path);
    if (!in)
        throw FileError("cannot open audit spec " + spec_path.string());
    std::stringstream ss;
    ss << in.rdbuf();

    // flat key = value spec, same syntax as run configs
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    std::stringstream text(ss.str());
    while (std::getline(text, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (eq == std::string::npos)
            throw ParseError(spec_path.string() + ":" + std::to_string(lineno) +
                             ": expected 'key = value'");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };

    const std::string id = get("id", "");
    const int corpus_size = std::stoi(get("corpus_size", "0"));
    const std::uint64_t seed = std::stoull(get("seed", "0"));
    if (corpus_size <= 0)
        throw ValidationError("corpus_size must be >= 1");

    AuditReport report;
    if (id == "interpolation") {
        const int k = std::stoi(get("k", "2"));
        const int i = std::stoi(get("i", "1"));
        const double p = std::stod(get("p", "2"));
        const int N = std::stoi(get("N", "64"));
        const int dim = std::stoi(get("dim", "2"));
        auto recipes = make_curve_corpus(seed, corpus_size, dim);
        std::vector<DiscreteCurve> corpus;
        corpus.reserve(recipes.size());
        for (const CurveRecipe& r : recipes)
            corpus.push_back(r.sample(N));
        report = interpolation_audit(corpus, k, i, p);
    } else if (id == "sup_bound") {
        const int degree = std::stoi(get("degree", "8"));
        const int samples = std::stoi(get("samples", "256"));
        report = sup_bound_audit(make_scalar_corpus(seed, corpus_size, degree, samples));
    } else {
        throw ValidationError("unknown audit id '" + id + "' (expected interpolation or sup_bound)");
    }

    const fs::path dir = resolve_output_dir(get("output_dir", "."));
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path out = dir / ("audit_" + report.inequality_id + ".json");
    write_text(out, audit_json(report) + "\n");
    std::cout << (report.pass ? "PASS " : "FAIL ") << report.inequality_id
              << " empirical_constant=" << report.empirical_constant << "\n";
    return report.pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_glob) {
    const fs::path pattern(config_glob);
    const fs::path parent = pattern.parent_path().empty() ? "." : pattern.parent_path();
    const std::string mask = pattern.filename().string();

    auto matches = [&](const std::string& name) {
        // '*' wildcards only
        std::size_t np = 0, mp = 0, star = std::string::npos, restart = 0;
        while (np < name.size()) {
            if (mp < mask.size() && (mask[mp] == name[np])) {
                ++np; ++mp;
            } else if (mp < mask.size() && mask[mp] == '*') {
                star = mp++;
                restart = np;
            } else if (star != std::string::npos) {
                mp = star + 1;
                np = ++restart;
            } else {
                return false;
            }
        }
        while (mp < mask.size() && mask[mp] == '*')
            ++mp;
        return mp == mask.size();
    };

    std::vector<fs::path> configs;
    if (fs::exists(parent))
        for (const auto& entry : fs::directory_iterator(parent))
            if (entry.is_regular_file() && matches(entry.path().filename().string()))
                configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty())
        throw MissingData("no configs match '" + config_glob + "'");

    int worst = 0;
    for (const fs::path& p : configs) {
        std::cout << "== sweep: " << p.string() << "\n";
        int code = 4;
        try {
            Config c = parse_config(p);
            // env override becomes a parent dir so sweep outputs stay disjoint
            if (const char* env = std::getenv("CURVEFLOW_OUTPUT"); env && *env)
                c.output_dir = fs::path(env) / p.stem();
            code = cmd_run(c, /*resolve_env=*/false);
        } catch (const Error& e) {
            std::cerr << p.string() << ": " << e.what() << "\n";
            code = 4;
        }
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace curveflow
