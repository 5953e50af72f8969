#include "geotrack/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>

namespace geotrack {

namespace {

namespace fs = std::filesystem;

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string system_label(SystemKind k) {
    switch (k) {
        case SystemKind::sphere: return "sphere";
        case SystemKind::lissajous: return "lissajous";
        default: return "rigid_body";
    }
}

Mat3 mat_from_flat(const Vec& y) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = y[3 * r + c];
    return m;
}

Vec mat_to_flat(const Mat3& m) {
    Vec out(9);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[3 * r + c] = m(r, c);
    return out;
}

void append_block(std::string& header, const char* base, int n) {
    for (int i = 0; i < n; ++i) {
        header += ',';
        header += base;
        header += std::to_string(i);
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file: " + path.string());
    return out;
}

void write_plot_script(SystemKind system, const fs::path& path) {
    std::ofstream out = open_output(path);
    out << "# Renders the run's health panels from trajectory.csv.\n";
    out << "set datafile separator ','\n";
    out << "set terminal pngcairo size 1000,900\n";
    out << "set output 'trajectory.png'\n";
    out << "set multiplot layout 3,1\n";
    out << "set key off\n";
    out << "set logscale y\n";
    out << "set xlabel 't'\n";
    if (system == SystemKind::rigid_body) {
        out << "set ylabel 'rotation error psi'\n";
        out << "plot 'trajectory.csv' skip 1 using 1:35 with lines\n";
        out << "set ylabel 'control magnitude'\n";
        out << "plot 'trajectory.csv' skip 1 using 1:40 with lines\n";
        out << "set ylabel 'orthogonality defect'\n";
        out << "plot 'trajectory.csv' skip 1 using 1:41 with lines\n";
    } else {
        out << "set ylabel 'tracking error'\n";
        out << "plot 'trajectory.csv' skip 1 using "
               "1:(sqrt(($2-$5)**2+($3-$6)**2+($4-$7)**2)) with lines\n";
        out << "set ylabel 'control magnitude'\n";
        out << "plot 'trajectory.csv' skip 1 using 1:22 with lines\n";
        out << "set ylabel 'constraint residual'\n";
        out << "plot 'trajectory.csv' skip 1 using 1:23 with lines\n";
    }
    out << "unset multiplot\n";
}

void write_csv_rows(std::ofstream& out, const TrajectoryLog& log, SystemKind system) {
    out << csv_header(system) << "\n";
    for (const LogRow& row : log.rows) {
        out << g17(row.t);
        const auto block = [&](const Vec& v) {
            for (int i = 0; i < v.size(); ++i) out << ',' << g17(v[i]);
        };
        block(row.q);
        block(row.q_ref);
        block(row.v);
        block(row.v_ref);
        block(row.e);
        out << ',' << g17(row.psi_e) << ',' << g17(row.e_cl);
        block(row.u);
        out << ',' << g17(row.u_norm) << ',' << g17(row.residual) << "\n";
    }
}

RunSummary summarize(const TrajectoryLog& log,
                     const std::vector<std::string>& repairs_applied) {
    RunSummary s;
    s.rows = static_cast<int>(log.rows.size());
    if (!log.rows.empty())
        s.final_tracking_error = (log.rows.back().q - log.rows.back().q_ref).norm();
    s.time_to_band = hold_entry_time(log);
    s.lyapunov_violations = log.lyapunov_violations;
    s.max_energy_increase = log.max_energy_increase;
    s.max_constraint_residual = log.max_constraint_residual;
    s.max_control_norm = log.max_control_norm;
    s.repairs_applied = repairs_applied;
    s.abort = log.abort;
    s.exit_code = log.abort.has_value() ? 2 : 0;
    return s;
}

void write_summary_file(const fs::path& path, const std::string& label,
                        const ScenarioConfig& config, const std::string& controller,
                        const RunSummary& s, const TrajectoryLog& log) {
    std::ofstream out = open_output(path);
    out << "scenario=" << label << "\n";
    out << "system=" << system_label(config.system) << "\n";
    out << "controller=" << controller << "\n";
    out << "duration=" << g17(config.duration) << "\n";
    out << "dt=" << g17(config.dt) << "\n";
    out << "rows=" << s.rows << "\n";
    out << "exit_code=" << s.exit_code << "\n";
    if (s.abort) {
        out << "abort_kind=" << s.abort->kind << "\n";
        out << "abort_time=" << g17(s.abort->t) << "\n";
    }
    out << "final_tracking_error="
        << (s.final_tracking_error ? g17(*s.final_tracking_error) : "none") << "\n";
    out << "time_to_band=" << (s.time_to_band ? g17(*s.time_to_band) : "none") << "\n";
    out << "lyapunov_violations=" << s.lyapunov_violations << "\n";
    out << "max_energy_increase=" << g17(s.max_energy_increase) << "\n";
    out << "max_constraint_residual=" << g17(s.max_constraint_residual) << "\n";
    out << "max_control_norm=" << g17(s.max_control_norm) << "\n";
    if (config.system != SystemKind::rigid_body)
        out << "min_singularity_margin=" << g17(log.min_singularity_margin) << "\n";
    else
        out << "max_reference_drift=" << g17(log.max_reference_drift) << "\n";
    out << "max_reference_speed=" << g17(log.max_reference_speed) << "\n";
    out << "repairs_applied=" << s.repairs_applied.size() << "\n";
    for (size_t i = 0; i < s.repairs_applied.size(); ++i)
        out << "repair_" << i + 1 << "=" << s.repairs_applied[i] << "\n";
}

ScenarioConfig resolve_config(const std::string& preset_or_path, const RunOptions& opts) {
    ScenarioConfig config;
    if (fs::exists(preset_or_path) && fs::is_regular_file(preset_or_path))
        config = load_scenario_file(preset_or_path);
    else
        config = preset(preset_or_path);
    if (opts.dt) config.dt = *opts.dt;
    if (opts.duration) config.duration = *opts.duration;
    if (opts.strict_ic) config.ic_repair = IcRepair::strict;
    if (!(config.dt > 0.0) || !std::isfinite(config.dt))
        throw Error("dt must be finite and positive");
    if (config.duration < 0.0 || !std::isfinite(config.duration))
        throw Error("duration must be finite and non-negative");
    return config;
}

}  // namespace

std::string csv_header(SystemKind system) {
    const int qn = system == SystemKind::rigid_body ? 9 : 3;
    std::string header = "t";
    append_block(header, "q", qn);
    append_block(header, "qr", qn);
    append_block(header, "v", 3);
    append_block(header, "vr", 3);
    append_block(header, "e", qn);
    header += ",psi_e,e_cl";
    append_block(header, "u", 3);
    header += ",u_norm,residual";
    return header;
}

void write_trajectory_csv(const TrajectoryLog& log, SystemKind system,
                          const std::string& path) {
    std::ofstream out = open_output(path);
    write_csv_rows(out, log, system);
    if (!out) throw Error("failed writing trajectory file: " + path);
}

std::optional<double> hold_entry_time(const TrajectoryLog& log) {
    if (log.abort.has_value() || log.rows.empty()) return std::nullopt;
    size_t entry = 0;
    for (size_t i = 0; i < log.rows.size(); ++i)
        if ((log.rows[i].q - log.rows[i].q_ref).norm() >= 0.05) entry = i + 1;
    if (entry >= log.rows.size()) return std::nullopt;
    return log.rows[entry].t;
}

RunSummary run_scenario(const std::string& preset_or_path, const RunOptions& opts) {
    const ScenarioConfig config = resolve_config(preset_or_path, opts);
    if (opts.controller != "agat" && opts.controller != "pdff")
        throw Error("unknown controller '" + opts.controller + "'");
    if (opts.controller == "pdff" && config.system != SystemKind::rigid_body)
        throw Error("the pdff controller applies to the rigid body only");

    TrajectoryLog log;
    std::vector<std::string> repairs;
    if (config.system == SystemKind::rigid_body) {
        const So3Gains gains(config.weight, config.damping);
        const PreparedScenario prep = prepare(config);
        repairs = prep.repairs_applied;
        const So3Law law = opts.controller == "pdff" ? So3Law::pdff : So3Law::agat;
        log = simulate_so3(config.inertia, gains, mat_from_flat(prep.q0),
                           Vec3(prep.v0[0], prep.v0[1], prep.v0[2]), prep.so3_reference,
                           law, config.duration, config.dt);
    } else {
        const Sphere sphere;
        const LissajousCurve curve;
        const bool on_sphere = config.system == SystemKind::sphere;
        const Manifold& man = on_sphere ? static_cast<const Manifold&>(sphere)
                                        : static_cast<const Manifold&>(curve);
        std::unique_ptr<ConfigurationErrorMap> emap;
        if (on_sphere)
            emap = std::make_unique<SphereErrorMap>(sphere);
        else
            emap = std::make_unique<LissajousErrorMap>(curve);
        const CoordinateNavigation nav(on_sphere ? 2 : 0);
        const Gains gains(config.k_p, config.k_d);
        const PreparedScenario prep = prepare(config);
        repairs = prep.repairs_applied;
        log = simulate(man, *emap, nav, gains, Vec3(prep.q0[0], prep.q0[1], prep.q0[2]),
                       Vec3(prep.v0[0], prep.v0[1], prep.v0[2]), prep.reference,
                       config.duration, config.dt);
    }

    RunSummary summary = summarize(log, repairs);
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    write_trajectory_csv(log, config.system, (dir / "trajectory.csv").string());
    write_summary_file(dir / "summary.txt", preset_or_path, config, opts.controller, summary,
                       log);
    write_plot_script(config.system, dir / "plot.gp");
    return summary;
}

int compare_so3(const RunOptions& opts) {
    ScenarioConfig base = preset("so3_compare");
    if (opts.dt) base.dt = *opts.dt;
    if (opts.duration) base.duration = *opts.duration;
    if (opts.strict_ic) base.ic_repair = IcRepair::strict;
    const So3Gains gains(base.weight, base.damping);

    struct Case {
        int index;
        Mat3 r0;
    };
    const Case cases[2] = {{1, mat_from_flat(base.q0)}, {2, so3_alternate_initial_rotation()}};

    struct Outcome {
        int index = 0;
        std::vector<std::string> repairs;
        TrajectoryLog agat;
        TrajectoryLog pdff;
    };
    std::vector<Outcome> outcomes;
    for (const Case& c : cases) {
        ScenarioConfig cfg = base;
        cfg.q0 = mat_to_flat(c.r0);
        const PreparedScenario prep = prepare(cfg);  // throws before any file exists
        Outcome o;
        o.index = c.index;
        o.repairs = prep.repairs_applied;
        const Mat3 r0 = mat_from_flat(prep.q0);
        const Vec3 om0(prep.v0[0], prep.v0[1], prep.v0[2]);
        o.agat = simulate_so3(cfg.inertia, gains, r0, om0, prep.so3_reference, So3Law::agat,
                              cfg.duration, cfg.dt);
        o.pdff = simulate_so3(cfg.inertia, gains, r0, om0, prep.so3_reference, So3Law::pdff,
                              cfg.duration, cfg.dt);
        outcomes.push_back(std::move(o));
    }

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    int exit_code = 0;
    std::ofstream summary = open_output(dir / "so3_summary.txt");
    for (const Outcome& o : outcomes) {
        const std::string suffix = "_ic" + std::to_string(o.index);
        write_trajectory_csv(o.agat, SystemKind::rigid_body,
                             (dir / ("so3_agat" + suffix + ".csv")).string());
        write_trajectory_csv(o.pdff, SystemKind::rigid_body,
                             (dir / ("so3_pdff" + suffix + ".csv")).string());

        std::ofstream effort = open_output(dir / ("so3_effort" + suffix + ".csv"));
        effort << "t,u_agat,u_pdff\n";
        const size_t n = std::min(o.agat.rows.size(), o.pdff.rows.size());
        for (size_t i = 0; i < n; ++i)
            effort << g17(o.agat.rows[i].t) << ',' << g17(o.agat.rows[i].u_norm) << ','
                   << g17(o.pdff.rows[i].u_norm) << "\n";

        for (const auto* side : {&o.agat, &o.pdff}) {
            const bool is_agat = side == &o.agat;
            const TrajectoryLog& log = *side;
            summary << "run=ic" << o.index << "/" << (is_agat ? "agat" : "pdff") << "\n";
            summary << "  rows=" << log.rows.size() << "\n";
            if (log.abort) {
                summary << "  abort=" << log.abort->kind << " t=" << g17(log.abort->t)
                        << "\n";
                exit_code = 2;
            }
            double min_psi = std::numeric_limits<double>::infinity();
            for (const LogRow& row : log.rows) min_psi = std::min(min_psi, row.psi_e);
            const double final_psi = log.rows.empty() ? 0.0 : log.rows.back().psi_e;
            const double final_effort = log.rows.empty() ? 0.0 : log.rows.back().u_norm;
            summary << "  final_psi=" << g17(final_psi) << "\n";
            summary << "  min_psi=" << g17(min_psi) << "\n";
            summary << "  lyapunov_violations=" << log.lyapunov_violations << "\n";
            summary << "  max_energy_increase=" << g17(log.max_energy_increase) << "\n";
            summary << "  max_integrity_defect=" << g17(log.max_constraint_residual) << "\n";
            summary << "  max_reference_drift=" << g17(log.max_reference_drift) << "\n";
            summary << "  max_effort=" << g17(log.max_control_norm) << "\n";
            summary << "  final_effort=" << g17(final_effort) << "\n";
        }
        summary << "repairs_ic" << o.index << "=" << o.repairs.size() << "\n";
        for (const std::string& r : o.repairs) summary << "  repair=" << r << "\n";
    }
    return exit_code;
}

int sweep_basin(const RunOptions& opts) {
    if (opts.count < 1) throw Error("sweep count must be at least 1");
    const Sphere sphere;
    const SphereErrorMap emap(sphere);
    const CoordinateNavigation nav(2);
    const Gains gains(3.7, -4.0);
    const Vec3 q_ref = Vec3(0.2, -0.5, 0.84).normalized();
    const DummySystemReference ref{q_ref, Vec3::Zero(), Vec3::Zero()};
    // Default run length: long enough that every healthy start reaches and
    // holds the 0.05 band (worst observed entry ~5.4 s), short enough that
    // the static-reference loop does not decay into the error map's singular
    // diagonal, where the 1/s feedforward amplifies rounding noise into a
    // blow-up no floating-point evaluation can avoid.
    const double duration = opts.duration.value_or(10.0);
    const double dt = opts.dt.value_or(1e-3);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be finite and positive");
    if (duration < 0.0 || !std::isfinite(duration))
        throw Error("duration must be finite and non-negative");

    std::mt19937_64 engine(opts.seed);
    // Raw 53-bit mantissa draw: identical across standard libraries.
    const auto uniform = [&]() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    std::ofstream out = open_output(dir / "sweep_summary.txt");
    out << "reference=" << g17(q_ref[0]) << " " << g17(q_ref[1]) << " " << g17(q_ref[2])
        << "\n";
    out << "count=" << opts.count << "\n";
    out << "seed=" << opts.seed << "\n";
    out << "duration=" << g17(duration) << "\n";
    out << "dt=" << g17(dt) << "\n";

    int converged = 0;
    for (int i = 0; i < opts.count; ++i) {
        Vec3 q0;
        do {
            const double z = 2.0 * uniform() - 1.0;
            const double phi = 2.0 * M_PI * uniform();
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            q0 = {r * std::cos(phi), r * std::sin(phi), z};
        } while (emap.singularity_margin(q0, q_ref) < 1e-3);

        const TrajectoryLog log =
            simulate(sphere, emap, nav, gains, q0, Vec3::Zero(), ref, duration, dt);
        const std::optional<double> band = hold_entry_time(log);
        const bool ok = !log.abort.has_value() && band.has_value();
        if (ok) ++converged;
        out << "start_" << i + 1 << ": q0=" << g17(q0[0]) << " " << g17(q0[1]) << " "
            << g17(q0[2]) << " converged=" << (ok ? "yes" : "no");
        if (band) out << " hold_from=" << g17(*band);
        if (log.abort) out << " abort=" << log.abort->kind << " t=" << g17(log.abort->t);
        out << "\n";
    }

    const TrajectoryLog anti =
        simulate(sphere, emap, nav, gains, -q_ref, Vec3::Zero(), ref, duration, dt);
    out << "antipodal: rows=" << anti.rows.size();
    if (anti.abort)
        out << " abort=" << anti.abort->kind << " t=" << g17(anti.abort->t)
            << " (graceful rejection)";
    out << "\n";
    out << "converged=" << converged << "/" << opts.count << "\n";
    return converged == opts.count ? 0 : 2;
}

int export_preset(const std::string& name, const std::string& path) {
    save_scenario_file(preset(name), path);
    return 0;
}

}  // namespace geotrack
