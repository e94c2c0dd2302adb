// crw: single-photon transport through coupled-resonator waveguide
// clusters: point amplitudes, k sweeps, total-reflection windows, and
// closed-form vs network-solver verification.
//
// Exit codes: 0 success, 1 verification mismatch, 2 domain error
// (band edge, degenerate or singular point), 3 input error (bad flags,
// malformed or invalid config).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <crw/crw.hpp>

namespace {

crw::ClusterSpec load_and_warn(const std::string& config_path) {
    crw::ClusterSpec cluster = crw::load_config(config_path);
    for (const crw::Violation& v : crw::validate(cluster)) {
        if (!v.fatal) {
            std::cerr << "warning: " << v.path << ": " << v.message << "\n";
        }
    }
    return cluster;
}

void write_output(const std::string& out_path, const std::string& bytes) {
    if (out_path.empty()) {
        std::cout << bytes;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw crw::Error("cannot open output file: " + out_path);
    }
    out << bytes;
}

int run_point(const std::string& config_path, double k) {
    const crw::ClusterSpec cluster = load_and_warn(config_path);
    const crw::ModeContext mode = crw::dispersion(k, cluster.params);
    const auto snapped =
        crw::detail::snap_resonant(cluster, mode.energy,
                                   crw::sweep_pole_window);
    const crw::Evaluation eval =
        crw::evaluate_with_fallback(snapped ? *snapped : cluster, mode);
    const std::vector<crw::Emitter> emitters = crw::list_emitters(cluster);

    std::ostringstream doc;
    doc << "{\"k\":" << crw::format_number(k)
        << ",\"E\":" << crw::format_number(mode.energy) << ",\"detuning\":";
    if (emitters.empty()) {
        doc << "null";
    } else {
        doc << crw::format_number(mode.energy -
                                  emitters.front().transition_frequency);
    }
    const crw::ScatteringResult& res = eval.result;
    doc << ",\"r\":[" << crw::format_number(res.r.real()) << ","
        << crw::format_number(res.r.imag()) << "]"
        << ",\"t_N\":[" << crw::format_number(res.t_n.real()) << ","
        << crw::format_number(res.t_n.imag()) << "]"
        << ",\"R\":" << crw::format_number(res.reflectance)
        << ",\"T\":" << crw::format_number(res.transmittance)
        << ",\"method\":\"" << crw::method_name(eval.method) << "\""
        << ",\"hermitian\":" << (res.hermitian ? "true" : "false") << "}\n";
    std::cout << doc.str();
    return 0;
}

crw::SweepSpec make_sweep_spec(const crw::ClusterSpec& cluster, double k_min,
                               double k_max, int points) {
    crw::SweepSpec spec;
    spec.cluster = cluster;
    spec.k_min = k_min;
    spec.k_max = k_max;
    spec.points = points;
    if (!crw::list_emitters(cluster).empty()) {
        spec.reference_emitter = 0;
    }
    return spec;
}

int run_sweep(const std::string& config_path, double k_min, double k_max,
              int points, const std::string& format,
              const std::string& out_path) {
    if (format != "csv" && format != "json-lines") {
        throw crw::Error("format must be csv or json-lines");
    }
    const crw::ClusterSpec cluster = load_and_warn(config_path);
    const crw::SpectrumRecord record =
        crw::sweep_k(make_sweep_spec(cluster, k_min, k_max, points));
    std::ostringstream bytes;
    if (format == "csv") {
        crw::write_csv(bytes, crw::spectrum_to_table(record));
    } else {
        crw::write_json_lines(bytes, record);
    }
    write_output(out_path, bytes.str());
    return 0;
}

int run_windows(const std::string& config_path, double k_min, double k_max,
                int points, double threshold, const std::string& out_path) {
    const crw::ClusterSpec cluster = load_and_warn(config_path);
    const crw::SpectrumRecord record =
        crw::sweep_k(make_sweep_spec(cluster, k_min, k_max, points));
    const auto windows = crw::find_windows(record, threshold);
    std::ostringstream bytes;
    crw::write_csv(bytes, crw::windows_to_table(windows));
    write_output(out_path, bytes.str());
    return 0;
}

int run_verify(const std::string& config_path, int samples,
               std::uint64_t seed) {
    const crw::ClusterSpec cluster = load_and_warn(config_path);
    const crw::VerificationReport report =
        crw::verify_against_oracle(cluster, samples, seed);
    std::ostringstream doc;
    doc << "{\"samples\":" << report.samples << ",\"seed\":" << report.seed
        << ",\"max_abs_dr\":" << crw::format_number(report.max_abs_dr)
        << ",\"max_abs_dt\":" << crw::format_number(report.max_abs_dt)
        << ",\"worst_k\":" << crw::format_number(report.worst_k) << "}\n";
    std::cout << doc.str();
    const bool pass = report.max_abs_dr < 1e-8 && report.max_abs_dt < 1e-8;
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-photon transport through coupled-resonator "
                 "waveguide clusters"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    double k = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
    int points = 0;
    double threshold = 1.0 - 1e-6;
    int samples = 0;
    std::uint64_t seed = 0;

    CLI::App* point = app.add_subcommand(
        "point", "amplitudes at a single wavenumber");
    point->add_option("--config", config_path, "cluster config JSON")
        ->required();
    point->add_option("--k", k, "wavenumber in (0, pi)")->required();

    CLI::App* sweep = app.add_subcommand(
        "sweep", "reflection/transmission spectrum over k");
    sweep->add_option("--config", config_path, "cluster config JSON")
        ->required();
    sweep->add_option("--k-min", k_min, "lowest wavenumber")->required();
    sweep->add_option("--k-max", k_max, "highest wavenumber")->required();
    sweep->add_option("--points", points, "number of rows")->required();
    sweep->add_option("--format", format, "csv or json-lines");
    sweep->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* windows = app.add_subcommand(
        "windows", "total-reflection windows of a spectrum");
    windows->add_option("--config", config_path, "cluster config JSON")
        ->required();
    windows->add_option("--k-min", k_min, "lowest wavenumber")->required();
    windows->add_option("--k-max", k_max, "highest wavenumber")->required();
    windows->add_option("--points", points, "number of rows")->required();
    windows->add_option("--threshold", threshold,
                        "reflectance threshold in (0, 1)");
    windows->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* verify = app.add_subcommand(
        "verify", "compare closed forms against the network solver");
    verify->add_option("--config", config_path, "cluster config JSON")
        ->required();
    verify->add_option("--samples", samples, "number of wavenumber samples")
        ->required();
    verify->add_option("--seed", seed, "RNG seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (point->parsed()) {
            return run_point(config_path, k);
        }
        if (sweep->parsed()) {
            return run_sweep(config_path, k_min, k_max, points, format,
                             out_path);
        }
        if (windows->parsed()) {
            return run_windows(config_path, k_min, k_max, points, threshold,
                               out_path);
        }
        return run_verify(config_path, samples, seed);
    } catch (const crw::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const crw::BandEdgeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::SweepRowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::ResonantPoleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::DegenerateChannelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::GammaPoleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::SingularSystemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::NonFiniteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const crw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
