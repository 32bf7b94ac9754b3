#include "capmimo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "capmimo/csv.hpp"
#include "capmimo/errors.hpp"
#include "capmimo/experiments.hpp"
#include "capmimo/models.hpp"

#ifndef CAPMIMO_VERSION
#define CAPMIMO_VERSION "0.0.0"
#endif

namespace capmimo {

namespace {

constexpr int kExitCellFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names{
        {"sweep-receiver", Command::sweep_receiver},
        {"sweep-transceiver", Command::sweep_transceiver},
        {"sweep-grid", Command::sweep_grid},
        {"dof", Command::dof},
        {"bounds", Command::bounds},
    };
    return names;
}

template <typename T>
std::string list_text(const std::vector<T>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0)
            out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out + "]";
}

void usage_fail(const std::string& message) { throw UsageError("error: " + message, kExitUsage); }

void check_counts(const std::vector<std::size_t>& values, const char* flag) {
    if (values.empty())
        usage_fail(std::string(flag) + " must list at least one value");
    for (std::size_t v : values)
        if (v == 0)
            usage_fail(std::string(flag) + " values must be >= 1");
}

std::size_t max_of(const std::vector<std::size_t>& v) { return *std::max_element(v.begin(), v.end()); }

void validate(RunConfig& cfg, bool m_given, bool m1_given, bool m2_given) {
    if (cfg.distances.empty())
        usage_fail("--distances must list at least one value");
    for (double d : cfg.distances)
        if (!std::isfinite(d) || !(d > 0.0))
            usage_fail("--distances values must be finite and > 0 (got " + format_double(d) + ")");
    cfg.system.distance = cfg.distances.front();
    try {
        cfg.system.validate();
    } catch (const ConfigError& e) {
        usage_fail(e.what());
    }

    if (!m_given)
        cfg.m_values = cfg.command == Command::bounds ? std::vector<std::size_t>{10, 100, 1000}
                                                       : std::vector<std::size_t>{5, 10, 20, 40, 80, 100, 160};
    if (!m1_given)
        cfg.m1_values = {10, 20, 40, 80, 100};
    if (!m2_given)
        cfg.m2_values = {10, 20, 40, 80, 100};
    check_counts(cfg.m_values, "--m-list");
    check_counts(cfg.m1_values, "--m1-list");
    check_counts(cfg.m2_values, "--m2-list");

    if (cfg.inner_points == 0)
        cfg.inner_points = default_inner_points(cfg.system);
    else if (cfg.inner_points < 2)
        usage_fail("--inner-points must be >= 2");

    if (cfg.ref_m == 0)
        cfg.ref_m = default_reference_points(cfg.system);
    if (cfg.ref_m < 64)
        usage_fail("--ref-m must be >= 64 (got " + std::to_string(cfg.ref_m) + ")");
    std::size_t largest = 0;
    if (cfg.command == Command::sweep_receiver || cfg.command == Command::sweep_transceiver)
        largest = max_of(cfg.m_values);
    else if (cfg.command == Command::sweep_grid)
        largest = std::max(max_of(cfg.m1_values), max_of(cfg.m2_values));
    if (largest >= cfg.ref_m)
        usage_fail("--ref-m (" + std::to_string(cfg.ref_m) + ") must exceed the largest array size (" +
                   std::to_string(largest) + ")");

    if (!(cfg.dof_threshold > 0.0 && cfg.dof_threshold < 1.0))
        usage_fail("--threshold must lie in (0, 1)");
    if (cfg.out.empty())
        cfg.out = "capmimo_" + std::string(to_string(cfg.command)) + ".csv";
}

std::filesystem::path meta_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension(".meta");
    return p;
}

double in_units(double nats, const RunConfig& cfg) { return cfg.log_base == "2" ? nats / std::numbers::ln2 : nats; }

const char* unit_name(const RunConfig& cfg) { return cfg.log_base == "2" ? "bits" : "nats"; }

std::string fit_text(const SlopeFit& fit) {
    std::ostringstream s;
    s << "slope " << format_double(fit.slope) << " intercept " << format_double(fit.intercept) << " r2 "
      << format_double(fit.r_squared) << " m " << fit.m_min << ".." << fit.m_max << " points " << fit.points;
    return s.str();
}

// Per-distance convergence fits for the sidecar, skipping the first ladder point.
void append_fits(std::ostream& meta, const std::vector<SweepRow>& rows, const std::vector<double>& distances) {
    for (double d : distances) {
        std::vector<SweepRow> at_d;
        for (const SweepRow& row : rows)
            if (row.d == d)
                at_d.push_back(row);
        const std::vector<SweepRow> window = convergence_window(at_d);
        meta << "slope_fit.d=" << format_double(d) << " = ";
        try {
            meta << fit_text(fit_convergence_slope(window)) << '\n';
        } catch (const std::invalid_argument& e) {
            meta << "unavailable (" << e.what() << ")\n";
        }
    }
}

int count_failures(const std::vector<SweepRow>& rows, std::ostream& meta) {
    int failed = 0;
    for (const SweepRow& row : rows) {
        if (row.ok())
            continue;
        ++failed;
        meta << "failed_cell.d=" << format_double(row.d) << ".m1=" << row.m1 << ".m2=" << row.m2 << " = "
             << row.error << '\n';
    }
    return failed;
}

void print_rows(std::ostream& log, const std::vector<SweepRow>& rows, const RunConfig& cfg) {
    log << std::setw(10) << "d_m" << std::setw(7) << "m1" << std::setw(7) << "m2" << std::setw(16)
        << (std::string("mi_") + unit_name(cfg)) << std::setw(16) << "ref" << std::setw(14) << "abs_gap" << '\n';
    for (const SweepRow& row : rows) {
        log << std::setw(10) << format_double(row.d) << std::setw(7) << row.m1 << std::setw(7) << row.m2;
        if (!row.ok()) {
            log << "  FAILED: " << row.error << '\n';
            continue;
        }
        log << std::setw(16) << std::setprecision(8) << in_units(row.mi_nats, cfg) << std::setw(16)
            << in_units(row.mi_ref_nats, cfg) << std::setw(14) << std::setprecision(4)
            << in_units(row.abs_gap, cfg) << '\n';
    }
}

}  // namespace

std::string_view to_string(Command command) {
    for (const auto& [name, c] : command_names())
        if (c == command)
            return name;
    return "unknown";
}

std::string RunConfig::resolved_text() const {
    std::ostringstream s;
    s << "# command: " << to_string(command) << '\n'
      << "scenario = \"" << scenario << "\"\n"
      << "wavelength = " << format_double(system.wavelength) << '\n'
      << "length = " << format_double(system.aperture) << '\n'
      << "distances = " << list_text(distances) << '\n'
      << "power = " << format_double(system.power) << '\n'
      << "noise = " << format_double(system.noise) << '\n'
      << "ref-m = " << ref_m << '\n'
      << "inner-points = " << inner_points << '\n'
      << "m-list = " << list_text(m_values) << '\n'
      << "m1-list = " << list_text(m1_values) << '\n'
      << "m2-list = " << list_text(m2_values) << '\n'
      << "threshold = " << format_double(dof_threshold) << '\n'
      << "out = \"" << out << "\"\n"
      << "log-base = \"" << log_base << "\"\n"
      << "keep-going = " << (keep_going ? "true" : "false") << '\n'
      << "timing = " << (timing ? "true" : "false") << '\n';
    return s.str();
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"Mutual information of continuous-aperture and discrete line arrays", "capmimo"};
    app.set_config("--config", "", "key = value settings file; explicit flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--scenario", cfg.scenario, "Scenario label written to every CSV row");
    app.add_option("--wavelength", cfg.system.wavelength, "Wavelength lambda [m]")->capture_default_str();
    app.add_option("--length", cfg.system.aperture, "Aperture length l of both segments [m]")->capture_default_str();
    app.add_option("--distances,--distance", cfg.distances, "Transceiver separations d [m]")
                          ->delimiter(',')
                          ->capture_default_str();
    app.add_option("--power", cfg.system.power, "Source power density P")->capture_default_str();
    app.add_option("--noise", cfg.system.noise, "Noise density n0")->capture_default_str();
    app.add_option("--ref-m", cfg.ref_m, "Reference Nystrom grid size (default max(1600, 16*ceil(2l/lambda)))");
    app.add_option("--inner-points", cfg.inner_points,
                   "Source-side midpoint samples (default max(512, ceil(20 l/lambda)))");
    auto* m_list = app.add_option("--m-list", cfg.m_values, "Array sizes m")->delimiter(',');
    auto* m1_list = app.add_option("--m1-list", cfg.m1_values, "Transmit array sizes (sweep-grid)")->delimiter(',');
    auto* m2_list = app.add_option("--m2-list", cfg.m2_values, "Receive array sizes (sweep-grid)")->delimiter(',');
    app.add_option("--threshold", cfg.dof_threshold, "Relative eigenvalue threshold for dof")->capture_default_str();
    app.add_option("--out", cfg.out, "Output CSV path (a .meta sidecar is written next to it)");
    app.add_option("--log-base", cfg.log_base, "Units for the console summary")
        ->check(CLI::IsMember({"e", "2"}))
        ->capture_default_str();
    app.add_flag("--keep-going", cfg.keep_going, "Exit 0 even if some cells failed");
    app.add_flag("--timing", cfg.timing, "Fill the wall_time_s column (breaks byte-identical reruns)");

    for (const auto& [name, command] : command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->callback([&cfg, command = command] { cfg.command = command; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), 0);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string("error: ") + e.what(), kExitUsage);
    }

    validate(cfg, m_list->count() > 0, m1_list->count() > 0, m2_list->count() > 0);
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& log) {
    log << "# capmimo " << CAPMIMO_VERSION << " resolved configuration\n" << cfg.resolved_text() << std::flush;

    std::ofstream csv(cfg.out, std::ios::binary | std::ios::trunc);
    if (!csv) {
        log << "error: cannot write output file '" << cfg.out << "'\n";
        return kExitIo;
    }
    const std::filesystem::path meta_file = meta_path(cfg.out);
    std::ofstream meta(meta_file, std::ios::binary | std::ios::trunc);
    if (!meta) {
        log << "error: cannot write metadata file '" << meta_file.string() << "'\n";
        return kExitIo;
    }
    meta << "tool_version = \"" << CAPMIMO_VERSION << "\"\n" << cfg.resolved_text();
    for (double d : cfg.distances) {
        SystemConfig at = cfg.system;
        at.distance = d;
        if (at.near_field())
            meta << "near_field_warning.d=" << format_double(d)
                 << " = \"distance below two wavelengths; evanescent terms dominate\"\n";
    }

    SweepOptions opts;
    opts.scenario = cfg.scenario;
    opts.model.inner_points = cfg.inner_points;
    const CsvOptions csv_opts{cfg.timing};
    int status = 0;

    try {
        switch (cfg.command) {
        case Command::sweep_receiver:
        case Command::sweep_transceiver: {
            const auto rows = cfg.command == Command::sweep_receiver
                                  ? sweep_receiver(cfg.system, cfg.distances, cfg.m_values, cfg.ref_m, opts)
                                  : sweep_transceiver(cfg.system, cfg.distances, cfg.m_values, cfg.ref_m, opts);
            write_sweep_csv(csv, rows, csv_opts);
            append_fits(meta, rows, cfg.distances);
            print_rows(log, rows, cfg);
            if (count_failures(rows, meta) > 0 && !cfg.keep_going)
                status = kExitCellFailure;
            break;
        }
        case Command::sweep_grid: {
            std::vector<SweepRow> all;
            for (double d : cfg.distances) {
                const GridSweep grid = sweep_grid(cfg.system, d, cfg.m1_values, cfg.m2_values, cfg.ref_m, opts);
                meta << "symmetry_gap.d=" << format_double(d) << " = " << format_double(grid.symmetry_gap) << '\n';
                all.insert(all.end(), grid.rows.begin(), grid.rows.end());
            }
            write_sweep_csv(csv, all, csv_opts);
            print_rows(log, all, cfg);
            if (count_failures(all, meta) > 0 && !cfg.keep_going)
                status = kExitCellFailure;
            break;
        }
        case Command::dof: {
            csv << "scenario,d_m,ref_m,threshold_rel,eigen_count,analytic_dof,lambda_max\n";
            const ModelOptions model{cfg.inner_points};
            for (double d : cfg.distances) {
                SystemConfig at = cfg.system;
                at.distance = d;
                const DofEstimate est = dof_estimate(at, cfg.ref_m, cfg.dof_threshold, model);
                const double lambda_max = est.spectrum.eigenvalues.empty() ? 0.0 : est.spectrum.eigenvalues.front();
                csv << csv_escape(cfg.scenario) << ',' << format_double(d) << ',' << cfg.ref_m << ','
                    << format_double(cfg.dof_threshold) << ',' << est.eigen_count << ','
                    << format_double(est.analytic) << ',' << format_double(lambda_max) << '\n';
                log << "d=" << format_double(d) << " eigen_count=" << est.eigen_count
                    << " analytic=" << format_double(est.analytic) << '\n';
            }
            break;
        }
        case Command::bounds: {
            csv << "scenario,d_m,m,n1,n1_limit,gap,gap_bound,within_bound\n";
            const ModelOptions model{cfg.inner_points};
            for (double d : cfg.distances) {
                SystemConfig at = cfg.system;
                at.distance = d;
                const ReceiverReference ref = receiver_reference(at, model);
                std::vector<double> ms;
                std::vector<double> gaps;
                for (std::size_t m : cfg.m_values) {
                    const NoiseControl nc = noise_rx(midpoint_grid(at.aperture, m), at, ref);
                    const bool within = nc.gap <= nc.error_bound;
                    if (!within)
                        status = kExitCellFailure;
                    csv << csv_escape(cfg.scenario) << ',' << format_double(d) << ',' << m << ','
                        << format_double(nc.n_value) << ',' << format_double(nc.limit_value) << ','
                        << format_double(nc.gap) << ',' << format_double(nc.error_bound) << ','
                        << (within ? "true" : "false") << '\n';
                    log << "d=" << format_double(d) << " m=" << m << " gap=" << format_double(nc.gap)
                        << " bound=" << format_double(nc.error_bound) << (within ? " ok" : " VIOLATED") << '\n';
                    ms.push_back(static_cast<double>(m));
                    gaps.push_back(nc.gap);
                }
                meta << "gap_slope_fit.d=" << format_double(d) << " = ";
                try {
                    meta << fit_text(fit_power_law(ms, gaps)) << '\n';
                } catch (const std::invalid_argument& e) {
                    meta << "unavailable (" << e.what() << ")\n";
                }
            }
            if (status != 0 && cfg.keep_going)
                status = 0;
            break;
        }
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        meta << "run_error = \"" << e.what() << "\"\n";
        return kExitCellFailure;
    }

    csv.flush();
    meta.flush();
    if (!csv || !meta) {
        log << "error: failed while writing '" << cfg.out << "'\n";
        return kExitIo;
    }
    log << "wrote " << cfg.out << " and " << meta_file.string() << '\n';
    return status;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const UsageError& e) {
        (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
        return e.exit_code();
    }
    return run(cfg, std::cout);
}

}  // namespace capmimo
