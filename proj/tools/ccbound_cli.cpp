// Command-line front end: pick a problem, an index range and a tolerance;
// print the eigenvalue table and optionally emit eigenfunction samples and
// Psi trajectories as CSV.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ccbound/ccbound.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ccbound: bound states of coupled-channel Schrodinger systems"};

    ccbound::RunConfig cfg;
    std::string kspec = "0";
    std::string format = "csv";

    app.add_option("--problem", cfg.problem,
                   "builtin problem name (poschl_teller_2ch, woods_saxon_<n>ch)");
    app.add_option("--config", cfg.config_path, "problem config file");
    app.add_option("--k", kspec, "eigenvalue indices, e.g. 0..5,10,25")
        ->capture_default_str();
    app.add_option("--tol", cfg.tol, "tolerance in [1e-12, 1e-2]")
        ->capture_default_str();
    app.add_option("--emax", cfg.E_max, "search ceiling for the eigenvalue bracket")
        ->capture_default_str();
    app.add_flag("--eigenfunctions", cfg.eigenfunctions,
                 "write <problem>_k<k>_m<branch>.csv eigenfunction samples");
    app.add_flag("--psi-trace", cfg.psi_trace,
                 "write <problem>_k<k>_psi{L,R}.csv trajectories");
    app.add_option("--format", format, "table format: csv or json-lines")
        ->capture_default_str();
    app.add_option("--out-dir", cfg.out_dir, "directory for emitted files")
        ->capture_default_str();
    app.add_flag("--verbose", cfg.verbose, "per-iteration trace on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        cfg.ks = ccbound::parse_k_list(kspec);
        if (format == "csv") {
            cfg.format = ccbound::RunConfig::Format::csv;
        } else if (format == "json-lines" || format == "jsonl") {
            cfg.format = ccbound::RunConfig::Format::jsonl;
        } else {
            std::cerr << "error: unknown format '" << format << "'\n";
            return 1;
        }
    } catch (const ccbound::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    return ccbound::run(cfg, std::cout, std::cerr);
}
