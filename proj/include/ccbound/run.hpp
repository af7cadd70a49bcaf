#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "io.hpp"

namespace ccbound {

/// Front-end configuration: problem source, index list, tolerances, outputs.
struct RunConfig {
    enum class Format { csv, jsonl };

    std::string problem;      // builtin name, or
    std::string config_path;  // problem config file (exactly one of the two)
    std::vector<int> ks;
    double tol = 1e-6;
    double E_max = 0.0;
    bool eigenfunctions = false;
    bool psi_trace = false;
    bool verbose = false;
    Format format = Format::csv;
    std::string out_dir = ".";
};

/// Parse an index list of the form "0..5,10,25".
inline std::vector<int> parse_k_list(const std::string& spec) {
    std::set<int> ks;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string item = spec.substr(pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) throw config_error("k list: empty item");
        const std::size_t dots = item.find("..");
        try {
            if (dots == std::string::npos) {
                ks.insert(std::stoi(item));
            } else {
                const int klo = std::stoi(item.substr(0, dots));
                const int khi = std::stoi(item.substr(dots + 2));
                if (khi < klo) throw config_error("k list: descending range");
                if (khi - klo > 100000) throw config_error("k list: range too large");
                for (int k = klo; k <= khi; ++k) ks.insert(k);
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("k list: cannot parse '" + item + "'");
        }
        if (comma == spec.size()) break;
    }
    for (int k : ks) {
        if (k < 0) throw config_error("k list: indices must be non-negative");
    }
    return {ks.begin(), ks.end()};
}

namespace detail {

inline std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
                   ? c : '_';
    }
    return out.empty() ? std::string("problem") : out;
}

} // namespace detail

/// Execute a run: locate every requested index, print one table row per
/// located eigenvalue, and emit the optional per-eigenvalue files.
/// Returns 0 on full success, 2 when some index failed, 1 on bad configuration.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    // configuration validation happens before any output file is touched
    if (!(cfg.tol >= 1e-12 && cfg.tol <= 1e-2)) {
        err << "error: tol must lie in [1e-12, 1e-2]\n";
        return 1;
    }
    if (cfg.ks.empty()) {
        err << "error: no eigenvalue indices requested\n";
        return 1;
    }
    if (cfg.problem.empty() == cfg.config_path.empty()) {
        err << "error: exactly one of --problem and --config must be given\n";
        return 1;
    }

    ProblemDef prob;
    try {
        prob = cfg.problem.empty() ? load_problem(cfg.config_path)
                                   : builtin_problem(cfg.problem);
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    // Solvers per refinement round: the mesh tolerance drops by 4 whenever a
    // located index fails validation on the current mesh.
    std::vector<std::unique_ptr<ShootingSolver>> solvers;
    auto solver_at = [&](int level) -> ShootingSolver& {
        while (static_cast<int>(solvers.size()) <= level) {
            const double mesh_tol =
                std::max(cfg.tol / std::pow(4.0, solvers.size()), 1e-12);
            solvers.push_back(std::make_unique<ShootingSolver>(prob, mesh_tol));
            if (cfg.verbose) {
                solvers.back()->trace = [&err](const TraceRecord& t) {
                    err << "trace k=" << t.k << " stage=" << t.stage
                        << " E=" << fmt_sig(t.E, 12);
                    if (t.stage[0] == 'n') err << " mu=" << fmt_sig(t.mu, 6);
                    if (t.index >= 0) err << " I=" << t.index;
                    err << '\n';
                };
            }
        }
        return *solvers[level];
    };

    bool partial = false;
    std::map<int, std::pair<EigenResult, int>> rows; // k -> (result, solver level)
    for (int k : cfg.ks) {
        bool done = false;
        for (int level = 0; level < 3 && !done; ++level) {
            try {
                ShootingSolver& solver = solver_at(level);
                EigenResult r = solver.locate_by_index(k, cfg.tol, cfg.E_max);
                solver.error_estimate(r);
                rows.emplace(k, std::make_pair(std::move(r), level));
                done = true;
            } catch (const index_out_of_range& e) {
                err << "k=" << k << ": " << e.what() << '\n';
                break; // a finer mesh cannot help here
            } catch (const error& e) {
                if (level == 2) err << "k=" << k << ": " << e.what() << '\n';
            }
        }
        if (!done) partial = true;
    }

    if (cfg.format == RunConfig::Format::csv) write_eigenvalue_header_csv(out);
    for (const auto& [k, row] : rows) {
        if (cfg.format == RunConfig::Format::csv) {
            write_eigenvalue_row_csv(out, row.first);
        } else {
            write_eigenvalue_row_jsonl(out, row.first);
        }
    }

    if (cfg.eigenfunctions || cfg.psi_trace) {
        std::filesystem::create_directories(cfg.out_dir);
        const std::string stem = detail::sanitize(prob.name);
        for (const auto& [k, row] : rows) {
            const ShootingSolver& solver = *solvers[row.second];
            try {
                if (cfg.eigenfunctions) {
                    const auto efs = recover_eigenfunctions(solver, row.first);
                    for (const auto& ef : efs) {
                        const std::string path = cfg.out_dir + "/" + stem + "_k" +
                                                 std::to_string(k) + "_m" +
                                                 std::to_string(ef.branch + 1) + ".csv";
                        std::ofstream f(path);
                        write_eigenfunction_csv(f, ef);
                    }
                }
                if (cfg.psi_trace) {
                    const auto traj = solver.trajectories(row.first.E);
                    std::ofstream fl(cfg.out_dir + "/" + stem + "_k" +
                                     std::to_string(k) + "_psiL.csv");
                    write_psi_trace_csv(fl, traj.left);
                    std::ofstream fr(cfg.out_dir + "/" + stem + "_k" +
                                     std::to_string(k) + "_psiR.csv");
                    write_psi_trace_csv(fr, traj.right);
                }
            } catch (const error& e) {
                err << "k=" << k << " output: " << e.what() << '\n';
                partial = true;
            }
        }
    }

    return partial ? 2 : 0;
}

} // namespace ccbound
