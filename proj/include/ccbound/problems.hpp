#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "smallmat.hpp"

namespace ccbound {

/// A coupled-channel boundary value problem
///   -Y'' + V(x) Y = E Y  on [a, b],
///   A1 Y(a) + A2 Y'(a) = 0,   B1 Y(b) + B2 Y'(b) = 0,
/// with V(x) symmetric n x n and the boundary pairs conjoined
/// (A1^T A2 = A2^T A1) and of full rank n.
struct ProblemDef {
    std::string name;
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    Matrix A1, A2, B1, B2;
    std::function<Matrix(double)> V;
};

namespace detail {

inline bool conjoined(const Matrix& M1, const Matrix& M2) {
    const Matrix s = M1.transpose() * M2 - M2.transpose() * M1;
    const double scale = 1.0 + inf_norm(M1) * inf_norm(M2);
    return inf_norm(s) <= 1e-12 * scale;
}

inline bool full_rank_pair(const Matrix& M1, const Matrix& M2) {
    Matrix stacked(M1.rows(), M1.cols() + M2.cols());
    stacked << M1, M2;
    Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    return qr.rank() == M1.rows();
}

} // namespace detail

/// Check the structural invariants of a ProblemDef; throws on violation.
inline void validate_problem(const ProblemDef& p) {
    if (p.n < 1) throw config_error("problem: channel count must be positive");
    if (!(p.a < p.b)) throw config_error("problem: domain must satisfy a < b");
    if (!p.V) throw config_error("problem: potential evaluator missing");
    auto check_dims = [&](const Matrix& m, const char* name) {
        if (m.rows() != p.n || m.cols() != p.n) {
            throw config_error(std::string("problem: ") + name + " must be n x n");
        }
    };
    check_dims(p.A1, "A1");
    check_dims(p.A2, "A2");
    check_dims(p.B1, "B1");
    check_dims(p.B2, "B2");
    if (!detail::full_rank_pair(p.A1, p.A2)) {
        throw invalid_boundary_condition("problem: rank(A1|A2) = n violated");
    }
    if (!detail::full_rank_pair(p.B1, p.B2)) {
        throw invalid_boundary_condition("problem: rank(B1|B2) = n violated");
    }
    if (!detail::conjoined(p.A1, p.A2)) {
        throw invalid_boundary_condition("problem: conjointness A1^T A2 = A2^T A1 violated");
    }
    if (!detail::conjoined(p.B1, p.B2)) {
        throw invalid_boundary_condition("problem: conjointness B1^T B2 = B2^T B1 violated");
    }
    // spot-check symmetry of the potential
    for (int s = 0; s <= 4; ++s) {
        const double x = p.a + (p.b - p.a) * s / 4.0;
        const Matrix v = p.V(x);
        if (v.rows() != p.n || v.cols() != p.n) {
            throw config_error("problem: potential evaluator returned wrong dimensions");
        }
        if (inf_norm(v - v.transpose()) > 1e-10 * (1.0 + inf_norm(v))) {
            throw config_error("problem: potential matrix is not symmetric");
        }
    }
}

/// Two coupled Poeschl-Teller wells on [0, 30], Dirichlet at both ends.
///   V11 = V22 = Vpt(x;45,1) + Vpt(x;39/2,1/2)
///   V12 = V21 = Vpt(x;45,1) - Vpt(x;39/2,1/2),  Vpt(x;nu,al) = -nu/cosh^2(al x)
/// The sum/difference channels decouple into scalar wells -90/cosh^2(x) and
/// -39/cosh^2(x/2), whose odd bound states give the exact spectrum.
inline ProblemDef coupled_poschl_teller() {
    ProblemDef p;
    p.name = "poschl_teller_2ch";
    p.n = 2;
    p.a = 0.0;
    p.b = 30.0;
    p.A1 = Matrix::Identity(2, 2);
    p.A2 = Matrix::Zero(2, 2);
    p.B1 = Matrix::Identity(2, 2);
    p.B2 = Matrix::Zero(2, 2);
    p.V = [](double x) {
        auto vpt = [](double xx, double nu, double al) {
            const double c = std::cosh(al * xx);
            return -nu / (c * c);
        };
        const double v_a = vpt(x, 45.0, 1.0);
        const double v_b = vpt(x, 19.5, 0.5);
        Matrix v(2, 2);
        v << v_a + v_b, v_a - v_b,
             v_a - v_b, v_a + v_b;
        return v;
    };
    validate_problem(p);
    return p;
}

namespace detail {

/// Basis functions on [0, 2*pi] used by the Woods-Saxon coupling matrix.
inline double ws_phi(int j, double theta) {
    const double pi = std::numbers::pi;
    if (j == 0) return 1.0 / std::sqrt(2.0 * pi);
    if (j % 2 == 1) return std::sin((j + 1) * theta / 2.0) / std::sqrt(pi);
    return std::cos(j * theta / 2.0) / std::sqrt(pi);
}

/// Q(i+1,j+1) = sum_k 2^{-k} int_0^{2pi} Phi_i Phi_j cos(k theta) dtheta,
/// computed by a 4096-point trapezoid rule (exact-grade for trigonometric
/// integrands) with the sum cut once 2^{-k} < 1e-16.
inline Matrix ws_coupling(int n) {
    const double pi = std::numbers::pi;
    const int m = 4096;
    std::vector<std::vector<double>> phi(n, std::vector<double>(m));
    for (int j = 0; j < n; ++j) {
        for (int t = 0; t < m; ++t) {
            phi[j][t] = ws_phi(j, 2.0 * pi * t / m);
        }
    }
    Matrix q = Matrix::Zero(n, n);
    double pow2 = 1.0;
    for (int k = 0; k <= 53; ++k, pow2 *= 0.5) {
        std::vector<double> ck(m);
        for (int t = 0; t < m; ++t) {
            ck[t] = std::cos(k * 2.0 * pi * t / m);
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                double acc = 0.0;
                for (int t = 0; t < m; ++t) acc += phi[i][t] * phi[j][t] * ck[t];
                const double integral = acc * (2.0 * pi / m);
                q(i, j) += pow2 * integral;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) q(i, j) = q(j, i);
    }
    return 0.5 * (q + q.transpose());
}

} // namespace detail

/// Coupled Woods-Saxon system on [0, 15] with Dirichlet conditions:
///   V(x) = Vbar(x) * Q,  Vbar(x) = -50 (1 - 5t/(3(1+t)))/(1+t),  t = e^{(x-7)/0.6}.
inline ProblemDef coupled_woods_saxon(int n) {
    if (n < 1 || n > 32) {
        throw domain_error("coupled_woods_saxon: channel count must be in [1, 32]");
    }
    ProblemDef p;
    p.name = "woods_saxon_" + std::to_string(n) + "ch";
    p.n = n;
    p.a = 0.0;
    p.b = 15.0;
    p.A1 = Matrix::Identity(n, n);
    p.A2 = Matrix::Zero(n, n);
    p.B1 = Matrix::Identity(n, n);
    p.B2 = Matrix::Zero(n, n);
    auto q = std::make_shared<Matrix>(detail::ws_coupling(n));
    p.V = [q](double x) {
        const double t = std::exp((x - 7.0) / 0.6);
        const double vbar = -50.0 * (1.0 - 5.0 * t / (3.0 * (1.0 + t))) / (1.0 + t);
        return Matrix(vbar * (*q));
    };
    validate_problem(p);
    return p;
}

/// Scalar Woods-Saxon potential value, exposed for tests.
inline double woods_saxon_vbar(double x) {
    const double t = std::exp((x - 7.0) / 0.6);
    return -50.0 * (1.0 - 5.0 * t / (3.0 * (1.0 + t))) / (1.0 + t);
}

/// Coupling matrix of the Woods-Saxon system, exposed for tests.
inline Matrix woods_saxon_coupling(int n) { return detail::ws_coupling(n); }

/// Look up a built-in problem by name ("poschl_teller_2ch", "woods_saxon_<n>ch").
inline ProblemDef builtin_problem(const std::string& name) {
    if (name == "poschl_teller_2ch") return coupled_poschl_teller();
    const std::string prefix = "woods_saxon_";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        const std::string rest = name.substr(prefix.size());
        if (rest.size() > 2 && rest.substr(rest.size() - 2) == "ch") {
            try {
                const int n = std::stoi(rest.substr(0, rest.size() - 2));
                return coupled_woods_saxon(n);
            } catch (const std::exception&) {
                // fall through to the error below
            }
        }
    }
    throw config_error("unknown builtin problem '" + name + "'");
}

namespace detail {

struct TableRow {
    double x;
    std::vector<double> upper; // n(n+1)/2 entries, row-major upper triangle
};

inline Matrix table_to_matrix(const std::vector<double>& upper, int n) {
    Matrix v(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            v(i, j) = upper[idx];
            v(j, i) = upper[idx];
            ++idx;
        }
    }
    return v;
}

inline Matrix parse_matrix(const std::string& text, int n, const std::string& key) {
    std::istringstream is(text);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(is >> m(i, j))) {
                throw config_error("config: " + key + " needs " + std::to_string(n * n) +
                                   " row-major entries");
            }
        }
    }
    double extra;
    if (is >> extra) {
        throw config_error("config: " + key + " has more than " + std::to_string(n * n) +
                           " entries");
    }
    return m;
}

} // namespace detail

/// Parse a problem definition from structured text.  Sections:
///   [problem]  n, a, b, name (optional)
///   [bc]       A1, A2, B1, B2 as row-major whitespace-separated lists
///   [potential] type = builtin|table; builtin needs name=...; table rows are
///               "x v11 v12 ... vnn" (upper triangle), interpolated linearly.
inline ProblemDef load_problem(std::istream& in) {
    std::string section;
    std::map<std::string, std::string> kv;       // "section.key" -> value
    std::vector<detail::TableRow> rows;
    int lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw config_error("config: malformed section header at line " +
                                   std::to_string(lineno));
            }
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            // bare data line: only legal as a table row inside [potential]
            if (section != "potential") {
                throw config_error("config: unexpected data at line " + std::to_string(lineno));
            }
            std::istringstream is(line);
            detail::TableRow row;
            if (!(is >> row.x)) {
                throw config_error("config: bad table row at line " + std::to_string(lineno));
            }
            double v;
            while (is >> v) row.upper.push_back(v);
            rows.push_back(std::move(row));
            continue;
        }
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);
        kv[section + "." + key] = val;
    }

    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw config_error("config: missing key '" + key + "'");
        return it->second;
    };
    auto to_double = [](const std::string& s, const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw config_error("config: '" + key + "' is not a number");
        }
    };

    ProblemDef p;
    p.n = static_cast<int>(to_double(require("problem.n"), "problem.n"));
    p.a = to_double(require("problem.a"), "problem.a");
    p.b = to_double(require("problem.b"), "problem.b");
    p.name = kv.count("problem.name") ? kv["problem.name"] : "custom";
    if (p.n < 1 || p.n > 64) throw config_error("config: problem.n out of range");

    p.A1 = detail::parse_matrix(require("bc.A1"), p.n, "bc.A1");
    p.A2 = detail::parse_matrix(require("bc.A2"), p.n, "bc.A2");
    p.B1 = detail::parse_matrix(require("bc.B1"), p.n, "bc.B1");
    p.B2 = detail::parse_matrix(require("bc.B2"), p.n, "bc.B2");

    const std::string type = require("potential.type");
    if (type == "builtin") {
        const ProblemDef base = builtin_problem(require("potential.name"));
        if (base.n != p.n) {
            throw config_error("config: problem.n disagrees with builtin potential");
        }
        p.V = base.V;
    } else if (type == "table") {
        const std::size_t expect = static_cast<std::size_t>(p.n) * (p.n + 1) / 2;
        if (rows.size() < 2) throw config_error("config: potential table needs >= 2 rows");
        for (const auto& r : rows) {
            if (r.upper.size() != expect) {
                throw config_error("config: each table row needs x plus " +
                                   std::to_string(expect) + " upper-triangle entries");
            }
        }
        auto tab = std::make_shared<std::vector<detail::TableRow>>(rows);
        std::sort(tab->begin(), tab->end(),
                  [](const auto& l, const auto& r) { return l.x < r.x; });
        if (p.a < tab->front().x - 1e-12 || p.b > tab->back().x + 1e-12) {
            throw config_error("config: potential table does not cover [a, b]");
        }
        const int n = p.n;
        p.V = [tab, n](double x) {
            const auto& t = *tab;
            auto it = std::upper_bound(t.begin(), t.end(), x,
                                       [](double v, const auto& r) { return v < r.x; });
            if (it == t.begin()) it = t.begin() + 1;
            if (it == t.end()) it = t.end() - 1;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (hi.x > lo.x) ? (x - lo.x) / (hi.x - lo.x) : 0.0;
            std::vector<double> mix(lo.upper.size());
            for (std::size_t i = 0; i < mix.size(); ++i) {
                mix[i] = (1.0 - w) * lo.upper[i] + w * hi.upper[i];
            }
            return detail::table_to_matrix(mix, n);
        };
    } else {
        throw config_error("config: potential.type must be 'builtin' or 'table'");
    }

    validate_problem(p);
    return p;
}

inline ProblemDef load_problem(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("config: cannot open '" + path + "'");
    return load_problem(f);
}

} // namespace ccbound
