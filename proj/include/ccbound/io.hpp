#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "eigenfunction.hpp"

namespace ccbound {

/// printf-style %g formatting with a fixed significant-digit count; used for
/// all emitted numbers so output is byte-stable across runs.
inline std::string fmt_sig(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline void write_eigenvalue_header_csv(std::ostream& os) {
    os << "k,E,multiplicity,err_estimate,newton_iters\n";
}

inline void write_eigenvalue_row_csv(std::ostream& os, const EigenResult& r) {
    os << r.k << ',' << fmt_sig(r.E, 12) << ',' << r.multiplicity << ','
       << (r.err_estimate_ok ? fmt_sig(r.err_estimate, 2) : std::string("nan")) << ','
       << r.newton_iters << '\n';
}

inline void write_eigenvalue_row_jsonl(std::ostream& os, const EigenResult& r) {
    os << "{\"k\":" << r.k << ",\"E\":" << fmt_sig(r.E, 12)
       << ",\"multiplicity\":" << r.multiplicity << ",\"err_estimate\":"
       << (r.err_estimate_ok ? fmt_sig(r.err_estimate, 2) : std::string("null"))
       << ",\"newton_iters\":" << r.newton_iters << "}\n";
}

/// Eigenfunction samples: one row "x,y_1..y_n,yp_1..yp_n" per meshpoint.
inline void write_eigenfunction_csv(std::ostream& os, const Eigenfunction& ef) {
    const int n = ef.samples.empty() ? 0 : static_cast<int>(ef.samples.front().y.size());
    os << "x";
    for (int i = 1; i <= n; ++i) os << ",y_" << i;
    for (int i = 1; i <= n; ++i) os << ",yp_" << i;
    os << '\n';
    for (const auto& s : ef.samples) {
        os << fmt_sig(s.x, 12);
        for (int i = 0; i < n; ++i) os << ',' << fmt_sig(s.y(i), 12);
        for (int i = 0; i < n; ++i) os << ',' << fmt_sig(s.yp(i), 12);
        os << '\n';
    }
}

/// Psi trajectory: rows "x,psi_11,psi_12,...,psi_nn" (row-major entries);
/// points where Psi is not extractable are emitted as nan.
inline void write_psi_trace_csv(std::ostream& os,
                                const std::vector<RiccatiState>& states) {
    if (states.empty()) return;
    const int n = states.front().n();
    os << "x";
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) os << ",psi_" << i << j;
    }
    os << '\n';
    for (const auto& st : states) {
        os << fmt_sig(st.x(), 12);
        if (st.extractable()) {
            const Matrix psi = st.psi().mat();
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) os << ',' << fmt_sig(psi(i, j), 12);
            }
        } else {
            for (int i = 0; i < n * n; ++i) os << ",nan";
        }
        os << '\n';
    }
}

} // namespace ccbound
