#include "dsbr/records.hpp"

#include <cstdio>

namespace dsbr {

namespace {

// %.17g round-trips doubles, so summary statistics recomputed from CSV files
// match the in-memory values exactly.
void append_double(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

}  // namespace

std::string diagnostics_csv_header() {
    return "outer_t,inner_k,nash_gap,l_v,l_sum,l_pi,l_q,smoothing_bias";
}

std::string to_csv_row(const DiagnosticsRecord& rec) {
    std::string out;
    out += std::to_string(rec.outer_t);
    out += ',';
    out += std::to_string(rec.inner_k);
    for (double x : {rec.nash_gap, rec.l_v, rec.l_sum, rec.l_pi, rec.l_q, rec.smoothing_bias}) {
        out += ',';
        append_double(out, x);
    }
    return out;
}

std::string to_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out = diagnostics_csv_header();
    out += '\n';
    for (const auto& rec : records) {
        out += to_csv_row(rec);
        out += '\n';
    }
    return out;
}

}  // namespace dsbr
