#pragma once

#include <string>
#include <vector>

namespace dsbr {

// One diagnostics checkpoint. Serializes to a single CSV row with the fixed
// column order: outer_t, inner_k, nash_gap, l_v, l_sum, l_pi, l_q,
// smoothing_bias. A smoothing_bias of NaN means the bias involves a constant
// that was not supplied and is therefore reported symbolically elsewhere.
struct DiagnosticsRecord {
    long outer_t = 0;
    long inner_k = 0;
    double nash_gap = 0.0;
    double l_v = 0.0;
    double l_sum = 0.0;
    double l_pi = 0.0;
    double l_q = 0.0;
    double smoothing_bias = 0.0;
};

std::string diagnostics_csv_header();
std::string to_csv_row(const DiagnosticsRecord& rec);
std::string to_csv(const std::vector<DiagnosticsRecord>& records);

}  // namespace dsbr
