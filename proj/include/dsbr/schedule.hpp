#pragma once

#include <string>

namespace dsbr {

enum class ScheduleKind { constant, linear, polynomial };

// Stepsize family alpha_k = alpha (constant), alpha/(k+h) (linear), or
// alpha/(k+h)^z (polynomial), with the policy stepsize tied to it on a single
// timescale: beta_k = ratio * alpha_k, ratio in (0, 1).
struct StepsizeSchedule {
    ScheduleKind kind = ScheduleKind::constant;
    double alpha = 0.1;
    double h = 1.0;      // offset, decaying kinds only
    double z = 0.5;      // exponent, polynomial only
    double ratio = 0.5;  // c_{alpha,beta}

    double alpha_at(long k) const;
    double beta_at(long k) const { return ratio * alpha_at(k); }

    // Structural checks that do not depend on any unspecified constant:
    // alpha > 0, ratio in (0,1), h > 0 for decaying kinds, z in (0,1), and
    // alpha <= 1 for the constant kind (a constant step above 1 overshoots
    // the q target and can leave the policy simplex).
    void validate() const;

    std::string describe() const;
};

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

}  // namespace dsbr
