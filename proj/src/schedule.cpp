#include "dsbr/schedule.hpp"

#include <cmath>
#include <sstream>

#include "dsbr/errors.hpp"

namespace dsbr {

double StepsizeSchedule::alpha_at(long k) const {
    switch (kind) {
        case ScheduleKind::constant:
            return alpha;
        case ScheduleKind::linear:
            return alpha / (static_cast<double>(k) + h);
        case ScheduleKind::polynomial:
            return alpha / std::pow(static_cast<double>(k) + h, z);
    }
    throw ValidationError("unknown schedule kind");
}

void StepsizeSchedule::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("schedule: alpha must be positive and finite");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ValidationError("schedule: ratio c_{alpha,beta} must lie in (0, 1)");
    }
    if (kind == ScheduleKind::constant) {
        if (alpha > 1.0) throw ValidationError("schedule: constant alpha must be <= 1");
        return;
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ValidationError("schedule: h must be positive for decaying stepsizes");
    }
    if (kind == ScheduleKind::polynomial && !(z > 0.0 && z < 1.0)) {
        throw ValidationError("schedule: polynomial exponent z must lie in (0, 1)");
    }
}

std::string StepsizeSchedule::describe() const {
    std::ostringstream os;
    switch (kind) {
        case ScheduleKind::constant:
            os << "alpha_k = " << alpha;
            break;
        case ScheduleKind::linear:
            os << "alpha_k = " << alpha << "/(k+" << h << ")";
            break;
        case ScheduleKind::polynomial:
            os << "alpha_k = " << alpha << "/(k+" << h << ")^" << z;
            break;
    }
    os << ", beta_k = " << ratio << "*alpha_k";
    return os.str();
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant:
            return "constant";
        case ScheduleKind::linear:
            return "linear";
        case ScheduleKind::polynomial:
            return "poly";
    }
    return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "constant") return ScheduleKind::constant;
    if (name == "linear") return ScheduleKind::linear;
    if (name == "poly" || name == "polynomial") return ScheduleKind::polynomial;
    throw ValidationError("unknown schedule kind: \"" + name + "\" (use constant|linear|poly)");
}

}  // namespace dsbr
