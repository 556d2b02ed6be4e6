#pragma once

#include <cmath>
#include <optional>

#include "gapcover/errors.hpp"

namespace gapcover {

struct MeritRecord {
    double simple = 0.0;
    std::optional<double> rankin;   // undefined unless log4 X > 0
    bool operator==(const MeritRecord&) const = default;
};

/// Gap quality, from the logarithm of the endpoint X (which may exceed
/// double range, hence log-domain input).  The simple merit is gap / log X.
/// The normalized variant divides by log X log2 X log4 X / (log3 X)^2 and
/// is only defined once log4 X > 0, i.e. X > e^e^e ~ 3.81e6.
inline MeritRecord merit(double gap, double log_x_value) {
    if (!(log_x_value > 1.0)) throw ParameterError("merit: X must exceed e");
    MeritRecord r;
    r.simple = gap / log_x_value;
    const double l2 = std::log(log_x_value);
    if (l2 > 1.0) {
        const double l3 = std::log(l2);
        if (l3 > 0.0) {
            const double l4 = std::log(l3);
            if (l4 > 0.0) r.rankin = gap * l3 * l3 / (log_x_value * l2 * l4);
        }
    }
    return r;
}

} // namespace gapcover
