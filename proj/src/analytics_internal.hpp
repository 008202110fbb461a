#pragma once

#include <sstream>
#include <string>

#include "bcross/barriers.hpp"
#include "bcross/image_measure.hpp"

namespace bcross::detail {

/// N(-f(T)/sqrt T) + U(f(T), 0; m) without re-checking the images condition.
double images_crossing_value(const BarrierSpec& spec, const ImageMeasure& m, double horizon);

/// 12 significant digits, for condition reports.
inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

void require_open_interval(double t, double horizon, const char* what);

}  // namespace bcross::detail
