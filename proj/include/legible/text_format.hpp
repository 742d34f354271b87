#pragma once

#include <cstdio>
#include <string>

namespace legible {

/// Shortest decimal form that parses back to the same double.
inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double check = 0.0;
    std::sscanf(buf, "%lf", &check);
    for (int prec = 1; prec < 17; ++prec) {
        char probe[64];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        std::sscanf(probe, "%lf", &check);
        if (check == v) return probe;
    }
    return buf;
}

inline std::string fmt_fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

} // namespace legible
