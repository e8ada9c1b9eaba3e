#pragma once
// Exact arithmetic aliases and common error/report types.

#include <gmpxx.h>
#include <stdexcept>
#include <string>
#include <vector>

namespace etale {

using Int = mpz_class;
using Rat = mpq_class;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One invariant violation, with a location string ("level 3 / vertex a").
struct Violation {
    std::string where;
    std::string what;
};

using Report = std::vector<Violation>;

inline std::string report_to_string(const Report& r) {
    std::string s;
    for (const auto& v : r) {
        s += v.where;
        s += ": ";
        s += v.what;
        s += '\n';
    }
    return s;
}

} // namespace etale
