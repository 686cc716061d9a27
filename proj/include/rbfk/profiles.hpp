#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "rbfk/chebyshev.hpp"
#include "rbfk/errors.hpp"

namespace rbfk {

// exp(-z / h^2); entire, so ellipse parameters are chosen automatically.
inline RadialProfile gaussian_profile(double h, double diameter) {
    if (!(h > 0.0)) throw constraint_error("gaussian_profile: bandwidth must be positive");
    if (!(diameter > 0.0)) throw constraint_error("gaussian_profile: diameter must be positive");
    RadialProfile p;
    p.name = "gaussian";
    p.bandwidth = h;
    p.diameter = diameter;
    const double ih2 = 1.0 / (h * h);
    p.f = [ih2](double z) { return std::exp(-z * ih2); };
    p.fc = [ih2](std::complex<double> z) { return std::exp(-z * ih2); };
    return p;
}

// 1 / (1 + z / h^2); pole at z = -h^2 limits the admissible ellipse.
inline RadialProfile cauchy_profile(double h, double diameter) {
    if (!(h > 0.0)) throw constraint_error("cauchy_profile: bandwidth must be positive");
    if (!(diameter > 0.0)) throw constraint_error("cauchy_profile: diameter must be positive");
    RadialProfile p;
    p.name = "cauchy";
    p.bandwidth = h;
    p.diameter = diameter;
    const double ih2 = 1.0 / (h * h);
    p.f = [ih2](double z) { return 1.0 / (1.0 + z * ih2); };
    p.fc = [ih2](std::complex<double> z) { return 1.0 / (1.0 + z * ih2); };
    return p;
}

inline RadialProfile profile_by_name(const std::string& name, double h, double diameter) {
    if (name == "gaussian") return gaussian_profile(h, diameter);
    if (name == "cauchy") return cauchy_profile(h, diameter);
    throw constraint_error("unknown profile: " + name);
}

}  // namespace rbfk
