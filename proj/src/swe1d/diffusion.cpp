#include "swe1d/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace swe {

double Diffusion::sigma(double x) const {
    switch (kind) {
        case Kind::Constant: return k;
        case Kind::Sin2: return 2.0 + std::sin(x);
        case Kind::Sqrt1p: return std::sqrt(1.0 + x * x);
    }
    return k;
}

double Diffusion::sigma_prime(double x) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Sin2: return std::cos(x);
        case Kind::Sqrt1p: return x / std::sqrt(1.0 + x * x);
    }
    return 0.0;
}

double Diffusion::sigma_second(double x) const {
    switch (kind) {
        case Kind::Constant: return 0.0;
        case Kind::Sin2: return -std::sin(x);
        case Kind::Sqrt1p: return std::pow(1.0 + x * x, -1.5);
    }
    return 0.0;
}

Diffusion Diffusion::constant(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("Diffusion: constant level must be positive");
    Diffusion d;
    d.kind = Kind::Constant;
    d.k = k;
    d.lower_bound = k;
    d.lipschitz = 0.0;
    d.name = "const:" + std::to_string(k);
    return d;
}

Diffusion Diffusion::sin2() {
    Diffusion d;
    d.kind = Kind::Sin2;
    d.lower_bound = 1.0;
    d.lipschitz = 1.0;
    d.name = "sin2";
    return d;
}

Diffusion Diffusion::sqrt1p() {
    Diffusion d;
    d.kind = Kind::Sqrt1p;
    d.lower_bound = 1.0;
    d.lipschitz = 1.0;
    d.name = "sqrt1p";
    return d;
}

Diffusion Diffusion::parse(const std::string& spec) {
    if (spec == "sin2") return sin2();
    if (spec == "sqrt1p") return sqrt1p();
    if (spec.rfind("const:", 0) == 0) return constant(std::stod(spec.substr(6)));
    throw std::invalid_argument("Diffusion::parse: unknown diffusion '" + spec + "'");
}

bool Diffusion::check_hypothesis(long grid_points) const {
    for (long i = 0; i < grid_points; ++i) {
        const double x = -50.0 + 100.0 * static_cast<double>(i) / (grid_points - 1);
        if (sigma(x) < lower_bound - 1e-12) return false;
        if (std::abs(sigma_prime(x)) > lipschitz + 1e-12) return false;
        if (std::abs(sigma_second(x)) > lipschitz + 1e-12) return false;
    }
    return true;
}

}  // namespace swe
