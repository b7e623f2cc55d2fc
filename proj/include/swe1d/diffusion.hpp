#pragma once

#include <string>

namespace swe {

/// Diffusion coefficient sigma with its derivatives and hypothesis data:
/// sigma >= lower_bound > 0, |sigma'|, |sigma''| <= lipschitz.
struct Diffusion {
    enum class Kind { Constant, Sin2, Sqrt1p };

    Kind kind = Kind::Constant;
    double k = 1.0;  // value for Kind::Constant
    double lower_bound = 1.0;
    double lipschitz = 0.0;
    std::string name = "const:1";

    double sigma(double x) const;
    double sigma_prime(double x) const;
    double sigma_second(double x) const;

    bool additive() const { return kind == Kind::Constant; }

    static Diffusion constant(double k);
    static Diffusion sin2();     // 2 + sin(x)
    static Diffusion sqrt1p();   // sqrt(1 + x^2)

    /// "const:<k>", "sin2" or "sqrt1p"
    static Diffusion parse(const std::string& spec);

    /// Spot-check of the hypothesis bounds on a dense grid over [-50, 50].
    bool check_hypothesis(long grid_points = 10000) const;
};

}  // namespace swe
