#include "swe1d/hot.hpp"

#include <cmath>

namespace swe::hot {

void leapfrog_row_sin2(const double* um, const double* uc, const double* w, double* un,
                       std::size_t nx) {
    for (std::size_t j = 1; j + 1 < nx; ++j)
        un[j] = uc[j - 1] + uc[j + 1] - um[j] + (2.0 + std::sin(uc[j])) * w[j];
}

void leapfrog_row_const(double k, const double* um, const double* uc, const double* w, double* un,
                        std::size_t nx) {
    for (std::size_t j = 1; j + 1 < nx; ++j)
        un[j] = uc[j - 1] + uc[j + 1] - um[j] + k * w[j];
}

void leapfrog_row_sqrt1p(const double* um, const double* uc, const double* w, double* un,
                         std::size_t nx) {
    for (std::size_t j = 1; j + 1 < nx; ++j)
        un[j] = uc[j - 1] + uc[j + 1] - um[j] + std::sqrt(1.0 + uc[j] * uc[j]) * w[j];
}

void box_muller(const double* u1, const double* u2, double* out, std::size_t pairs) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < pairs; ++i) {
        const double r = std::sqrt(-2.0 * std::log(u1[i]));
        const double a = two_pi * u2[i];
        out[2 * i] = r * std::cos(a);
        out[2 * i + 1] = r * std::sin(a);
    }
}

void scale_into_complex(const double* normals, const double* scale, double* dst_reim,
                        std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        dst_reim[2 * k] = scale[k] * normals[2 * k];
        dst_reim[2 * k + 1] = scale[k] * normals[2 * k + 1];
    }
}

}  // namespace swe::hot
