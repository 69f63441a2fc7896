#include "dnls/random_fields.hpp"

#include <cmath>
#include <random>

namespace dnls {

namespace {

struct Bump {
    double center, width, wavenumber;
    cplx amplitude;
};

std::vector<Bump> draw_bumps(std::uint64_t seed, int bumps)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> center(-5.0, 5.0);
    std::uniform_real_distribution<double> width(0.6, 2.0);
    std::uniform_real_distribution<double> wave(-1.5, 1.5);
    std::normal_distribution<double> amp(0.0, 1.0);
    std::vector<Bump> out;
    for (int j = 0; j < bumps; ++j) {
        Bump b{};
        b.center = center(rng);
        b.width = width(rng);
        b.wavenumber = wave(rng);
        const double re = amp(rng);
        const double im = amp(rng);
        b.amplitude = {re, im};
        out.push_back(b);
    }
    return out;
}

} // namespace

ComplexField random_smooth_field(const Grid& grid, std::uint64_t seed, int bumps)
{
    const auto params = draw_bumps(seed, bumps);
    ComplexField out(grid);
    for (std::size_t k = 0; k < grid.n(); ++k) {
        const double x = grid.x(k);
        cplx v{};
        for (const auto& b : params) {
            const double z = (x - b.center) / b.width;
            v += b.amplitude * std::exp(-0.5 * z * z) * std::polar(1.0, b.wavenumber * x);
        }
        out[k] = v;
    }
    return out;
}

RealField random_smooth_real_field(const Grid& grid, std::uint64_t seed, int bumps)
{
    return real_part(random_smooth_field(grid, seed, bumps));
}

} // namespace dnls
