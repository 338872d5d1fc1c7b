// Prints the empirical and closed-form f(alpha) of a binomial cascade.
#include <cstdio>

#include "wavescale/descriptors.hpp"
#include "wavescale/synth.hpp"

int main(int argc, char** argv) {
    using namespace wavescale;
    const double m0 = argc > 1 ? std::atof(argv[1]) : 0.6;
    const auto x = gen_cascade({m0, 12, 1});
    MultifractalOptions mc;
    const auto emp = multifractal_spectrum(dwt(x, filter_from_id("haar"), 1), JRange{4, 9}, mc);
    const auto th = cascade_theoretical_spectrum(m0, emp.grid);
    std::printf("%7s %9s %9s %9s %9s\n", "q", "alpha", "f", "alpha_th", "f_th");
    for (std::size_t i = 0; i < emp.alpha.size(); i += 4) {
        std::printf("%7.2f %9.4f %9.4f %9.4f %9.4f\n", emp.grid[i], emp.alpha[i], emp.f_alpha[i], th.alpha[i],
                    th.f_alpha[i]);
    }
    std::printf("B(-0.2): empirical %.4f, closed form %.4f\n", broadness_and_cuts(emp, -0.2).broadness,
                broadness_and_cuts(th, -0.2).broadness);
}
