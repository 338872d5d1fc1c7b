// Estimates H from fBm realizations via the wavelet energy slope.
#include <cstdio>

#include "wavescale/descriptors.hpp"
#include "wavescale/synth.hpp"

int main() {
    using namespace wavescale;
    const auto f = filter_from_id("haar");
    std::printf("%6s %8s %8s\n", "H", "slope", "H_hat");
    for (double h : {0.2, 0.4, 0.6, 0.8}) {
        double sum = 0.0;
        constexpr int reps = 20;
        for (int s = 0; s < reps; ++s) {
            const auto x = gen_fbm({h, 4096, static_cast<std::uint64_t>(s)});
            sum += fit_spectrum_slope(wavelet_spectrum(dwt(x, f, 1)), 4, 9).slope;
        }
        const double slope = sum / reps;
        std::printf("%6.2f %8.3f %8.3f\n", h, slope, hurst_from_slope(slope));
    }
}
