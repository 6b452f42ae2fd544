#include "wavres/noise.hpp"

#include <cmath>

#include "wavres/rng.hpp"

namespace wavres {

Sinogram inject_low_dose_noise(const Sinogram& sino, double incident_photons,
                               std::uint64_t seed) {
    if (incident_photons <= 0.0)
        throw ParameterError("inject_low_dose_noise: incident photon count must be > 0");
    for (double p : sino.data)
        if (p < 0.0) throw DomainError("inject_low_dose_noise: negative sinogram entry");

    Sinogram out = sino;
    const std::size_t n = sino.data.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        const double mean = incident_photons * std::exp(-sino.data[i]);
        const std::uint64_t counted = rng.poisson(mean);
        const double floored = counted < 1 ? 1.0 : static_cast<double>(counted);
        out.data[i] = -std::log(floored / incident_photons);
    }
    return out;
}

}  // namespace wavres
