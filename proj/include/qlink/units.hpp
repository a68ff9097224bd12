#pragma once

#include <cmath>
#include <stdexcept>

namespace qlink {

// Exact speed of light in nm*THz (equivalently um*GHz * 1e3).
inline constexpr double kSpeedOfLightNmThz = 299792.458;

inline double frequency_thz(double wavelength_nm) {
    if (!(wavelength_nm > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    return kSpeedOfLightNmThz / wavelength_nm;
}

inline double wavelength_nm(double frequency_thz) {
    if (!(frequency_thz > 0.0))
        throw std::invalid_argument("frequency must be positive");
    return kSpeedOfLightNmThz / frequency_thz;
}

// Bandwidth in wavelength units around a carrier, expressed in frequency.
// df = c * dl / l^2, result in GHz for dl in nm.
inline double bandwidth_ghz_from_nm(double delta_lambda_nm, double carrier_nm) {
    return kSpeedOfLightNmThz * 1e3 * delta_lambda_nm / (carrier_nm * carrier_nm);
}

inline double db_to_transmission(double loss_db) {
    return std::pow(10.0, -loss_db / 10.0);
}

} // namespace qlink
