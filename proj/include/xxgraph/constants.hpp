#pragma once

#include <array>
#include <numbers>
#include <string_view>

namespace xxgraph {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// "2π × x MHz" -> rad/μs.
constexpr double two_pi_mhz(double mhz) { return kTwoPi * mhz; }

inline constexpr std::string_view kConstantsVersion = "rb87-80s79p-v1";

/// Every physical number used by the Rydberg model. Energies are angular
/// frequencies in rad/μs, lengths in μm, times in μs.
struct PhysicalConstants {
    double c3 = two_pi_mhz(8780.0);            // 2π × 8.780 GHz·μm³
    double c6_up = two_pi_mhz(-4161.55e3);     // 2π × -4161.55 GHz·μm⁶  (80S)
    double c6_down = two_pi_mhz(3452.60e3);    // 2π × 3452.60 GHz·μm⁶   (79P)
    double spacing = 19.3;                     // μm
    double lifetime_up = 569.0;                // μs
    double lifetime_down = 1100.0;             // μs
    double rabi_two_photon = two_pi_mhz(4.0);
    double rabi_mw_a = two_pi_mhz(70.0);
    double rabi_mw_b = two_pi_mhz(200.0);
    double field_noise_sigma = two_pi_mhz(0.5);
    std::array<double, 3> position_sigma_nm{193.5, 193.5, 1242.9};
    double guess_amplitude = two_pi_mhz(1.0);  // B0 for Rydberg guesses

    double decay_rate_up() const { return 1.0 / lifetime_up; }
    double decay_rate_down() const { return 1.0 / lifetime_down; }
};

inline PhysicalConstants default_constants() { return {}; }

}  // namespace xxgraph
