#pragma once

#include <numbers>

// CODATA 2018 exact SI values unless noted.
namespace scq::constants {

inline constexpr double pi = std::numbers::pi;

inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;             // J s
inline constexpr double hbar = planck / (2.0 * pi);          // J s
inline constexpr double boltzmann = 1.380649e-23;            // J / K
inline constexpr double boltzmann_ev = boltzmann / elementary_charge; // eV / K
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge); // Wb
inline constexpr double mu0 = 1.25663706212e-6;              // H / m (measured)

/// BCS weak-coupling ratio Delta0 / (k_B Tc).
inline constexpr double bcs_gap_ratio = 1.76;

/// Bulk niobium transition temperature used as the film reference.
inline constexpr double niobium_bulk_tc = 9.3; // K

} // namespace scq::constants

namespace scq::units {

/// Energy conversion between electron-volts and joules.
[[nodiscard]] constexpr double ev_to_joule(double ev) { return ev * constants::elementary_charge; }
[[nodiscard]] constexpr double joule_to_ev(double joule) { return joule / constants::elementary_charge; }

/// Frequency (Hz) of a photon with the given energy in eV, and back.
[[nodiscard]] constexpr double ev_to_hz(double ev) { return ev_to_joule(ev) / constants::planck; }
[[nodiscard]] constexpr double hz_to_ev(double hz) { return joule_to_ev(hz * constants::planck); }

} // namespace scq::units
