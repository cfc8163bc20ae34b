// SPDX-License-Identifier: Apache-2.0
//
// ars -- anomalous-reflector link simulation library
//
// Unit-safe scalar types shared by all modules. Powers are carried in dBm
// and gains in dB; conversion to linear units happens only inside formulas.

#pragma once

#include <cmath>
#include <stdexcept>

namespace ars {

inline constexpr double speed_of_light = 299792458.0; // m/s, exact
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

// dB <-> linear conversions, power convention (10 log10).
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin)
{
    if (!(lin > 0.0))
        throw std::domain_error("linear_to_db: input must be positive");
    return 10.0 * std::log10(lin);
}

// Carrier frequency in Hz, always positive.
struct Frequency {
    double hz = 0.0;

    static Frequency from_ghz(double f_ghz) { return Frequency{f_ghz * 1e9}; }
    double ghz() const { return hz * 1e-9; }

    friend bool operator==(Frequency a, Frequency b) { return a.hz == b.hz; }
};

// Free-space wavelength in meters.
inline double wavelength_of(Frequency f)
{
    if (!(f.hz > 0.0))
        throw std::domain_error("wavelength_of: frequency must be positive");
    return speed_of_light / f.hz;
}

// Absolute power level in dBm with a linear counterpart in watts.
struct PowerLevel {
    double dbm = 0.0;

    static PowerLevel from_watts(double w)
    {
        if (w == 0.0) // flagged "no signal" level
            return PowerLevel{-std::numeric_limits<double>::infinity()};
        return PowerLevel{linear_to_db(w) + 30.0};
    }
    double watts() const { return db_to_linear(dbm - 30.0); }
};

// Gain (or loss, stored positive) in dB; may be negative.
struct GainDb {
    double db = 0.0;

    static GainDb from_linear(double g) { return GainDb{linear_to_db(g)}; }
    double linear() const { return db_to_linear(db); }
};

// In-plane angle in degrees measured from the panel surface normal. The
// incidence and observation sides share one sign convention in which the
// shipped reflector's design deflection is +65 degrees.
struct Angle {
    double deg = 0.0;

    double rad() const { return deg2rad(deg); }
    static Angle from_rad(double r) { return Angle{rad2deg(r)}; }
    bool propagating() const { return deg > -90.0 && deg < 90.0; }
};

} // namespace ars
