#pragma once

namespace collapsemap {

/// Physical constants in SI units (CODATA 2018).
struct PhysicalConstants {
    double hbar;      // J s
    double k_B;       // J/K
    double m_p;       // kg, proton
    double m_e;       // kg, electron
    double avogadro;  // 1/mol
};

constexpr PhysicalConstants codata2018() {
    return PhysicalConstants{
        1.054571817e-34,
        1.380649e-23,
        1.67262192369e-27,
        9.1093837015e-31,
        6.02214076e23,
    };
}

constexpr double seconds_per_day = 86400.0;

} // namespace collapsemap
