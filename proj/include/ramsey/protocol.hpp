#ifndef RAMSEY_PROTOCOL_HPP
#define RAMSEY_PROTOCOL_HPP

namespace ramsey {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Timing and phase parameters of the periodically repeated Ramsey cycle.
// Times are in units of t_R by default (t_R = 1, t_cyc/t_R = 3).
struct RamseyProtocol {
    double t_R = 1.0;
    double t_cyc = 3.0;
    double phi_R = kPi / 4.0;
    double t_R_over_T2 = 0.0;

    void validate() const;
};

// p(theta) = 1/2 [1 + e^{-t_R/T2} cos(phi_R + theta)]
double ramsey_probability(double theta, const RamseyProtocol& protocol);

} // namespace ramsey

#endif
