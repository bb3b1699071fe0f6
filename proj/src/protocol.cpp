#include "ramsey/protocol.hpp"

#include <cmath>

#include "ramsey/errors.hpp"

namespace ramsey {

void RamseyProtocol::validate() const {
    if (!(t_R > 0.0)) throw config_error("protocol: t_R must be > 0");
    if (!(t_cyc > t_R)) throw config_error("protocol: t_cyc must be > t_R");
    if (!(t_R_over_T2 >= 0.0)) throw config_error("protocol: t_R/T2 must be >= 0");
    if (!std::isfinite(phi_R)) throw config_error("protocol: phi_R must be finite");
}

double ramsey_probability(double theta, const RamseyProtocol& protocol) {
    return 0.5 * (1.0 + std::exp(-protocol.t_R_over_T2) *
                            std::cos(protocol.phi_R + theta));
}

} // namespace ramsey
