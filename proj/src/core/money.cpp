#include "taskchain/core/money.hpp"

#include <cmath>
#include <cstdlib>

namespace taskchain {

Usd Usd::from_dollars(double dollars) {
    return Usd(static_cast<std::int64_t>(std::llround(dollars * 1e12)));
}

std::string Usd::to_string(int decimals) const {
    if (decimals < 0) decimals = 0;
    if (decimals > 12) decimals = 12;
    std::int64_t scale = 1;
    for (int i = decimals; i < 12; ++i) scale *= 10;
    // Round half away from zero at the requested precision.
    std::int64_t magnitude = std::llabs(pico_);
    std::int64_t scaled = (magnitude + scale / 2) / scale;
    std::int64_t unit = 1;
    for (int i = 0; i < decimals; ++i) unit *= 10;
    std::string out = pico_ < 0 ? "-" : "";
    out += std::to_string(scaled / unit);
    if (decimals > 0) {
        std::string frac = std::to_string(scaled % unit);
        out += '.';
        out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
        out += frac;
    }
    return out;
}

}  // namespace taskchain
