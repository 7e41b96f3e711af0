#pragma once

#include <cstdint>
#include <string>

namespace taskchain {

// Dollar amount held as an integer count of pico-dollars (1e-12 USD).
// A price quoted per million tokens with micro-dollar resolution times an
// integer token count lands exactly on this grid, so sums never round.
class Usd {
public:
    constexpr Usd() = default;
    static constexpr Usd from_pico(std::int64_t pico) { return Usd(pico); }
    // Rounds to the nearest pico-dollar.
    static Usd from_dollars(double dollars);

    constexpr std::int64_t pico() const noexcept { return pico_; }
    double dollars() const noexcept { return static_cast<double>(pico_) / 1e12; }

    constexpr Usd& operator+=(Usd other) noexcept {
        pico_ += other.pico_;
        return *this;
    }
    friend constexpr Usd operator+(Usd a, Usd b) noexcept { return Usd(a.pico_ + b.pico_); }
    friend constexpr bool operator==(Usd, Usd) = default;
    friend constexpr auto operator<=>(Usd, Usd) = default;

    // Fixed six decimals, e.g. "0.011380".
    std::string to_string(int decimals = 6) const;

private:
    constexpr explicit Usd(std::int64_t pico) : pico_(pico) {}
    std::int64_t pico_ = 0;
};

}  // namespace taskchain
