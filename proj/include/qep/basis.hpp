// Truncated oscillator ⊗ spin product basis

#pragma once

#include <compare>
#include <cstddef>
#include <ostream>
#include <string>

#include "qep/errors.hpp"

namespace qep {

/// Spin index 0 is s = -1/2, index 1 is s = +1/2.
enum class Spin : int { down = 0, up = 1 };

inline Spin flipped(Spin s) { return s == Spin::down ? Spin::up : Spin::down; }
inline int spin_index(Spin s) { return static_cast<int>(s); }
inline const char* spin_name(Spin s) { return s == Spin::down ? "-1/2" : "+1/2"; }

/// Product-state label |n, s>.
struct StateLabel {
    int n{0};
    Spin s{Spin::down};

    auto operator<=>(const StateLabel&) const = default;
};

inline std::string to_string(const StateLabel& l) {
    return "(" + std::to_string(l.n) + "," + spin_name(l.s) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const StateLabel& l) { return os << to_string(l); }

inline constexpr int min_n_max = 4;

/// Oscillator levels 0..n_max, each paired with both spin states.
/// Basis index = 2n + spin_index.
class TruncatedBasis {
public:
    explicit TruncatedBasis(int n_max = 200) : n_max_(n_max) {
        if (n_max < min_n_max) {
            throw ConfigError("n_max must be at least " + std::to_string(min_n_max));
        }
    }

    [[nodiscard]] int n_max() const { return n_max_; }
    [[nodiscard]] int oscillator_dim() const { return n_max_ + 1; }
    [[nodiscard]] int dim() const { return 2 * (n_max_ + 1); }

    [[nodiscard]] bool contains(const StateLabel& l) const { return l.n >= 0 && l.n <= n_max_; }

    [[nodiscard]] int index(const StateLabel& l) const {
        if (!contains(l)) throw TruncationError("state " + to_string(l) + " is outside the basis");
        return 2 * l.n + spin_index(l.s);
    }

    [[nodiscard]] StateLabel label(int idx) const {
        return {idx / 2, idx % 2 == 0 ? Spin::down : Spin::up};
    }

    bool operator==(const TruncatedBasis&) const = default;

private:
    int n_max_;
};

}  // namespace qep
