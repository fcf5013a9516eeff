#pragma once

// Slopes s/r in Q ∪ {1/0}: the regions of the trivalent tree dual to the
// Farey triangulation, i.e. isotopy classes of essential simple closed
// curves on the once punctured torus. All arithmetic is checked 64-bit
// integer arithmetic; overflow throws instead of wrapping.

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace markoff {

class overflow_error : public std::runtime_error {
public:
    explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw overflow_error("integer overflow in add");
    return out;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out)) throw overflow_error("integer overflow in sub");
    return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw overflow_error("integer overflow in mul");
    return out;
}

// Reduced fraction s/r, canonical form r > 0, or (1,0) for the slope 1/0.
struct Slope {
    std::int64_t s = 0;  // numerator
    std::int64_t r = 1;  // denominator

    friend bool operator==(const Slope&, const Slope&) = default;
};

// Entries beyond this bound are rejected up front; it keeps every later
// checked add/sub/mul representable and far exceeds any usable tree depth.
inline constexpr std::int64_t kMaxSlopeEntry = std::int64_t(1) << 62;

inline Slope normalize(std::int64_t s, std::int64_t r) {
    if (s == 0 && r == 0) throw std::invalid_argument("slope 0/0 is not a slope");
    if (std::abs(s) > kMaxSlopeEntry || std::abs(r) > kMaxSlopeEntry)
        throw overflow_error("slope entries out of supported range");
    if (r == 0) return {1, 0};
    if (s == 0) return {0, 1};
    std::uint64_t ua = s < 0 ? 0ULL - static_cast<std::uint64_t>(s) : static_cast<std::uint64_t>(s);
    std::uint64_t ub = r < 0 ? 0ULL - static_cast<std::uint64_t>(r) : static_cast<std::uint64_t>(r);
    std::int64_t g = static_cast<std::int64_t>(std::gcd(ua, ub));
    s /= g;
    r /= g;
    if (r < 0) { s = -s; r = -r; }
    return {s, r};
}

inline bool is_canonical(const Slope& x) {
    if (x.s == 0 && x.r == 0) return false;
    Slope n = normalize(x.s, x.r);
    return n == x;
}

// |s·r' − s'·r| = 1, i.e. geometric intersection number one.
inline bool are_neighbors(const Slope& a, const Slope& b) {
    std::int64_t d = checked_sub(checked_mul(a.s, b.r), checked_mul(b.s, a.r));
    return d == 1 || d == -1;
}

// Tri-coloring from parity: 1 ⇔ only r odd, 2 ⇔ only s odd, 3 ⇔ both odd.
enum class ParityClass : int { one = 1, two = 2, three = 3 };

inline ParityClass parity_class(const Slope& x) {
    bool s_odd = (x.s % 2) != 0;
    bool r_odd = (x.r % 2) != 0;
    if (s_odd && r_odd) return ParityClass::three;
    if (s_odd) return ParityClass::two;
    return ParityClass::one;
}

inline int parity_index(const Slope& x) { return static_cast<int>(parity_class(x)); }

// Canonical total order (|s|, r, nonnegative s first): the deterministic
// tie-break used for orbit representatives and edge directions.
inline bool canonical_less(const Slope& a, const Slope& b) {
    std::int64_t aa = std::abs(a.s), ab = std::abs(b.s);
    if (aa != ab) return aa < ab;
    if (a.r != b.r) return a.r < b.r;
    return (a.s >= 0) && (b.s < 0);
}

struct SlopeCanonicalLess {
    bool operator()(const Slope& a, const Slope& b) const { return canonical_less(a, b); }
};

// Circular (boundary) order: slopes are rays (s, r) in the closed upper half
// plane; angle_less orders by angle, cutting the circle at 1/0. Used for the
// chord-separation test that steers tree walks.
inline bool angle_less(const Slope& a, const Slope& b) {
    return checked_sub(checked_mul(a.s, b.r), checked_mul(a.r, b.s)) > 0;
}

// True iff p lies strictly inside the chord arc between a and b that does not
// wrap through the cut point; a, b, p must be distinct canonical slopes.
inline bool inside_arc(const Slope& a, const Slope& b, const Slope& p) {
    const Slope& lo = angle_less(a, b) ? a : b;
    const Slope& hi = angle_less(a, b) ? b : a;
    return angle_less(lo, p) && angle_less(p, hi);
}

// True iff p and q are on the same side of the Farey edge {a, b}.
inline bool same_side(const Slope& a, const Slope& b, const Slope& p, const Slope& q) {
    return inside_arc(a, b, p) == inside_arc(a, b, q);
}

struct SlopeHash {
    std::size_t operator()(const Slope& x) const {
        std::uint64_t h = static_cast<std::uint64_t>(x.s) * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::uint64_t>(x.r) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

inline std::string to_string(const Slope& x) {
    return std::to_string(x.s) + "/" + std::to_string(x.r);
}

inline Slope parse_slope(std::string_view text) {
    auto pos = text.find('/');
    if (pos == std::string_view::npos) throw std::invalid_argument("slope must look like s/r");
    std::size_t used_s = 0, used_r = 0;
    std::string num(text.substr(0, pos)), den(text.substr(pos + 1));
    std::int64_t s = std::stoll(num, &used_s);
    std::int64_t r = std::stoll(den, &used_r);
    if (used_s != num.size() || used_r != den.size())
        throw std::invalid_argument("trailing characters in slope literal");
    return normalize(s, r);
}

}  // namespace markoff
