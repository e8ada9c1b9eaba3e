#pragma once
// Flip criteria on the type semigroup level. The group-level test decides
// whether the coordinate swap acts as the identity on G (x) G for a
// finitely generated G; the rational-family test mechanizes the normal-form
// argument available when the free part is a non-cyclic subgroup of Q whose
// localization absorbs every torsion denominator.

#include "etale/construction.hpp"
#include "etale/homology.hpp"

#include <optional>

namespace etale {

struct FlipFgResult {
    bool pass = false;
    // orders of the offending cyclic factors (0 = a free factor)
    std::optional<std::pair<Int, Int>> offending;
};

/// Flip on G (x) G is the identity iff the cyclic factor orders are
/// pairwise coprime (gcd(0, d) := d).
FlipFgResult flip_check_fg(const FgAbelianGroup& g);

struct RationalFamilyParams {
    std::vector<Int> d_primes;   // primes inverted in D; nonempty (non-cyclic)
    std::vector<Int> e_primes;   // primes allowed in torsion denominators
    std::vector<int> e_caps;     // exponent caps per prime; -1 = unbounded

    Report validate() const;     // includes the divisibility hypothesis
    bool denominator_allowed_d(const Int& den) const;
    bool denominator_allowed_e(const Int& den) const;
};

struct SemigroupElement {
    Rat d;          // nonnegative, denominator invertible in D
    TorsionLabel t; // element of E/Z
    bool is_zero() const { return d == 0 && t.is_zero(); }
};

Report validate_element(const RationalFamilyParams& p, const SemigroupElement& x);

struct FamilyFlipResult {
    bool pass = false;
    std::vector<std::string> trace;
};

/// Replays the decomposition x = (a/s, 0) + p (c, 1/r), y = (b/s, 0) +
/// q (c, 1/r): cross terms vanish by r-divisibility of D, the diagonal
/// terms are symmetric, hence x (x) y = y (x) x.
FamilyFlipResult flip_check_rational_family(const SemigroupElement& x, const SemigroupElement& y,
                                            const RationalFamilyParams& params);

struct RectangleFlipResult {
    bool family_applicable = false;
    bool family_pass = false;
    std::vector<std::string> family_trace;
    std::optional<SemigroupElement> class_a, class_b;
    FlipFgResult group_level;
    std::string note;
};

/// Classes of two unions of level-L cylinders under (alpha, beta), fed to
/// the family criterion (one-vertex bases only), with the group-level
/// finite approximation reported alongside. The two may disagree: the
/// divisibility used by the family argument only holds in the limit.
RectangleFlipResult rectangle_flip_class_check(const Bundle& b, int level,
                                               const std::vector<FinitePath>& a_cyls,
                                               const std::vector<FinitePath>& b_cyls);

} // namespace etale
