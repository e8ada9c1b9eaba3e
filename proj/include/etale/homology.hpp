#pragma once
// Exact integer linear algebra: Smith normal form with transform matrices,
// finitely generated abelian groups as canonical invariant-factor data, and
// the finite-level homology computations built on them.

#include "etale/bratteli.hpp"
#include "etale/construction.hpp"
#include "etale/matrix.hpp"

namespace etale {

/// U * M * V = D with U, V unimodular and D diagonal, diagonal entries
/// nonnegative and forming a divisibility chain.
struct SnfResult {
    Mat d;
    Mat u;
    Mat v;
    std::vector<Int> diagonal() const;
};

SnfResult snf(const Mat& m);

/// Free rank plus invariant factors d1 | d2 | ... with every di >= 2.
struct FgAbelianGroup {
    int free_rank = 0;
    std::vector<Int> factors;
    bool operator==(const FgAbelianGroup&) const = default;
    std::string to_string() const;
};

/// Z^n modulo the span of the given relation vectors.
FgAbelianGroup group_from_presentation(int n, const std::vector<std::vector<Int>>& relations);

/// Is v in the integer column span of m? Exact, via SNF.
bool in_lattice(const std::vector<Int>& v, const Mat& m);

/// Order of v in Z^n / colspan(m); 0 means infinite order.
Int element_order(const std::vector<Int>& v, const Mat& m);

/// Tail equivalence at level L: the group is free on the level-L vertices
/// and the connecting map into level L+1 is the incidence matrix.
struct TailApprox {
    FgAbelianGroup group;
    Mat connecting; // level L -> L+1
};

TailApprox h0_tail_approx(const BratteliDiagram& d, int level);

/// Image of a level-l vector at level L under the incidence products.
std::vector<Int> pushforward(const BratteliDiagram& d, std::vector<Int> v, int from_level, int to_level);

/// Finite-level homology of the augmented relation: Z^{V_L(C)} modulo the
/// pushed-forward exchange relations of all levels <= L.
FgAbelianGroup h0_R_approx(const Bundle& b, int level);

struct StabilizationRow {
    int level = 0;
    FgAbelianGroup group;
    bool torsion_is_rl = false;        // invariant factors == [r_L]
    bool torsion_map_injective = false; // pushed torsion generator keeps order r_L
    bool torsion_map_is_mult_d = false; // and equals d_{L+1} times the next generator
};

struct StabilizationReport {
    bool aborted = false;
    std::string abort_reason;
    std::vector<StabilizationRow> rows;
    bool all_match = false;
};

StabilizationReport stabilization_report(const Bundle& b, int max_level);

struct IsoCheck {
    bool pass = false;
    bool relations_killed = false;
    bool surjective = false;
    bool groups_match = false;
    FgAbelianGroup lhs; // h0_R_approx
    FgAbelianGroup rhs; // Z^{V_L(D)} (+) Z/r_L
};

/// Builds e_v -> (alpha(v), beta(v)) on level-L generators and decides
/// whether it induces an isomorphism from the finite-level homology onto
/// Z^{V_L(D)} (+) Z/r_L. Surjectivity plus equal invariants suffices:
/// finitely generated abelian groups are Hopfian.
IsoCheck verify_iso_finite_level(const Bundle& b, int level);
IsoCheck verify_iso_finite_level(const Bundle& b, int level, const Int& beta_denominator);

} // namespace etale
