#pragma once
// The main construction: split a base diagram to make room for a torsion
// summand, then build the recursive recipe whose fitting homeomorphism
// enforces "r_l cylinders at the original vertex ~ r_l cylinders at the
// copy" at every level. Carries the homomorphism data: alpha through the
// shadow map, beta through torsion labels on end vertices.

#include "etale/bratteli.hpp"
#include "etale/recipe.hpp"
#include "etale/shadow.hpp"
#include "etale/splitting.hpp"

#include <map>

namespace etale {

/// r_1, r_2, ... with r_0 := 1. Explicit head, then geometric continuation.
struct RSequence {
    std::vector<Int> prefix;
    Int ratio = 1;

    Int r(int level) const;
    Int d(int level) const { return r(level) / r(std::max(0, level - 1)); }
    // levels from which r stays constant, or -1 if it never does
    int constant_from() const { return ratio == 1 ? std::max(1, int(prefix.size())) : -1; }
    Report validate() const;
};

enum class BuildMode { Strict, R2Relaxed };

struct ConstructionConfig {
    DiagramPtr base;
    RSequence r;
    std::string split_vertex; // empty: last vertex of each level
    std::string seed_source;  // empty: last vertex of the first level
    BuildMode mode = BuildMode::Strict;
    unsigned rng_seed = 0;    // 0: canonical lexicographic choices
    int depth = 8;
};

Report validate_inputs(const ConstructionConfig& c);

/// An element of E/Z: a reduced fraction mod 1.
class TorsionLabel {
public:
    TorsionLabel() : v_(0) {}
    static TorsionLabel fraction(const Int& num, const Int& den);
    const Rat& value() const { return v_; }
    Int numerator() const { return v_.get_num(); }
    Int denominator() const { return v_.get_den(); }
    bool is_zero() const { return v_ == 0; }
    TorsionLabel operator+(const TorsionLabel& o) const;
    TorsionLabel operator*(const Int& k) const;
    bool operator==(const TorsionLabel&) const = default;
    std::string to_string() const;

private:
    Rat v_; // canonical representative in [0,1)
};

struct LevelData {
    std::string wa, wb;
    std::vector<std::string> ma_labels; // wa^l -> wb^{l+1}
    std::vector<std::string> mb_labels; // wb^l -> wa^{l+1} (children's B side)
};

struct Bundle {
    ConstructionConfig config;
    DiagramPtr base;   // D
    DiagramPtr split;  // C
    std::shared_ptr<ShadowMap> shadow;
    RecipePtr recipe;
    std::vector<FinitePath> seeds_a, seeds_b; // root seeds
    std::map<int, LevelData> levels;

    Int r(int level) const { return config.r.r(level); }
    Int d(int level) const { return config.r.d(level); }
    const std::string& wa(int level) const;
    const std::string& wb(int level) const;
    int depth() const { return config.depth; }
    // constrained prefix-length guarantee: N_l = l - offset (clamped at 0)
    int constrained_offset() const { return config.mode == BuildMode::Strict ? 1 : 2; }
    NSequence n_sequence() const;
};

Bundle build(const ConstructionConfig& config);

TorsionLabel beta_vertex(const Bundle& b, int level, const std::string& vertex);
TorsionLabel beta_of(const Bundle& b, const FinitePath& path);
TorsionLabel beta_of(const Bundle& b, const std::vector<FinitePath>& formal_sum);

/// Basis vector e_{T(end)} in Z^{V_l(D)} at the path's end level.
std::vector<Int> alpha_of(const Bundle& b, const FinitePath& path);
std::vector<Int> alpha_of(const Bundle& b, const std::vector<FinitePath>& formal_sum, int level);

/// beta(w) = sum of beta over one-edge extensions, for every vertex up to
/// depth (the decomposition identity, checked per end vertex).
CheckResult beta_consistency_check(const Bundle& b, int depth);

/// Exchange relation imposed by a level-l descendant: multiset of A' end
/// vertices minus multiset of B' end vertices, as a vector over V_l(C).
std::vector<Int> relation_vector(const Bundle& b, int level);
std::vector<std::vector<Int>> relation_vectors(const Bundle& b, int up_to_level);

/// All same-level descendants must impose the same vector up to sign.
CheckResult relation_vectors_consistent(const Bundle& b, int depth);

/// For every child of every descendant, the shadow images of the two sides
/// end at the same vertices with the same multiplicities (the hypothesis
/// making alpha well defined).
CheckResult shadow_relation_check(const RecipePtr& root, const ShadowMap& t, int depth);
CheckResult shadow_relation_check(const Bundle& b, int depth);

/// Machine check of the fit clauses on the expanded tree: tail pairs copy
/// exactly, child inputs land in the child's B side, both directions.
CheckResult check_fits(const RecipePtr& root, int depth, int suffix_len);

} // namespace etale
