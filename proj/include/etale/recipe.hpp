#pragma once
// Recursive recipes for path space homeomorphisms.
//
// A recipe node is a pair of path sets (A, B) at a common level together
// with a rule for one more level: tail pairs (w_i, z_i) — the map copies the
// tail verbatim there — and children (A_i, B_i), carrying sub-recipes. The
// extensions AE of A by one edge must be exactly the disjoint union of the
// w_i and the A_i (same on the B side). Recipes are infinite; nodes expand
// on demand through a generator and memoize the result, so repeated
// expansion is observably pure.

#include "etale/bratteli.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>

namespace etale {

class RecipeNode;
using RecipePtr = std::shared_ptr<const RecipeNode>;

struct PathPair {
    FinitePath w; // domain side
    FinitePath z; // range side, same end vertex
    auto operator<=>(const PathPair&) const = default;
};

struct RecipeStep {
    std::vector<PathPair> pairs;
    std::vector<RecipePtr> children;
};

// Nodes created by a level-uniform generator over a stationary stretch of
// the diagram carry a key; equal keys mean the subtrees are isomorphic up
// to a level shift. Used for cycle detection on eventually periodic points.
struct UniformityKey {
    std::string tag;
    std::string a_end; // end vertex of the A side
    std::string b_end;
    bool operator==(const UniformityKey&) const = default;
    auto operator<=>(const UniformityKey&) const = default;
};

class RecipeNode : public std::enable_shared_from_this<RecipeNode> {
public:
    using Generator = std::function<RecipeStep(const RecipeNode&)>;

    RecipeNode(DiagramPtr diagram, std::vector<FinitePath> a, std::vector<FinitePath> b,
               Generator gen, std::optional<UniformityKey> key = std::nullopt);

    const DiagramPtr& diagram() const { return diagram_; }
    const std::vector<FinitePath>& a_paths() const { return a_; } // sorted
    const std::vector<FinitePath>& b_paths() const { return b_; }
    int level() const { return a_.empty() ? 0 : a_[0].end_level(); }
    int base_level() const { return a_.empty() ? 0 : a_[0].start_level(); }
    const std::optional<UniformityKey>& uniformity_key() const { return key_; }

    const RecipeStep& step() const; // expands once, memoized

private:
    DiagramPtr diagram_;
    std::vector<FinitePath> a_, b_;
    Generator gen_;
    std::optional<UniformityKey> key_;
    mutable std::mutex mu_;
    mutable std::optional<RecipeStep> step_;
};

RecipePtr make_recipe(DiagramPtr diagram, std::vector<FinitePath> a, std::vector<FinitePath> b,
                      RecipeNode::Generator gen, std::optional<UniformityKey> key = std::nullopt);

/// Swap the two sides, recursively. reverse(reverse(r)) expands identically
/// to r at every depth.
RecipePtr reverse_recipe(const RecipePtr& r);

/// Transplant a recipe onto new prefixes. sigma_a maps each A path of the
/// node to its replacement (same for sigma_b); deeper paths are carried by
/// keeping their edge suffix, shifted to the new prefix end. The caller
/// guarantees the suffix edges exist there (checked lazily). The top node's
/// uniformity key is propagated unless an override is supplied.
RecipePtr rebase_recipe(const RecipePtr& r,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_a,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_b);
RecipePtr rebase_recipe(const RecipePtr& r,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_a,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_b,
                        std::optional<UniformityKey> key);

// ---- expansion and validation ----

struct ExpandedNode {
    RecipePtr node;
    std::string path;     // "root/0/1" style location for witnesses
    int level = 0;
    bool expanded = false;              // step() was taken (level < depth)
    std::vector<ExpandedNode> children; // present when expanded
};

/// Expand all descendants with level <= depth, validating the node
/// invariants at each step. Throws error with a witness on violation.
ExpandedNode expand(const RecipePtr& root, int depth);

/// All descendants at each level (the node itself included).
std::vector<const ExpandedNode*> descendants_at_level(const ExpandedNode& tree, int level);

// ---- hypothesis checkers ----

struct CheckResult {
    bool pass = true;
    Report witnesses;
};

using NSequence = std::function<int(int level)>;

CheckResult check_constrained(const RecipePtr& root, const NSequence& n, int depth);

struct DisjointViolation {
    int level;
    std::string first;  // node path of the descendant contributing A'
    std::string second; // node path of the descendant contributing B''
    std::string vertex; // common end vertex
    bool same_descendant;
};

struct DisjointResult {
    bool pass = true;            // pairwise form (two descendants at a level)
    bool pass_single = true;     // weaker form: each descendant against itself
    std::vector<DisjointViolation> violations;
};

DisjointResult check_pairwise_disjoint(const RecipePtr& root, int depth);

struct ModelCertificate {
    int level;
    int truncation; // k_l
    std::string model_fingerprint;
};

struct HighlySymmetricResult {
    bool pass = true;
    std::vector<ModelCertificate> models; // one per level with >= 2 descendants
    Report witnesses;
};

HighlySymmetricResult check_highly_symmetric(const RecipePtr& root, int depth);

struct EtaleVerdict {
    bool hypotheses_hold = false;
    int depth = 0;
    CheckResult constrained;
    DisjointResult disjoint;
    HighlySymmetricResult highly_symmetric;
};

/// Aggregates the three sufficient conditions. This verifies combinatorial
/// hypotheses at finite depth; it is not a topology proof.
EtaleVerdict etale_verdict(const RecipePtr& root, const NSequence& n, int depth);

// ---- evaluation ----

enum class EvalMode { Descend, Copy };

struct EvalResult {
    FinitePath output;       // the provably determined output prefix
    EvalMode mode = EvalMode::Descend;
    int node_level = 0;      // level reached in the recipe tree
    bool needs_more_input = false; // output shorter than requested
};

/// Walk the recipe along `input` and return the output prefix forced by the
/// fit conditions, of length at most `target_len`. In Copy mode the output
/// is the paired path plus the copied input suffix; in Descend mode it is
/// the common prefix of the current node's B side.
EvalResult eval_prefix(const RecipePtr& root, const FinitePath& input, int target_len);

struct Unresolved {
    FinitePath prefix; // what was determined before giving up
};

using EpEvalResult = std::variant<EpPath, Unresolved>;

/// Exact evaluation on an eventually periodic point: either the walk enters
/// Copy mode (output exact by tail copying) or a cycle of uniformity-keyed
/// states is found and verified; otherwise Unresolved.
EpEvalResult eval_eventually_periodic(const RecipePtr& root, const EpPath& x, int max_steps);

} // namespace etale
