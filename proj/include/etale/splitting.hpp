#pragma once
// Vertex splitting: produce a new diagram C from a base diagram D by
// duplicating one chosen vertex per level. In-edges of the split vertex are
// divided between the original and the copy according to label sets F;
// out-edges are duplicated onto the copy, with the copy's edges into the
// next split vertex divided by F as well. The quotient map collapsing the
// copy back is a shadow homomorphism.

#include "etale/bratteli.hpp"
#include "etale/shadow.hpp"

#include <map>

namespace etale {

// The duplicated copy of vertex w at any level is named w + kSplitSuffix.
inline constexpr const char* kSplitSuffix = "#b";

inline std::string split_name(const std::string& wa) { return wa + kSplitSuffix; }
inline bool is_split_name(const std::string& v) {
    return v.size() > 2 && v.compare(v.size() - 2, 2, kSplitSuffix) == 0;
}
inline std::string unsplit_name(const std::string& v) {
    return is_split_name(v) ? v.substr(0, v.size() - 2) : v;
}

struct SplitSpec {
    // split_vertex[l] = the vertex of level l (l >= 1) to duplicate
    std::map<int, std::string> split_vertex;
    // f_plain[{l, v}] = F(v^l) ⊆ E(v^l, w_a^{l+1}): labels moved to w_b^{l+1}
    std::map<std::pair<int, std::string>, std::vector<std::string>> f_plain;
    // f_split[l] = F(w_b^l) ⊆ E(w_a^l, w_a^{l+1}): labels of the copy's edges
    // that go to w_b^{l+1} (the rest go to w_a^{l+1})
    std::map<int, std::vector<std::string>> f_split;

    const std::string& wa(int level) const;
    std::vector<std::string> f_of(int level, const std::string& v) const;
    std::vector<std::string> f_of_split(int level) const;
};

Report validate_split_spec(const BratteliDiagram& base, const SplitSpec& spec, int depth);

struct SplitResult {
    DiagramPtr diagram; // C
    ShadowMap shadow;   // T : C -> base
};

SplitResult build_split(DiagramPtr base, const SplitSpec& spec, int depth);

/// Canonical F choices for given sizes: the lexicographically first labels.
/// sizes_wa[l] = |F(w_a^l)| (and |F| for the level-0 seed source),
/// sizes_wb[l] = |F(w_b^l)|. Other vertices get empty F.
SplitSpec default_split_spec(const BratteliDiagram& base,
                             const std::map<int, std::string>& split_vertex,
                             const std::string& level0_source,
                             const std::map<int, int>& sizes_wa,
                             const std::map<int, int>& sizes_wb,
                             int depth);

} // namespace etale
