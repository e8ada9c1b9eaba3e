#pragma once
// Shadow homomorphisms between Bratteli diagrams: vertex maps that are
// bijective on the first level, surjective per level, and bijective on
// out-edges per vertex (label-preserving). Such maps induce homeomorphisms
// of path spaces; paths map by relabelling vertices and lift uniquely from
// the first level.

#include "etale/bratteli.hpp"

#include <functional>

namespace etale {

class ShadowMap {
public:
    using VertexRule = std::function<std::string(int level, const std::string& v)>;

    ShadowMap(DiagramPtr from, DiagramPtr to, VertexRule rule)
        : from_(std::move(from)), to_(std::move(to)), rule_(std::move(rule)) {}

    const BratteliDiagram& from() const { return *from_; }
    const BratteliDiagram& to() const { return *to_; }
    std::string map_vertex(int level, const std::string& v) const { return rule_(level, v); }

private:
    DiagramPtr from_;
    DiagramPtr to_;
    VertexRule rule_;
};

struct ShadowVerdict {
    bool pass = true;
    Report witnesses;
};

/// Checks the three shadow hypotheses up to `depth`, plus that the map is a
/// graph homomorphism on the materialized edges.
ShadowVerdict shadow_verify(const ShadowMap& t, int depth);

FinitePath shadow_map_path(const ShadowMap& t, const FinitePath& p);
EpPath shadow_map_path(const ShadowMap& t, const EpPath& p);

/// Unique lift of a path starting at the first level (first-level
/// bijectivity plus out-edge bijectivity make it well defined).
FinitePath shadow_lift_path(const ShadowMap& t, const FinitePath& p);
EpPath shadow_lift_path(const ShadowMap& t, const EpPath& p);

} // namespace etale
