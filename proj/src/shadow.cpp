#include "etale/shadow.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace etale {

ShadowVerdict shadow_verify(const ShadowMap& t, int depth) {
    ShadowVerdict v;
    const auto& C = t.from();
    const auto& D = t.to();
    auto note = [&](const std::string& where, const std::string& what) {
        v.pass = false;
        v.witnesses.push_back({where, what});
    };
    if (C.start_level() != D.start_level()) {
        note("start level", "diagrams start at different levels");
        return v;
    }
    int lo = C.start_level();
    C.ensure_level(depth);
    D.ensure_level(depth);

    // (1) first level bijective
    {
        std::map<std::string, std::string> img;
        for (const auto& x : C.vertices(lo)) {
            auto y = t.map_vertex(lo, x);
            if (D.vertex_index(lo, y) < 0) note("level " + std::to_string(lo) + " vertex " + x, "image not a vertex");
            for (const auto& [x2, y2] : img)
                if (y2 == y) note("level " + std::to_string(lo) + " vertex " + x,
                                  "first level not injective (collides with " + x2 + ")");
            img[x] = y;
        }
        if (img.size() != D.vertices(lo).size())
            note("level " + std::to_string(lo), "first level not surjective");
    }
    // (2) per-level surjectivity
    for (int l = lo; l <= depth; ++l) {
        std::set<std::string> img;
        for (const auto& x : C.vertices(l)) {
            auto y = t.map_vertex(l, x);
            if (D.vertex_index(l, y) < 0)
                note("level " + std::to_string(l) + " vertex " + x, "image not a vertex");
            img.insert(y);
        }
        for (const auto& y : D.vertices(l))
            if (!img.count(y)) note("level " + std::to_string(l) + " vertex " + y, "not in the image");
    }
    // (3) out-edge bijectivity per vertex, label-preserving homomorphism
    for (int l = lo; l < depth; ++l) {
        for (const auto& x : C.vertices(l)) {
            auto tx = t.map_vertex(l, x);
            auto ex = C.out_edges(l, x);
            auto ey = D.out_edges(l, tx);
            std::set<std::string> labels_x, labels_y;
            for (const auto& e : ex) labels_x.insert(e.label);
            for (const auto& e : ey) labels_y.insert(e.label);
            if (labels_x != labels_y) {
                note("level " + std::to_string(l) + " vertex " + x,
                     "out-edge labels differ from those of " + tx);
                continue;
            }
            for (const auto& e : ex) {
                auto want = D.edge_target(l, tx, e.label);
                if (!want || *want != t.map_vertex(l + 1, e.to))
                    note("level " + std::to_string(l) + " edge " + x + ">" + e.label + ">" + e.to,
                         "not a graph homomorphism");
            }
        }
    }
    return v;
}

FinitePath shadow_map_path(const ShadowMap& t, const FinitePath& p) {
    if (!t.from().path_in_diagram(p)) throw error("shadow_map_path: path not in the source diagram");
    FinitePath out(p.start_level(), t.map_vertex(p.start_level(), p.source()));
    int l = p.start_level();
    for (const auto& e : p.edges()) {
        out = out.append(PathEdge{e.label, t.map_vertex(l + 1, e.target)});
        ++l;
    }
    return out;
}

EpPath shadow_map_path(const ShadowMap& t, const EpPath& p) {
    EpPath out{shadow_map_path(t, p.pre), shadow_map_path(t, p.per)};
    if (out.per.source() != out.per.end_vertex())
        throw error("shadow_map_path: image period does not close up");
    return out;
}

FinitePath shadow_lift_path(const ShadowMap& t, const FinitePath& p) {
    const auto& C = t.from();
    int lo = C.start_level();
    if (p.start_level() != lo) throw error("shadow_lift_path: lifts start at the first level only");
    std::string src;
    bool found = false;
    for (const auto& x : C.vertices(lo))
        if (t.map_vertex(lo, x) == p.source()) {
            src = x;
            found = true;
            break;
        }
    if (!found) throw error("shadow_lift_path: source vertex has no preimage");
    FinitePath out(lo, src);
    int l = lo;
    for (const auto& e : p.edges()) {
        auto target = C.edge_target(l, out.end_vertex(), e.label);
        if (!target) throw error("shadow_lift_path: no edge with label " + e.label + " at level " + std::to_string(l));
        out = out.append(PathEdge{e.label, *target});
        ++l;
    }
    return out;
}

EpPath shadow_lift_path(const ShadowMap& t, const EpPath& p) {
    FinitePath pre = shadow_lift_path(t, p.pre);
    // lift the period anchored at the lifted preperiod's end
    const auto& C = t.from();
    FinitePath per(pre.end_level(), pre.end_vertex());
    int l = per.start_level();
    for (const auto& e : p.per.edges()) {
        auto target = C.edge_target(l, per.end_vertex(), e.label);
        if (!target) throw error("shadow_lift_path: period lift leaves the diagram");
        per = per.append(PathEdge{e.label, *target});
        ++l;
    }
    if (per.end_vertex() != per.source())
        throw error("shadow_lift_path: lifted period does not close up");
    return EpPath{pre, per};
}

} // namespace etale
