#include "etale/splitting.hpp"

#include <algorithm>
#include <set>

namespace etale {

const std::string& SplitSpec::wa(int level) const {
    auto it = split_vertex.find(level);
    if (it == split_vertex.end()) throw error("no split vertex at level " + std::to_string(level));
    return it->second;
}

std::vector<std::string> SplitSpec::f_of(int level, const std::string& v) const {
    auto it = f_plain.find({level, v});
    return it == f_plain.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> SplitSpec::f_of_split(int level) const {
    auto it = f_split.find(level);
    return it == f_split.end() ? std::vector<std::string>{} : it->second;
}

Report validate_split_spec(const BratteliDiagram& base, const SplitSpec& spec, int depth) {
    Report rep;
    base.ensure_level(depth);
    for (int l = 1; l <= depth; ++l) {
        auto it = spec.split_vertex.find(l);
        if (it == spec.split_vertex.end()) {
            rep.push_back({"level " + std::to_string(l), "no split vertex chosen"});
            continue;
        }
        if (base.vertex_index(l, it->second) < 0)
            rep.push_back({"level " + std::to_string(l), "split vertex " + it->second + " not in base diagram"});
        if (base.vertex_index(l, split_name(it->second)) >= 0)
            rep.push_back({"level " + std::to_string(l), "name collision: " + split_name(it->second)});
    }
    for (int l = 0; l < depth; ++l) {
        const auto& wa_next = spec.wa(l + 1);
        for (const auto& v : base.vertices(l)) {
            auto f = spec.f_of(l, v);
            auto avail = base.edge_labels(l, v, wa_next);
            std::set<std::string> avail_set(avail.begin(), avail.end());
            for (const auto& lab : f)
                if (!avail_set.count(lab))
                    rep.push_back({"level " + std::to_string(l) + " F(" + v + ")",
                                   "label " + lab + " is not an edge into " + wa_next});
        }
        if (l >= 1) {
            auto f = spec.f_of_split(l);
            auto avail = base.edge_labels(l, spec.wa(l), wa_next);
            std::set<std::string> avail_set(avail.begin(), avail.end());
            for (const auto& lab : f)
                if (!avail_set.count(lab))
                    rep.push_back({"level " + std::to_string(l) + " F(w_b)",
                                   "label " + lab + " is not an edge " + spec.wa(l) + " -> " + wa_next});
        }
    }
    return rep;
}

SplitResult build_split(DiagramPtr base, const SplitSpec& spec, int depth) {
    auto rep = validate_split_spec(*base, spec, depth);
    if (!rep.empty()) throw error("split spec invalid:\n" + report_to_string(rep));

    int lo = base->start_level();
    std::vector<std::vector<std::string>> levels;
    std::vector<std::vector<EdgeRec>> edges;
    levels.push_back(base->vertices(lo));
    for (int l = lo + 1; l <= depth; ++l) {
        auto vs = base->vertices(l);
        vs.push_back(split_name(spec.wa(l)));
        levels.push_back(std::move(vs));
    }

    for (int l = lo; l < depth; ++l) {
        const auto& wa_next = spec.wa(l + 1);
        const auto wb_next = split_name(wa_next);
        std::vector<EdgeRec> es;
        for (const auto& v : base->vertices(l)) {
            auto f = spec.f_of(l, v);
            std::set<std::string> fset(f.begin(), f.end());
            for (const auto& e : base->out_edges(l, v)) {
                if (e.to != wa_next) {
                    es.push_back(e);
                } else if (fset.count(e.label)) {
                    es.push_back({e.from, e.label, wb_next});
                } else {
                    es.push_back({e.from, e.label, wa_next});
                }
            }
        }
        if (l >= 1) {
            // the copy's out-edges duplicate those of the split vertex
            const auto& wa_here = spec.wa(l);
            const auto wb_here = split_name(wa_here);
            auto fb = spec.f_of_split(l);
            std::set<std::string> fbset(fb.begin(), fb.end());
            for (const auto& e : base->out_edges(l, wa_here)) {
                if (e.to != wa_next) {
                    es.push_back({wb_here, e.label, e.to});
                } else if (fbset.count(e.label)) {
                    es.push_back({wb_here, e.label, wb_next});
                } else {
                    es.push_back({wb_here, e.label, wa_next});
                }
            }
        }
        edges.push_back(std::move(es));
    }

    // Stationary tail when the base is stationary and the choices repeat
    // (same split vertex and F sets at every tail level).
    std::optional<StationaryTail> tail;
    if (base->has_tail() && depth >= base->tail()->from_level + 2) {
        int ft = std::max(base->tail()->from_level, 1);
        bool uniform = true;
        for (int l = ft; l < depth; ++l) {
            if (spec.wa(l) != spec.wa(ft) || spec.f_of_split(l) != spec.f_of_split(ft)) uniform = false;
            for (const auto& v : base->vertices(ft))
                if (spec.f_of(l, v) != spec.f_of(ft, v)) uniform = false;
            if (!uniform) break;
        }
        if (uniform && depth >= ft + 1) {
            // the rule set is exactly the edge layer from ft+1 to ft+2 (a
            // fully split layer: both w_a and w_b present on each side)
            if (ft + 2 <= depth) tail = StationaryTail{ft + 1, edges[size_t(ft + 1 - lo)]};
        }
    }

    auto c = std::make_shared<BratteliDiagram>(lo, std::move(levels), std::move(edges), std::move(tail));
    ShadowMap t(c, base, [](int, const std::string& v) { return unsplit_name(v); });
    return SplitResult{c, std::move(t)};
}

SplitSpec default_split_spec(const BratteliDiagram& base,
                             const std::map<int, std::string>& split_vertex,
                             const std::string& level0_source,
                             const std::map<int, int>& sizes_wa,
                             const std::map<int, int>& sizes_wb,
                             int depth) {
    SplitSpec spec;
    spec.split_vertex = split_vertex;
    auto first_labels = [&](int level, const std::string& from, const std::string& to, int n,
                            const char* what) {
        auto labels = base.edge_labels(level, from, to);
        if (int(labels.size()) < n)
            throw error(std::string("not enough edges for ") + what + " at level " + std::to_string(level) +
                        ": need " + std::to_string(n) + ", have " + std::to_string(labels.size()));
        std::sort(labels.begin(), labels.end());
        labels.resize(size_t(n));
        return labels;
    };
    for (int l = 0; l < depth; ++l) {
        const auto& wa_next = split_vertex.at(l + 1);
        if (l == 0) {
            auto it = sizes_wa.find(0);
            int n = it == sizes_wa.end() ? 0 : it->second;
            if (n > 0)
                spec.f_plain[{0, level0_source}] = first_labels(0, level0_source, wa_next, n, "F(seed source)");
        } else {
            const auto& wa_here = split_vertex.at(l);
            auto ia = sizes_wa.find(l);
            if (ia != sizes_wa.end() && ia->second > 0)
                spec.f_plain[{l, wa_here}] = first_labels(l, wa_here, wa_next, ia->second, "F(w_a)");
            auto ib = sizes_wb.find(l);
            if (ib != sizes_wb.end() && ib->second > 0)
                spec.f_split[l] = first_labels(l, wa_here, wa_next, ib->second, "F(w_b)");
        }
    }
    return spec;
}

} // namespace etale
