#include "etale/construction.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace etale {

Int RSequence::r(int level) const {
    if (level <= 0) return 1;
    if (prefix.empty()) throw error("empty r sequence");
    if (level <= int(prefix.size())) return prefix[size_t(level - 1)];
    Int out = prefix.back();
    for (int i = int(prefix.size()); i < level; ++i) out *= ratio;
    return out;
}

Report RSequence::validate() const {
    Report rep;
    if (prefix.empty()) {
        rep.push_back({"r sequence", "empty"});
        return rep;
    }
    if (prefix[0] <= 1) rep.push_back({"r_1", "must be > 1"});
    Int prev = 1;
    for (size_t i = 0; i < prefix.size(); ++i) {
        if (prefix[i] <= 0 || prefix[i] % prev != 0)
            rep.push_back({"r_" + std::to_string(i + 1),
                           prev.get_str() + " does not divide " + prefix[i].get_str()});
        prev = prefix[i];
    }
    if (ratio < 1) rep.push_back({"ratio", "must be a positive integer"});
    return rep;
}

TorsionLabel TorsionLabel::fraction(const Int& num, const Int& den) {
    if (den <= 0) throw error("torsion label with nonpositive denominator");
    Int m = ((num % den) + den) % den; // representative in [0, den)
    TorsionLabel t;
    t.v_ = Rat(m, den);
    t.v_.canonicalize();
    return t;
}

TorsionLabel TorsionLabel::operator+(const TorsionLabel& o) const {
    Rat s = v_ + o.v_;
    return fraction(s.get_num(), s.get_den());
}

TorsionLabel TorsionLabel::operator*(const Int& k) const {
    Rat s = v_ * Rat(k);
    return fraction(s.get_num(), s.get_den());
}

std::string TorsionLabel::to_string() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

const std::string& Bundle::wa(int level) const {
    auto it = levels.find(level);
    if (it == levels.end()) throw error("no level data at level " + std::to_string(level));
    return it->second.wa;
}

const std::string& Bundle::wb(int level) const {
    auto it = levels.find(level);
    if (it == levels.end()) throw error("no level data at level " + std::to_string(level));
    return it->second.wb;
}

NSequence Bundle::n_sequence() const {
    int off = constrained_offset();
    return [off](int level) { return std::max(0, level - off); };
}

namespace {

std::string default_split_name(const ConstructionConfig& c, int level) {
    if (!c.split_vertex.empty()) return c.split_vertex;
    const auto& vs = c.base->vertices(level);
    if (vs.empty()) throw error("empty level in base diagram");
    return vs.back();
}

std::string default_seed_source(const ConstructionConfig& c) {
    if (!c.seed_source.empty()) return c.seed_source;
    const auto& vs = c.base->vertices(c.base->start_level());
    if (vs.empty()) throw error("empty first level in base diagram");
    return vs.back();
}

std::vector<std::string> pick_labels(std::vector<std::string> all, int n, std::mt19937* rng,
                                     const std::string& what) {
    if (int(all.size()) < n)
        throw error("not enough edges for " + what + ": need " + std::to_string(n) + ", have " +
                    std::to_string(all.size()));
    std::sort(all.begin(), all.end());
    if (rng) {
        std::shuffle(all.begin(), all.end(), *rng);
        all.resize(size_t(n));
        std::sort(all.begin(), all.end());
    } else {
        all.resize(size_t(n));
    }
    return all;
}

std::vector<FinitePath> one_edge_extensions(const BratteliDiagram& d,
                                            const std::vector<FinitePath>& set) {
    std::vector<FinitePath> out;
    for (const auto& p : set)
        for (const auto& e : d.out_edges(p.end_level(), p.end_vertex()))
            out.push_back(p.append(PathEdge{e.label, e.to}));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<FinitePath> multiset_minus(std::vector<FinitePath> big, std::vector<FinitePath> small) {
    std::sort(big.begin(), big.end());
    std::sort(small.begin(), small.end());
    std::vector<FinitePath> out;
    size_t i = 0, j = 0;
    while (i < big.size()) {
        if (j < small.size() && big[i] == small[j]) {
            ++i;
            ++j;
        } else {
            out.push_back(big[i++]);
        }
    }
    if (j != small.size()) throw error("multiset_minus: subtrahend not contained");
    return out;
}

// Zip the leftover extensions into tail pairs, matching end vertices.
std::vector<PathPair> tail_pairs(const BratteliDiagram& d, const RecipeNode& n,
                                 const std::vector<RecipePtr>& children) {
    std::vector<FinitePath> consumed_a, consumed_b;
    for (const auto& c : children) {
        consumed_a.insert(consumed_a.end(), c->a_paths().begin(), c->a_paths().end());
        consumed_b.insert(consumed_b.end(), c->b_paths().begin(), c->b_paths().end());
    }
    auto rem_a = multiset_minus(one_edge_extensions(d, n.a_paths()), consumed_a);
    auto rem_b = multiset_minus(one_edge_extensions(d, n.b_paths()), consumed_b);
    std::map<std::string, std::vector<FinitePath>> by_a, by_b;
    for (auto& p : rem_a) by_a[p.end_vertex()].push_back(std::move(p));
    for (auto& p : rem_b) by_b[p.end_vertex()].push_back(std::move(p));
    std::vector<PathPair> pairs;
    for (auto& [v, as] : by_a) {
        auto it = by_b.find(v);
        if (it == by_b.end() || it->second.size() != as.size())
            throw error("tail pairing mismatch at vertex " + v);
        for (size_t i = 0; i < as.size(); ++i) pairs.push_back({as[i], it->second[i]});
        by_b.erase(it);
    }
    if (!by_b.empty()) throw error("tail pairing mismatch at vertex " + by_b.begin()->first);
    return pairs;
}

// ---- strict mode ----

struct StrictState : std::enable_shared_from_this<StrictState> {
    DiagramPtr c;
    RSequence rseq;
    std::string wa, wb;
    std::map<int, std::vector<std::string>> mb_labels; // per level, chosen during build
    int key_from = -1; // uniformity keys valid from this level on (-1: never)
    std::mutex mu;
    std::map<int, RecipePtr> models;

    std::vector<FinitePath> ma_paths(int l) const {
        std::vector<FinitePath> out;
        for (const auto& e : c->out_edges(l, wa))
            if (e.to == wb) out.push_back(FinitePath(l, wa).append(PathEdge{e.label, e.to}));
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<FinitePath> mb_paths(int l) const {
        std::vector<FinitePath> out;
        for (const auto& lab : mb_labels.at(l)) {
            auto to = c->edge_target(l, wb, lab);
            if (!to || *to != wa) throw error("chosen M_B label is not an edge into " + wa);
            out.push_back(FinitePath(l, wb).append(PathEdge{lab, *to}));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<UniformityKey> key_for(int level, const std::string& a_end,
                                         const std::string& b_end) const {
        if (key_from < 0 || level < key_from) return std::nullopt;
        return UniformityKey{"strict", a_end, b_end};
    }

    RecipePtr node(std::vector<FinitePath> a, std::vector<FinitePath> b);
    RecipePtr model(int l);
};

RecipePtr StrictState::node(std::vector<FinitePath> a, std::vector<FinitePath> b) {
    auto self = shared_from_this();
    auto key = key_for(a.empty() ? 0 : a[0].end_level(), a.empty() ? "" : a[0].end_vertex(),
                       b.empty() ? "" : b[0].end_vertex());
    return make_recipe(
        c, std::move(a), std::move(b),
        [self](const RecipeNode& n) -> RecipeStep {
            int l = n.level();
            const auto& A = n.a_paths();
            const auto& B = n.b_paths();
            if (A[0].end_vertex() != self->wa || B[0].end_vertex() != self->wb)
                throw error("strict node with unexpected orientation");
            if (Int(long(A.size())) != self->rseq.r(l))
                throw error("strict node with wrong seed count at level " + std::to_string(l));
            auto ma = self->ma_paths(l);
            auto mb = self->mb_paths(l);
            if (Int(long(ma.size())) != self->rseq.r(l + 1))
                throw error("M_A has wrong size at level " + std::to_string(l));
            RecipeStep s;
            RecipePtr model_rev = reverse_recipe(self->model(l));
            long n_children = long(A.size()) - 1;
            for (long i = 0; i < n_children; ++i) {
                std::vector<std::pair<FinitePath, FinitePath>> sig_a, sig_b;
                for (const auto& m : ma)
                    sig_a.push_back({m, A[size_t(i)].append(m.edges()[0])});
                for (const auto& m : mb)
                    sig_b.push_back({m, B[size_t(i)].append(m.edges()[0])});
                s.children.push_back(rebase_recipe(model_rev, std::move(sig_a), std::move(sig_b)));
            }
            s.pairs = tail_pairs(*self->c, n, s.children);
            return s;
        },
        key);
}

RecipePtr StrictState::model(int l) {
    std::lock_guard lk(mu);
    auto it = models.find(l);
    if (it != models.end()) return it->second;
    auto m = node(mb_paths(l), ma_paths(l));
    models.emplace(l, m);
    return m;
}

// ---- relaxed mode (r = 2 everywhere; the two §2 examples) ----

struct RelaxedState : std::enable_shared_from_this<RelaxedState> {
    DiagramPtr c;
    std::string wa, wb;
    int key_from = -1;

    std::optional<UniformityKey> key_for(int level, const std::string& a_end,
                                         const std::string& b_end) const {
        if (key_from < 0 || level < key_from) return std::nullopt;
        return UniformityKey{"r2", a_end, b_end};
    }

    RecipePtr node(std::vector<FinitePath> a, std::vector<FinitePath> b);
};

RecipePtr RelaxedState::node(std::vector<FinitePath> a, std::vector<FinitePath> b) {
    auto self = shared_from_this();
    auto key = key_for(a.empty() ? 0 : a[0].end_level(), a.empty() ? "" : a[0].end_vertex(),
                       b.empty() ? "" : b[0].end_vertex());
    return make_recipe(
        c, std::move(a), std::move(b),
        [self](const RecipeNode& n) -> RecipeStep {
            int l = n.level();
            const auto& A = n.a_paths();
            const auto& B = n.b_paths();
            if (A.size() != 2 || B.size() != 2) throw error("relaxed node needs exactly 2 seeds");
            if (A[0].end_vertex() != self->wa || B[0].end_vertex() != self->wb)
                throw error("relaxed node with unexpected orientation");
            // A-side child: both split-bound extensions of the first seed
            std::vector<FinitePath> a1;
            for (const auto& e : self->c->out_edges(l, self->wa))
                if (e.to == self->wb) a1.push_back(A[0].append(PathEdge{e.label, e.to}));
            std::sort(a1.begin(), a1.end());
            if (a1.size() != 2) throw error("relaxed mode needs |F(w_a)| = 2 at level " + std::to_string(l));
            // B-side child: the first original-bound extension of each seed
            std::string f;
            for (const auto& e : self->c->out_edges(l, self->wb))
                if (e.to == self->wa) {
                    f = e.label;
                    break;
                }
            if (f.empty()) throw error("relaxed mode needs an edge w_b -> w_a at level " + std::to_string(l));
            std::vector<FinitePath> b1 = {B[0].append(PathEdge{f, self->wa}),
                                          B[1].append(PathEdge{f, self->wa})};
            std::sort(b1.begin(), b1.end());
            // child recipe: the reverse of this node, transplanted onto the
            // canonical identification of (A_1, B_1) with (B, A)
            std::vector<std::pair<FinitePath, FinitePath>> sig_a, sig_b;
            for (size_t i = 0; i < 2; ++i) {
                sig_a.push_back({B[i], a1[i]});
                sig_b.push_back({A[i], b1[i]});
            }
            RecipeStep s;
            s.children.push_back(rebase_recipe(reverse_recipe(n.shared_from_this()),
                                               std::move(sig_a), std::move(sig_b),
                                               self->key_for(l + 1, self->wb, self->wa)));
            s.pairs = tail_pairs(*self->c, n, s.children);
            return s;
        },
        key);
}

} // namespace

Report validate_inputs(const ConstructionConfig& c) {
    Report rep = c.r.validate();
    if (!c.base) {
        rep.push_back({"base", "missing base diagram"});
        return rep;
    }
    int lo = c.base->start_level();
    int depth = c.depth;
    if (depth < lo + 2) rep.push_back({"depth", "must cover at least two levels"});
    if (!rep.empty()) return rep;
    try {
        c.base->ensure_level(depth);
    } catch (const error& e) {
        rep.push_back({"base", e.what()});
        return rep;
    }
    auto base_rep = validate(*c.base, depth);
    for (auto& v : base_rep) rep.push_back(v);
    if (!rep.empty()) return rep;

    std::string seed_src = default_seed_source(c);
    if (c.base->vertex_index(lo, seed_src) < 0)
        rep.push_back({"seed source", seed_src + " not a first-level vertex"});
    for (int l = lo + 1; l <= depth; ++l) {
        std::string w = default_split_name(c, l);
        if (c.base->vertex_index(l, w) < 0)
            rep.push_back({"level " + std::to_string(l), "split vertex " + w + " missing"});
    }
    if (!rep.empty()) return rep;

    if (c.mode == BuildMode::Strict) {
        for (int l = lo + 1; l <= depth; ++l) {
            Int need = c.r.r(l - lo) + c.r.d(l - lo);
            for (const auto& v : c.base->vertices(l - 1))
                for (const auto& w : c.base->vertices(l)) {
                    Int have = c.base->count_edges(l - 1, v, w);
                    if (have < need)
                        rep.push_back({"level " + std::to_string(l) + " pair (" + v + "," + w + ")",
                                       "needs " + need.get_str() + " parallel edges, has " + have.get_str()});
                }
        }
    } else {
        for (size_t i = 0; i < c.r.prefix.size(); ++i)
            if (c.r.prefix[i] != 2)
                rep.push_back({"r sequence", "relaxed mode requires r = 2 at every level"});
        if (c.r.ratio != 1) rep.push_back({"r sequence", "relaxed mode requires r = 2 at every level"});
        if (!c.base->has_tail() || c.base->tail()->from_level > lo + 1)
            rep.push_back({"base", "relaxed mode requires a stationary base from the first level"});
        if (rep.empty()) {
            std::string w1 = default_split_name(c, lo + 1);
            Int top = c.base->count_edges(lo, default_seed_source(c), w1);
            if (top < 4)
                rep.push_back({"level " + std::to_string(lo) + " seed source",
                               "needs 4 parallel edges into " + w1 + ", has " + top.get_str()});
            for (int l = lo + 1; l < depth; ++l) {
                Int have = c.base->count_edges(l, default_split_name(c, l), default_split_name(c, l + 1));
                if (have < 2)
                    rep.push_back({"level " + std::to_string(l),
                                   "needs 2 parallel edges " + default_split_name(c, l) + " -> " +
                                       default_split_name(c, l + 1) + ", has " + have.get_str()});
            }
        }
    }
    return rep;
}

Bundle build(const ConstructionConfig& config) {
    auto rep = validate_inputs(config);
    if (!rep.empty()) throw error("construction config invalid:\n" + report_to_string(rep));

    Bundle b;
    b.config = config;
    b.base = config.base;
    int lo = b.base->start_level();
    int depth = config.depth;

    std::optional<std::mt19937> rng;
    if (config.rng_seed != 0) rng.emplace(config.rng_seed);
    auto rng_ptr = [&]() { return rng ? &*rng : nullptr; };

    std::string seed_src = default_seed_source(config);

    SplitSpec spec;
    for (int l = lo + 1; l <= depth; ++l) spec.split_vertex[l] = default_split_name(config, l);
    auto rel = [&](int l) { return l - lo; }; // r index relative to the base start
    spec.f_plain[{lo, seed_src}] =
        pick_labels(b.base->edge_labels(lo, seed_src, spec.split_vertex[lo + 1]),
                    int(config.r.r(1).get_si()), rng_ptr(), "F(seed source)");
    for (int l = lo + 1; l < depth; ++l) {
        const auto& w_here = spec.split_vertex[l];
        const auto& w_next = spec.split_vertex[l + 1];
        auto labels = b.base->edge_labels(l, w_here, w_next);
        spec.f_plain[{l, w_here}] =
            pick_labels(labels, int(config.r.r(rel(l) + 1).get_si()), rng_ptr(), "F(w_a)");
        spec.f_split[l] = pick_labels(labels, int(config.r.d(rel(l) + 1).get_si()), rng_ptr(), "F(w_b)");
    }

    auto split_res = build_split(b.base, spec, depth);
    b.split = split_res.diagram;
    b.shadow = std::make_shared<ShadowMap>(split_res.shadow);
    auto sv = shadow_verify(*b.shadow, depth);
    if (!sv.pass) throw error("split shadow failed verification:\n" + report_to_string(sv.witnesses));

    for (int l = lo + 1; l <= depth; ++l) {
        LevelData ld;
        ld.wa = spec.split_vertex[l];
        ld.wb = split_name(ld.wa);
        if (l < depth) {
            for (const auto& e : b.split->out_edges(l, ld.wa))
                if (e.to == split_name(spec.split_vertex[l + 1])) ld.ma_labels.push_back(e.label);
            std::sort(ld.ma_labels.begin(), ld.ma_labels.end());
            auto mb_all = b.split->edge_labels(l, ld.wb, spec.split_vertex[l + 1]);
            if (config.mode == BuildMode::Strict)
                ld.mb_labels =
                    pick_labels(mb_all, int(config.r.r(rel(l) + 1).get_si()), rng_ptr(), "M_B");
            else
                ld.mb_labels = pick_labels(mb_all, 1, nullptr, "M_B");
        }
        b.levels.emplace(l, std::move(ld));
    }

    // root seeds at level lo+1
    const auto& wa1 = b.levels.at(lo + 1).wa;
    const auto& wb1 = b.levels.at(lo + 1).wb;
    auto seed_paths = [&](const std::string& target, const char* what) {
        auto labels = pick_labels(b.split->edge_labels(lo, seed_src, target),
                                  int(config.r.r(1).get_si()), rng_ptr(), what);
        std::vector<FinitePath> out;
        for (const auto& lab : labels)
            out.push_back(FinitePath(lo, seed_src).append(PathEdge{lab, target}));
        std::sort(out.begin(), out.end());
        return out;
    };
    b.seeds_a = seed_paths(wa1, "A seeds");
    b.seeds_b = seed_paths(wb1, "B seeds");

    // uniformity keys only over the stationary stretch with constant r
    int key_from = -1;
    if (b.split->has_tail() && config.r.constant_from() >= 0)
        key_from = std::max({b.split->tail()->from_level, lo + config.r.constant_from(), lo + 1});

    if (config.mode == BuildMode::Strict) {
        auto st = std::make_shared<StrictState>();
        st->c = b.split;
        st->rseq = config.r;
        st->wa = wa1;
        st->wb = wb1;
        st->key_from = key_from;
        for (auto& [l, ld] : b.levels)
            if (!ld.mb_labels.empty()) st->mb_labels[l] = ld.mb_labels;
        b.recipe = st->node(b.seeds_a, b.seeds_b);
    } else {
        auto st = std::make_shared<RelaxedState>();
        st->c = b.split;
        st->wa = wa1;
        st->wb = wb1;
        st->key_from = key_from;
        b.recipe = st->node(b.seeds_a, b.seeds_b);
    }
    return b;
}

TorsionLabel beta_vertex(const Bundle& b, int level, const std::string& vertex) {
    int lo = b.base->start_level();
    if (level <= lo) return TorsionLabel{};
    if (vertex == b.wb(level)) return TorsionLabel::fraction(1, b.r(level - lo));
    return TorsionLabel{};
}

TorsionLabel beta_of(const Bundle& b, const FinitePath& path) {
    if (!b.split->path_in_diagram(path)) throw error("beta: path not in the split diagram");
    return beta_vertex(b, path.end_level(), path.end_vertex());
}

TorsionLabel beta_of(const Bundle& b, const std::vector<FinitePath>& formal_sum) {
    TorsionLabel t;
    for (const auto& p : formal_sum) t = t + beta_of(b, p);
    return t;
}

std::vector<Int> alpha_of(const Bundle& b, const FinitePath& path) {
    int level = path.end_level();
    const auto& vs = b.base->vertices(level);
    std::vector<Int> out(vs.size(), Int(0));
    auto img = b.shadow->map_vertex(level, path.end_vertex());
    int idx = b.base->vertex_index(level, img);
    if (idx < 0) throw error("alpha: image vertex missing");
    out[size_t(idx)] = 1;
    return out;
}

std::vector<Int> alpha_of(const Bundle& b, const std::vector<FinitePath>& formal_sum, int level) {
    const auto& vs = b.base->vertices(level);
    std::vector<Int> out(vs.size(), Int(0));
    for (const auto& p : formal_sum) {
        if (p.end_level() != level) throw error("alpha: mixed levels in formal sum");
        auto v = alpha_of(b, p);
        for (size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    }
    return out;
}

CheckResult beta_consistency_check(const Bundle& b, int depth) {
    CheckResult res;
    b.split->ensure_level(depth);
    int lo = b.base->start_level();
    for (int l = lo; l < depth; ++l) {
        for (const auto& v : b.split->vertices(l)) {
            TorsionLabel sum;
            for (const auto& e : b.split->out_edges(l, v)) sum = sum + beta_vertex(b, l + 1, e.to);
            if (!(sum == beta_vertex(b, l, v))) {
                res.pass = false;
                res.witnesses.push_back({"level " + std::to_string(l) + " vertex " + v,
                                         "beta " + beta_vertex(b, l, v).to_string() +
                                             " but extensions sum to " + sum.to_string()});
            }
        }
    }
    return res;
}

namespace {

const RecipePtr spine_descendant(const Bundle& b, int level) {
    RecipePtr cur = b.recipe;
    while (cur->level() < level) {
        const auto& s = cur->step();
        if (s.children.empty()) throw error("no descendant at level " + std::to_string(level));
        cur = s.children[0];
    }
    if (cur->level() != level) throw error("no descendant at level " + std::to_string(level));
    return cur;
}

std::vector<Int> ends_vector(const BratteliDiagram& c, int level, const std::vector<FinitePath>& a,
                             const std::vector<FinitePath>& b) {
    const auto& vs = c.vertices(level);
    std::vector<Int> out(vs.size(), Int(0));
    auto idx = [&](const std::string& v) {
        int i = c.vertex_index(level, v);
        if (i < 0) throw error("relation vector: vertex missing");
        return size_t(i);
    };
    for (const auto& p : a) out[idx(p.end_vertex())] += 1;
    for (const auto& p : b) out[idx(p.end_vertex())] -= 1;
    return out;
}

} // namespace

std::vector<Int> relation_vector(const Bundle& b, int level) {
    auto node = spine_descendant(b, level);
    return ends_vector(*b.split, level, node->a_paths(), node->b_paths());
}

std::vector<std::vector<Int>> relation_vectors(const Bundle& b, int up_to_level) {
    std::vector<std::vector<Int>> out;
    int lo = b.base->start_level();
    for (int l = lo + 1; l <= up_to_level; ++l) out.push_back(relation_vector(b, l));
    return out;
}

CheckResult relation_vectors_consistent(const Bundle& b, int depth) {
    CheckResult res;
    auto tree = expand(b.recipe, depth);
    int lo = b.base->start_level();
    for (int l = lo + 1; l <= depth; ++l) {
        auto rep = relation_vector(b, l);
        std::vector<Int> neg(rep.size());
        for (size_t i = 0; i < rep.size(); ++i) neg[i] = -rep[i];
        for (const auto* d : descendants_at_level(tree, l)) {
            auto v = ends_vector(*b.split, l, d->node->a_paths(), d->node->b_paths());
            if (v != rep && v != neg) {
                res.pass = false;
                res.witnesses.push_back({d->path, "relation vector differs beyond sign at level " +
                                                      std::to_string(l)});
            }
        }
    }
    return res;
}

CheckResult shadow_relation_check(const RecipePtr& root, const ShadowMap& t, int depth) {
    CheckResult res;
    auto tree = expand(root, depth);
    std::vector<const ExpandedNode*> stack = {&tree};
    while (!stack.empty()) {
        const auto* n = stack.back();
        stack.pop_back();
        if (!n->expanded) continue;
        int child_idx = 0;
        for (const auto& c : n->children) {
            auto ends = [&](const std::vector<FinitePath>& ps) {
                std::vector<std::string> out;
                for (const auto& p : ps) out.push_back(t.map_vertex(p.end_level(), p.end_vertex()));
                std::sort(out.begin(), out.end());
                return out;
            };
            if (ends(c.node->a_paths()) != ends(c.node->b_paths())) {
                res.pass = false;
                res.witnesses.push_back({n->path + "/" + std::to_string(child_idx),
                                         "shadow end-vertex multisets differ"});
            }
            ++child_idx;
            stack.push_back(&c);
        }
    }
    return res;
}

CheckResult shadow_relation_check(const Bundle& b, int depth) {
    return shadow_relation_check(b.recipe, *b.shadow, depth);
}

namespace {

void check_fits_forward(const RecipePtr& root, int depth, int suffix_len, CheckResult& res) {
    const auto& diag = *root->diagram();
    auto tree = expand(root, depth);
    std::vector<const ExpandedNode*> stack = {&tree};
    while (!stack.empty()) {
        const auto* n = stack.back();
        stack.pop_back();
        if (!n->expanded) continue;
        const auto& s = n->node->step();
        for (const auto& pr : s.pairs) {
            for (int sl = 0; sl <= suffix_len; ++sl) {
                if (!diag.reachable(pr.w.end_level() + sl)) break;
                for (const auto& input :
                     enumerate_paths(diag, pr.w.start_level(), pr.w.end_level() + sl, pr.w)) {
                    FinitePath expected = pr.z.concat(input.suffix_from(pr.w.end_level()));
                    auto r = eval_prefix(root, input, expected.length());
                    if (r.output != expected) {
                        res.pass = false;
                        res.witnesses.push_back({n->path, "pair (" + pr.w.to_string() + ", " +
                                                              pr.z.to_string() + ") not copied on " +
                                                              input.to_string()});
                        break;
                    }
                }
            }
        }
        for (const auto& c : n->children) {
            int blen = c.node->b_paths()[0].length();
            for (const auto& a : c.node->a_paths()) {
                for (int sl = 0; sl <= suffix_len; ++sl) {
                    if (!diag.reachable(a.end_level() + sl)) break;
                    for (const auto& input : enumerate_paths(diag, a.start_level(), a.end_level() + sl, a)) {
                        auto r = eval_prefix(root, input, blen);
                        bool ok;
                        if (r.output.length() >= blen) {
                            const auto& bs = c.node->b_paths();
                            ok = std::binary_search(bs.begin(), bs.end(), r.output.prefix(blen));
                        } else {
                            ok = false;
                            for (const auto& bp : c.node->b_paths())
                                if (bp.starts_with(r.output)) ok = true;
                        }
                        if (!ok) {
                            res.pass = false;
                            res.witnesses.push_back(
                                {n->path, "child image of " + input.to_string() + " leaves B side"});
                        }
                    }
                }
            }
        }
        for (const auto& c : n->children) stack.push_back(&c);
    }
}

} // namespace

CheckResult check_fits(const RecipePtr& root, int depth, int suffix_len) {
    CheckResult res;
    check_fits_forward(root, depth, suffix_len, res);
    check_fits_forward(reverse_recipe(root), depth, suffix_len, res);
    return res;
}

} // namespace etale
