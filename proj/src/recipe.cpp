#include "etale/recipe.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace etale {

RecipeNode::RecipeNode(DiagramPtr diagram, std::vector<FinitePath> a, std::vector<FinitePath> b,
                       Generator gen, std::optional<UniformityKey> key)
    : diagram_(std::move(diagram)), a_(std::move(a)), b_(std::move(b)),
      gen_(std::move(gen)), key_(std::move(key)) {
    std::sort(a_.begin(), a_.end());
    std::sort(b_.begin(), b_.end());
    if (a_.empty() || b_.empty()) throw error("recipe node with empty side");
    for (const auto& p : a_)
        if (p.end_level() != a_[0].end_level()) throw error("recipe A paths at mixed levels");
    for (const auto& p : b_)
        if (p.end_level() != a_[0].end_level()) throw error("recipe B paths at mixed levels");
}

const RecipeStep& RecipeNode::step() const {
    std::lock_guard lk(mu_);
    if (!step_) step_ = gen_(*this);
    return *step_;
}

RecipePtr make_recipe(DiagramPtr diagram, std::vector<FinitePath> a, std::vector<FinitePath> b,
                      RecipeNode::Generator gen, std::optional<UniformityKey> key) {
    return std::make_shared<RecipeNode>(std::move(diagram), std::move(a), std::move(b),
                                        std::move(gen), std::move(key));
}

RecipePtr reverse_recipe(const RecipePtr& r) {
    std::optional<UniformityKey> key;
    if (r->uniformity_key())
        key = UniformityKey{r->uniformity_key()->tag, r->uniformity_key()->b_end,
                            r->uniformity_key()->a_end};
    RecipePtr inner = r;
    return make_recipe(
        r->diagram(), r->b_paths(), r->a_paths(),
        [inner](const RecipeNode&) {
            const RecipeStep& s = inner->step();
            RecipeStep out;
            for (const auto& p : s.pairs) out.pairs.push_back({p.z, p.w});
            for (const auto& c : s.children) out.children.push_back(reverse_recipe(c));
            return out;
        },
        key);
}

namespace {

FinitePath rebase_one(const DiagramPtr& diag, const FinitePath& p,
                      const std::vector<std::pair<FinitePath, FinitePath>>& sigma) {
    for (const auto& [from, to] : sigma) {
        if (!p.starts_with(from)) continue;
        int shift = to.end_level() - from.end_level();
        FinitePath out = to;
        int lvl = from.end_level();
        for (size_t i = size_t(from.length()); i < p.edges().size(); ++i) {
            const auto& e = p.edges()[i];
            if (!diag->has_edge(lvl + shift, out.end_vertex(), e.label, e.target))
                throw error("rebase: edge " + out.end_vertex() + ">" + e.label + ">" + e.target +
                            " missing at level " + std::to_string(lvl + shift));
            out = out.append(e);
            ++lvl;
        }
        return out;
    }
    throw error("rebase: path " + p.to_string() + " outside the substitution domain");
}

} // namespace

RecipePtr rebase_recipe(const RecipePtr& r,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_a,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_b) {
    return rebase_recipe(r, std::move(sigma_a), std::move(sigma_b), r->uniformity_key());
}

RecipePtr rebase_recipe(const RecipePtr& r,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_a,
                        std::vector<std::pair<FinitePath, FinitePath>> sigma_b,
                        std::optional<UniformityKey> key) {
    for (const auto& [from, to] : sigma_a)
        if (from.end_vertex() != to.end_vertex())
            throw error("rebase: substitution must preserve end vertices");
    for (const auto& [from, to] : sigma_b)
        if (from.end_vertex() != to.end_vertex())
            throw error("rebase: substitution must preserve end vertices");
    auto diag = r->diagram();
    std::vector<FinitePath> a, b;
    for (const auto& p : r->a_paths()) a.push_back(rebase_one(diag, p, sigma_a));
    for (const auto& p : r->b_paths()) b.push_back(rebase_one(diag, p, sigma_b));
    RecipePtr inner = r;
    auto sa = std::make_shared<std::vector<std::pair<FinitePath, FinitePath>>>(std::move(sigma_a));
    auto sb = std::make_shared<std::vector<std::pair<FinitePath, FinitePath>>>(std::move(sigma_b));
    return make_recipe(
        diag, std::move(a), std::move(b),
        [inner, diag, sa, sb](const RecipeNode&) {
            const RecipeStep& s = inner->step();
            RecipeStep out;
            for (const auto& p : s.pairs)
                out.pairs.push_back({rebase_one(diag, p.w, *sa), rebase_one(diag, p.z, *sb)});
            for (const auto& c : s.children) out.children.push_back(rebase_recipe(c, *sa, *sb));
            return out;
        },
        std::move(key));
}

// ---- expansion and validation ----

namespace {

std::vector<FinitePath> one_edge_extensions(const BratteliDiagram& d,
                                            const std::vector<FinitePath>& set) {
    std::vector<FinitePath> out;
    for (const auto& p : set)
        for (const auto& e : d.out_edges(p.end_level(), p.end_vertex()))
            out.push_back(p.append(PathEdge{e.label, e.to}));
    std::sort(out.begin(), out.end());
    return out;
}

void validate_step(const RecipeNode& n, const RecipeStep& s, const std::string& where) {
    const auto& d = *n.diagram();
    auto ae = one_edge_extensions(d, n.a_paths());
    auto be = one_edge_extensions(d, n.b_paths());
    std::vector<FinitePath> acover, bcover;
    for (const auto& p : s.pairs) {
        if (p.w.end_vertex() != p.z.end_vertex())
            throw error(where + ": tail pair (" + p.w.to_string() + ", " + p.z.to_string() +
                        ") ends at different vertices");
        acover.push_back(p.w);
        bcover.push_back(p.z);
    }
    for (const auto& c : s.children) {
        if (c->a_paths().size() != c->b_paths().size())
            throw error(where + ": child with |A| != |B|");
        acover.insert(acover.end(), c->a_paths().begin(), c->a_paths().end());
        bcover.insert(bcover.end(), c->b_paths().begin(), c->b_paths().end());
    }
    std::sort(acover.begin(), acover.end());
    std::sort(bcover.begin(), bcover.end());
    if (acover != ae) {
        std::string witness = "?";
        std::vector<FinitePath> diff;
        std::set_symmetric_difference(ae.begin(), ae.end(), acover.begin(), acover.end(),
                                      std::back_inserter(diff));
        if (!diff.empty()) witness = diff[0].to_string();
        throw error(where + ": A-side partition violation near " + witness);
    }
    if (bcover != be) {
        std::string witness = "?";
        std::vector<FinitePath> diff;
        std::set_symmetric_difference(be.begin(), be.end(), bcover.begin(), bcover.end(),
                                      std::back_inserter(diff));
        if (!diff.empty()) witness = diff[0].to_string();
        throw error(where + ": B-side partition violation near " + witness);
    }
}

ExpandedNode expand_rec(const RecipePtr& node, int depth, const std::string& where) {
    ExpandedNode out;
    out.node = node;
    out.path = where;
    out.level = node->level();
    if (node->level() < depth) {
        const RecipeStep& s = node->step();
        validate_step(*node, s, where);
        out.expanded = true;
        int i = 0;
        for (const auto& c : s.children)
            out.children.push_back(expand_rec(c, depth, where + "/" + std::to_string(i++)));
    }
    return out;
}

} // namespace

ExpandedNode expand(const RecipePtr& root, int depth) { return expand_rec(root, depth, "root"); }

static void collect_at_level(const ExpandedNode& n, int level, std::vector<const ExpandedNode*>& out) {
    if (n.level == level) {
        out.push_back(&n);
        return;
    }
    if (n.level > level) return;
    for (const auto& c : n.children) collect_at_level(c, level, out);
}

std::vector<const ExpandedNode*> descendants_at_level(const ExpandedNode& tree, int level) {
    std::vector<const ExpandedNode*> out;
    collect_at_level(tree, level, out);
    return out;
}

// ---- checkers ----

CheckResult check_constrained(const RecipePtr& root, const NSequence& n, int depth) {
    CheckResult res;
    ExpandedNode tree = expand(root, depth);
    for (int l = root->level(); l <= depth; ++l) {
        for (const auto* d : descendants_at_level(tree, l)) {
            int want = n(l);
            for (const auto* side : {&d->node->a_paths(), &d->node->b_paths()}) {
                int have = common_prefix_len(*side);
                if (have < want) {
                    res.pass = false;
                    // witness: the first two paths disagreeing that early
                    std::string w = (*side)[0].to_string();
                    for (size_t i = 1; i < side->size(); ++i)
                        if (common_prefix_len((*side)[0], (*side)[i]) == have) {
                            w += " vs " + (*side)[i].to_string();
                            break;
                        }
                    res.witnesses.push_back({d->path + " level " + std::to_string(l),
                                             "paths share " + std::to_string(have) + " edges, need " +
                                                 std::to_string(want) + ": " + w});
                }
            }
        }
    }
    return res;
}

namespace {

std::set<std::string> end_vertices(const std::vector<FinitePath>& ps) {
    std::set<std::string> out;
    for (const auto& p : ps) out.insert(p.end_vertex());
    return out;
}

} // namespace

DisjointResult check_pairwise_disjoint(const RecipePtr& root, int depth) {
    DisjointResult res;
    ExpandedNode tree = expand(root, depth);
    for (int l = root->level(); l <= depth; ++l) {
        auto ds = descendants_at_level(tree, l);
        std::vector<std::set<std::string>> a_ends, b_ends;
        for (const auto* d : ds) {
            a_ends.push_back(end_vertices(d->node->a_paths()));
            b_ends.push_back(end_vertices(d->node->b_paths()));
        }
        for (size_t i = 0; i < ds.size(); ++i)
            for (size_t j = 0; j < ds.size(); ++j) {
                std::vector<std::string> common;
                std::set_intersection(a_ends[i].begin(), a_ends[i].end(), b_ends[j].begin(),
                                      b_ends[j].end(), std::back_inserter(common));
                if (!common.empty()) {
                    res.pass = false;
                    if (i == j) res.pass_single = false;
                    res.violations.push_back(
                        {l, ds[i]->path, ds[j]->path, common[0], i == j});
                }
            }
    }
    return res;
}

namespace {

// Canonical structural fingerprint of a node truncated at level k. Returns
// nullopt when the truncation fails to be injective on some A or B set.
std::optional<std::string> fingerprint(const ExpandedNode& n, int k) {
    auto trunc_side = [&](const std::vector<FinitePath>& ps) -> std::optional<std::string> {
        std::vector<std::string> toks;
        std::set<std::string> seen;
        for (const auto& p : ps) {
            auto t = truncate_path(p, k).to_string();
            if (!seen.insert(t).second) return std::nullopt; // not injective
            toks.push_back(t);
        }
        std::sort(toks.begin(), toks.end());
        std::string s;
        for (const auto& t : toks) s += t + "|";
        return s;
    };
    auto a = trunc_side(n.node->a_paths());
    auto b = trunc_side(n.node->b_paths());
    if (!a || !b) return std::nullopt;
    return "A(" + *a + ")B(" + *b + ")";
}

// Fingerprint including one-step structure (pairs) and recursive children,
// down to the expansion boundary.
std::optional<std::string> deep_fingerprint(const ExpandedNode& n, int k, bool expanded_here) {
    auto base = fingerprint(n, k);
    if (!base) return std::nullopt;
    if (!expanded_here) return *base + "{leaf}";
    const RecipeStep& s = n.node->step();
    std::vector<std::string> pair_toks;
    for (const auto& p : s.pairs)
        pair_toks.push_back(truncate_path(p.w, k).to_string() + "~" + truncate_path(p.z, k).to_string());
    std::sort(pair_toks.begin(), pair_toks.end());
    std::string out = *base + "P(";
    for (const auto& t : pair_toks) out += t + "|";
    out += ")C(";
    std::vector<std::string> child_toks;
    for (const auto& c : n.children) {
        auto cf = deep_fingerprint(c, k, c.expanded);
        if (!cf) return std::nullopt;
        child_toks.push_back(*cf);
    }
    std::sort(child_toks.begin(), child_toks.end());
    for (const auto& t : child_toks) out += t + ";";
    out += ")";
    return out;
}

} // namespace

HighlySymmetricResult check_highly_symmetric(const RecipePtr& root, int depth) {
    HighlySymmetricResult res;
    ExpandedNode tree = expand(root, depth);
    for (int l = root->level(); l <= depth; ++l) {
        auto ds = descendants_at_level(tree, l);
        if (ds.size() <= 1) continue; // one descendant models itself
        bool found = false;
        for (int k = l; k >= root->base_level() && !found; --k) {
            std::optional<std::string> common_fp;
            bool ok = true;
            for (const auto* d : ds) {
                auto fp = deep_fingerprint(*d, k, d->expanded);
                if (!fp) {
                    ok = false;
                    break;
                }
                if (!common_fp)
                    common_fp = *fp;
                else if (*common_fp != *fp) {
                    ok = false;
                    break;
                }
            }
            if (ok && common_fp) {
                res.models.push_back({l, k, *common_fp});
                found = true;
            }
        }
        if (!found) {
            res.pass = false;
            res.witnesses.push_back({"level " + std::to_string(l),
                                     "no common model for " + std::to_string(ds.size()) +
                                         " descendants (e.g. " + ds[0]->path + ", " + ds[1]->path + ")"});
        }
    }
    return res;
}

EtaleVerdict etale_verdict(const RecipePtr& root, const NSequence& n, int depth) {
    EtaleVerdict v;
    v.depth = depth;
    v.constrained = check_constrained(root, n, depth);
    v.disjoint = check_pairwise_disjoint(root, depth);
    v.highly_symmetric = check_highly_symmetric(root, depth);
    v.hypotheses_hold = v.constrained.pass && v.disjoint.pass && v.highly_symmetric.pass;
    return v;
}

// ---- evaluation ----

namespace {

FinitePath common_b_prefix(const RecipeNode& n) {
    int len = common_prefix_len(n.b_paths());
    return n.b_paths()[0].prefix(len);
}

} // namespace

EvalResult eval_prefix(const RecipePtr& root, const FinitePath& input, int target_len) {
    int base = root->base_level();
    if (input.start_level() != base) throw error("eval: input must start at level " + std::to_string(base));
    int root_len = root->level() - base;
    if (input.length() < root_len) throw error("eval: input shorter than the recipe root");
    {
        auto head = input.prefix(root_len);
        const auto& a = root->a_paths();
        if (!std::binary_search(a.begin(), a.end(), head))
            throw error("eval: input does not start in the recipe domain");
    }
    RecipePtr cur = root;
    while (true) {
        int lvl = cur->level();
        if (input.end_level() == lvl) {
            FinitePath det = common_b_prefix(*cur);
            EvalResult r;
            r.mode = EvalMode::Descend;
            r.node_level = lvl;
            r.needs_more_input = det.length() < target_len;
            r.output = det.length() > target_len ? det.prefix(target_len) : det;
            return r;
        }
        FinitePath head = input.prefix(lvl + 1 - base);
        const RecipeStep& s = cur->step();
        const PathPair* hit = nullptr;
        for (const auto& p : s.pairs)
            if (p.w == head) {
                hit = &p;
                break;
            }
        if (hit) {
            FinitePath out = hit->z.concat(input.suffix_from(lvl + 1));
            EvalResult r;
            r.mode = EvalMode::Copy;
            r.node_level = lvl;
            r.needs_more_input = out.length() < target_len;
            r.output = out.length() > target_len ? out.prefix(target_len) : out;
            return r;
        }
        RecipePtr next;
        for (const auto& c : s.children) {
            const auto& a = c->a_paths();
            if (std::binary_search(a.begin(), a.end(), head)) {
                next = c;
                break;
            }
        }
        if (!next) throw error("eval: input leaves the recipe partition at " + head.to_string());
        cur = next;
    }
}

EpEvalResult eval_eventually_periodic(const RecipePtr& root, const EpPath& x, int max_steps) {
    int base = root->base_level();
    if (x.pre.start_level() != base) throw error("eval: input must start at level " + std::to_string(base));
    int root_len = root->level() - base;
    {
        auto head = x.finite_prefix(root_len);
        const auto& a = root->a_paths();
        if (!std::binary_search(a.begin(), a.end(), head))
            throw error("eval: input does not start in the recipe domain");
    }

    struct Seen {
        int t;
        FinitePath det;
    };
    std::map<std::tuple<UniformityKey, int, int>, Seen> seen;
    struct Candidate {
        EpPath out;
        int verify_until; // keep walking and checking this many more levels of determination
    };
    std::optional<Candidate> cand;

    RecipePtr cur = root;
    FinitePath det = common_b_prefix(*cur);
    int pre_end = x.pre.end_level();
    int plen = x.period_len();

    for (int step = 0; step < max_steps; ++step) {
        int lvl = cur->level();
        FinitePath head = x.finite_prefix(lvl + 1 - base);
        const RecipeStep& s = cur->step();
        const PathPair* hit = nullptr;
        for (const auto& p : s.pairs)
            if (p.w == head) {
                hit = &p;
                break;
            }
        if (hit) {
            EpPath suffix = x.suffix_from(lvl + 1);
            return normalize_ep(EpPath{hit->z.concat(suffix.pre), suffix.per});
        }
        RecipePtr next;
        for (const auto& c : s.children) {
            const auto& a = c->a_paths();
            if (std::binary_search(a.begin(), a.end(), head)) {
                next = c;
                break;
            }
        }
        if (!next) throw error("eval: input leaves the recipe partition at " + head.to_string());
        cur = next;
        int t = cur->level();
        FinitePath det2 = common_b_prefix(*cur);
        if (det2.length() < det.length() || !det2.starts_with(det.prefix(std::min(det.length(), det2.length()))))
            throw error("eval: determined output shrank (malformed recipe)");
        det = det2;

        if (cand) {
            // verify the candidate: determination must follow the claimed point
            if (det != cand->out.finite_prefix(det.length())) {
                cand.reset();
                seen.clear();
            } else if (t >= cand->verify_until) {
                return normalize_ep(cand->out);
            }
            continue;
        }
        if (cur->uniformity_key() && t >= pre_end) {
            int phase = (t - pre_end) % plen;
            int lag = t - (base + det.length());
            auto key = std::make_tuple(*cur->uniformity_key(), phase, lag);
            auto it = seen.find(key);
            if (it != seen.end()) {
                int out_period = det.length() - it->second.det.length();
                if (out_period > 0) {
                    FinitePath pre_part = it->second.det;
                    FinitePath per_part = det.suffix_from(pre_part.end_level());
                    if (per_part.source() == per_part.end_vertex()) {
                        EpPath out{pre_part, per_part};
                        cand = Candidate{out, t + 2 * (t - it->second.t)};
                    }
                }
            } else {
                seen.emplace(key, Seen{t, det});
            }
        }
    }
    return Unresolved{det};
}

} // namespace etale
