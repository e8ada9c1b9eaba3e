#include "etale/fixtures.hpp"

#include <algorithm>

namespace etale {

namespace {

// Word diagrams: one root vertex "*", then letter levels; every edge is
// labelled by its target letter, so paths read as words.
DiagramPtr word_diagram(const std::vector<std::string>& first_letters,
                        const std::vector<std::string>& letters) {
    std::vector<std::vector<std::string>> levels = {{"*"}, first_letters, letters};
    std::vector<EdgeRec> top, mid, full;
    for (const auto& l : first_letters) top.push_back({"*", l, l});
    for (const auto& f : first_letters)
        for (const auto& l : letters) mid.push_back({f, l, l});
    for (const auto& f : letters)
        for (const auto& l : letters) full.push_back({f, l, l});
    std::vector<std::vector<EdgeRec>> edges = {top, mid};
    StationaryTail tail{2, full};
    if (first_letters == letters) {
        levels = {{"*"}, letters};
        edges = {top};
        tail = StationaryTail{1, full};
    }
    return std::make_shared<BratteliDiagram>(0, levels, edges, tail);
}

FinitePath word_path(const std::string& word) {
    FinitePath p(0, "*");
    for (char ch : word) p = p.append(PathEdge{std::string(1, ch), std::string(1, ch)});
    return p;
}

std::string repeat(char c, int k) { return std::string(size_t(k), c); }

} // namespace

DiagramPtr b2inf_diagram() {
    return std::make_shared<BratteliDiagram>(
        0, std::vector<std::vector<std::string>>{{"*"}, {"a"}},
        std::vector<std::vector<EdgeRec>>{
            {{"*", "1", "a"}, {"*", "2", "a"}, {"*", "3", "a"}, {"*", "4", "a"}}},
        StationaryTail{1, {{"a", "1", "a"}, {"a", "2", "a"}}});
}

DiagramPtr fib_base_diagram() {
    return std::make_shared<BratteliDiagram>(
        0, std::vector<std::vector<std::string>>{{"*"}, {"v", "w"}},
        std::vector<std::vector<EdgeRec>>{
            {{"*", "1", "v"}, {"*", "2", "w"}, {"*", "3", "w"}, {"*", "4", "w"}, {"*", "5", "w"}}},
        StationaryTail{1,
                       {{"v", "1", "v"},
                        {"v", "2", "w"},
                        {"v", "3", "w"},
                        {"w", "1", "v"},
                        {"w", "2", "v"},
                        {"w", "3", "w"},
                        {"w", "4", "w"},
                        {"w", "5", "w"}}});
}

DiagramPtr binary_word_diagram() { return word_diagram({"0", "1"}, {"0", "1"}); }
DiagramPtr abc_word_diagram() { return word_diagram({"a", "b", "c"}, {"a", "b", "c"}); }
DiagramPtr abc_truncated_diagram() { return word_diagram({"b", "c"}, {"a", "b", "c"}); }

DiagramPtr binary_loop_diagram() {
    return std::make_shared<BratteliDiagram>(
        0, std::vector<std::vector<std::string>>{{"*"}, {"o"}},
        std::vector<std::vector<EdgeRec>>{{{"*", "0", "o"}, {"*", "1", "o"}}},
        StationaryTail{1, {{"o", "0", "o"}, {"o", "1", "o"}}});
}

FinitePath loop_word_path(const std::string& w) {
    FinitePath p(0, "*");
    for (char ch : w) p = p.append(PathEdge{std::string(1, ch), "o"});
    return p;
}

ConstructionConfig zhalf_config(int depth) {
    ConstructionConfig c;
    c.base = b2inf_diagram();
    c.r = RSequence{{2}, 1};
    c.mode = BuildMode::R2Relaxed;
    c.depth = depth;
    return c;
}

ConstructionConfig fibonacci_config(int depth) {
    ConstructionConfig c;
    c.base = fib_base_diagram();
    c.r = RSequence{{2}, 1};
    c.split_vertex = "w";
    c.mode = BuildMode::R2Relaxed;
    c.depth = depth;
    return c;
}

DiagramPtr uniform_strict_base(const RSequence& r, int n_vertices, int depth, int slack) {
    std::vector<std::string> names;
    for (int i = 0; i < n_vertices; ++i) names.push_back("u" + std::to_string(i));
    std::vector<std::vector<std::string>> levels(size_t(depth) + 1, names);
    std::vector<std::vector<EdgeRec>> edges;
    for (int l = 0; l < depth; ++l) {
        Int need = r.r(l + 1) + r.d(l + 1) + slack;
        std::vector<EdgeRec> es;
        for (const auto& from : names)
            for (const auto& to : names)
                for (Int k = 0; k < need; ++k) {
                    std::string num = k.get_str();
                    while (num.size() < 4) num = "0" + num;
                    es.push_back({from, to + "e" + num, to});
                }
        edges.push_back(std::move(es));
    }
    return std::make_shared<BratteliDiagram>(0, std::move(levels), std::move(edges));
}

ConstructionConfig r248_config(int depth) {
    ConstructionConfig c;
    c.r = RSequence{{2}, 2};
    c.base = uniform_strict_base(c.r, 2, depth);
    c.mode = BuildMode::Strict;
    c.depth = depth;
    return c;
}

namespace {

RecipePtr odometer_node(DiagramPtr d, int k) {
    auto key = k >= 1 ? std::optional<UniformityKey>(UniformityKey{"od", "o", "o"}) : std::nullopt;
    return make_recipe(
        d, {loop_word_path(repeat('1', k))}, {loop_word_path(repeat('0', k))},
        [d, k](const RecipeNode&) {
            RecipeStep s;
            s.pairs.push_back(
                {loop_word_path(repeat('1', k) + "0"), loop_word_path(repeat('0', k) + "1")});
            s.children.push_back(odometer_node(d, k + 1));
            return s;
        },
        key);
}

std::string flip_word(const std::string& w) {
    std::string out;
    for (char c : w) out += (c == '0' ? '1' : '0');
    return out;
}

RecipePtr flip_node(DiagramPtr d, const std::string& w) {
    std::optional<UniformityKey> key;
    if (!w.empty()) key = UniformityKey{"flip", "o", "o"};
    return make_recipe(
        d, {loop_word_path(w)}, {loop_word_path(flip_word(w))},
        [d, w](const RecipeNode&) {
            RecipeStep s;
            s.children.push_back(flip_node(d, w + "0"));
            s.children.push_back(flip_node(d, w + "1"));
            return s;
        },
        key);
}

char sigma_abc(char c) { return c == 'a' ? 'a' : (c == 'b' ? 'c' : 'b'); }

std::string sigma_word(const std::string& w) {
    std::string out;
    for (char c : w) out += sigma_abc(c);
    return out;
}

RecipePtr sigma_node(DiagramPtr d, const std::string& w) {
    return make_recipe(d, {word_path(w)}, {word_path(sigma_word(w))},
                       [d, w](const RecipeNode&) {
                           RecipeStep s;
                           for (char v : {'a', 'b', 'c'})
                               s.children.push_back(sigma_node(d, w + v));
                           return s;
                       });
}

// level-1 root: the full first level against its image, one singleton child
// per two-letter word
RecipePtr sigma_root(DiagramPtr d, const std::vector<char>& first) {
    std::vector<FinitePath> a, b;
    for (char c : first) {
        a.push_back(word_path(std::string(1, c)));
        b.push_back(word_path(std::string(1, sigma_abc(c))));
    }
    return make_recipe(d, a, b, [d, first](const RecipeNode&) {
        RecipeStep s;
        for (char c : first)
            for (char v : {'a', 'b', 'c'})
                s.children.push_back(sigma_node(d, std::string{c, v}));
        return s;
    });
}

RecipePtr od_prefixed_node(DiagramPtr d, int k) {
    return make_recipe(d, {loop_word_path("0" + repeat('1', k))},
                       {loop_word_path("0" + repeat('0', k))},
                       [d, k](const RecipeNode&) {
                           RecipeStep s;
                           s.pairs.push_back({loop_word_path("0" + repeat('1', k) + "0"),
                                              loop_word_path("0" + repeat('0', k) + "1")});
                           s.children.push_back(od_prefixed_node(d, k + 1));
                           return s;
                       });
}

RecipePtr flip_prefixed_node(DiagramPtr d, const std::string& w) {
    return make_recipe(d, {loop_word_path("1" + w)}, {loop_word_path("1" + flip_word(w))},
                       [d, w](const RecipeNode&) {
                           RecipeStep s;
                           s.children.push_back(flip_prefixed_node(d, w + "0"));
                           s.children.push_back(flip_prefixed_node(d, w + "1"));
                           return s;
                       });
}

} // namespace

RecipePtr odometer_recipe() { return odometer_node(binary_loop_diagram(), 0); }
RecipePtr flip_recipe() { return flip_node(binary_loop_diagram(), ""); }
RecipePtr counterexample1_recipe() { return sigma_root(abc_word_diagram(), {'a', 'b', 'c'}); }
RecipePtr counterexample2_recipe() { return sigma_root(abc_truncated_diagram(), {'b', 'c'}); }

RecipePtr counterexample3_recipe() {
    auto d = binary_loop_diagram();
    return make_recipe(d, {FinitePath(0, "*")}, {FinitePath(0, "*")}, [d](const RecipeNode&) {
        RecipeStep s;
        s.children.push_back(od_prefixed_node(d, 0));
        s.children.push_back(flip_prefixed_node(d, ""));
        return s;
    });
}

std::vector<std::string> fixture_names() {
    return {"odometer",         "flip",  "counterexample-1", "counterexample-2",
            "counterexample-3", "zhalf", "fibonacci"};
}

RecipeFixture get_recipe_fixture(const std::string& name, int depth_hint) {
    if (name == "odometer") {
        auto r = odometer_recipe();
        return {name, r->diagram(), r, [](int l) { return l; }, "adding one on binary words"};
    }
    if (name == "flip") {
        auto r = flip_recipe();
        return {name, r->diagram(), r, [](int l) { return l; }, "bitwise complement on binary words"};
    }
    if (name == "counterexample-1") {
        auto r = counterexample1_recipe();
        return {name, r->diagram(), r, [](int l) { return l - 1; },
                "letter swap with a fixed letter; fails disjointness"};
    }
    if (name == "counterexample-2") {
        auto r = counterexample2_recipe();
        return {name, r->diagram(), r, [](int l) { return l - 1; },
                "letter swap on the truncated alphabet; fails disjointness"};
    }
    if (name == "counterexample-3") {
        auto r = counterexample3_recipe();
        return {name, r->diagram(), r, [](int l) { return std::max(0, l - 1); },
                "odometer and flip glued; fails the common-model condition"};
    }
    if (name == "zhalf") {
        Bundle b = build(zhalf_config(depth_hint));
        return {name, b.split, b.recipe, b.n_sequence(), "torsion over the dyadic diagram"};
    }
    if (name == "fibonacci") {
        Bundle b = build(fibonacci_config(depth_hint));
        return {name, b.split, b.recipe, b.n_sequence(), "torsion over the golden-mean diagram"};
    }
    throw error("unknown fixture: " + name);
}

} // namespace etale
