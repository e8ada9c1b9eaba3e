#include "etale/fixtures.hpp"
#include "etale/splitting.hpp"

#include <doctest.h>

#include <set>

using namespace etale;

namespace {

// Stationary two-vertex base used for the worked splitting example:
// E(v,v)=1, E(v,w)=2, E(w,v)=2, E(w,w)=3.
DiagramPtr worked_base() { return fib_base_diagram(); }

SplitSpec worked_spec(const BratteliDiagram& base, int depth) {
    std::map<int, std::string> wa;
    for (int l = 1; l <= depth; ++l) wa[l] = "w";
    std::map<int, int> sz_a, sz_b;
    sz_a[0] = 1; // one top edge moves to the copy
    for (int l = 1; l < depth; ++l) {
        sz_a[l] = 2;
        sz_b[l] = 1;
    }
    return default_split_spec(base, wa, "*", sz_a, sz_b, depth);
}

Int count(const BratteliDiagram& d, int level, const std::string& from, const std::string& to) {
    return d.count_edges(level, from, to);
}

} // namespace

TEST_CASE("the worked splitting example") {
    auto base = worked_base();
    auto res = build_split(base, worked_spec(*base, 4), 4);
    const auto& c = *res.diagram;

    // every level past the first carries the copy
    for (int l = 1; l <= 4; ++l) {
        CHECK(c.vertex_index(l, "w#b") >= 0);
        CHECK(c.vertices(l).size() == base->vertices(l).size() + 1);
    }

    // the copy's out-edges: duplicated plain targets, split w-edges
    CHECK(count(c, 2, "w#b", "v") == 2);
    CHECK(count(c, 2, "w#b", "w#b") == 1);
    CHECK(count(c, 2, "w#b", "w") == 2);

    // in-edges of the copy come from the moved label sets
    CHECK(count(c, 0, "*", "w#b") == 1);
    CHECK(count(c, 1, "w", "w#b") == 2);
    CHECK(count(c, 1, "w#b", "w#b") == 1);

    CHECK(shadow_verify(res.shadow, 4).pass);
    CHECK(validate(c, 4).empty());
}

TEST_CASE("the dyadic split reproduces its two-letter diagram") {
    auto base = b2inf_diagram();
    std::map<int, std::string> wa;
    for (int l = 1; l <= 5; ++l) wa[l] = "a";
    std::map<int, int> sz_a, sz_b;
    sz_a[0] = 2;
    for (int l = 1; l < 5; ++l) {
        sz_a[l] = 2;
        sz_b[l] = 1;
    }
    auto res = build_split(base, default_split_spec(*base, wa, "*", sz_a, sz_b, 5), 5);
    const auto& c = *res.diagram;

    // a sends both edges to the copy; the copy keeps one of each
    CHECK(count(c, 2, "a", "a#b") == 2);
    CHECK(count(c, 2, "a", "a") == 0);
    CHECK(count(c, 2, "a#b", "a") == 1);
    CHECK(count(c, 2, "a#b", "a#b") == 1);
    CHECK(count(c, 0, "*", "a") == 2);
    CHECK(count(c, 0, "*", "a#b") == 2);
    CHECK(shadow_verify(res.shadow, 5).pass);

    // the split of a stationary diagram with uniform choices stays stationary
    CHECK(c.has_tail());
    c.ensure_level(9);
    CHECK(count(c, 8, "a#b", "a") == 1);
}

TEST_CASE("empty F leaves the copy unreachable, caught by validate") {
    auto base = b2inf_diagram();
    SplitSpec spec;
    for (int l = 1; l <= 3; ++l) spec.split_vertex[l] = "a";
    // no F sets at all: w_b has no in-edges anywhere
    auto res = build_split(base, spec, 3);
    auto rep = validate(*res.diagram, 3);
    bool found = false;
    for (const auto& v : rep)
        if (v.what == "no incoming edges") found = true;
    CHECK(found);
}

TEST_CASE("split spec validation catches bad label sets and collisions") {
    auto base = b2inf_diagram();
    SplitSpec spec;
    for (int l = 1; l <= 3; ++l) spec.split_vertex[l] = "a";
    spec.f_plain[{1, "a"}] = {"9"}; // not a label of E(a, a)
    CHECK(!validate_split_spec(*base, spec, 3).empty());
    CHECK_THROWS_AS(build_split(base, spec, 3), error);

    BratteliDiagram collide(0, {{"x"}, {"y", "y#b"}},
                            {{{"x", "1", "y"}, {"x", "2", "y#b"}}});
    SplitSpec spec2;
    spec2.split_vertex[1] = "y";
    auto rep = validate_split_spec(collide, spec2, 1);
    bool found = false;
    for (const auto& v : rep)
        if (v.what.find("collision") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("default split spec sizes and failure reporting") {
    auto base = worked_base();
    // the golden-mean base supports |F(w_a)| = 2, |F(w_b)| = 1 but not more
    CHECK_NOTHROW(worked_spec(*base, 4));
    std::map<int, std::string> wa;
    for (int l = 1; l <= 3; ++l) wa[l] = "w";
    std::map<int, int> sz_a{{0, 1}, {1, 4}}, sz_b{{1, 1}};
    try {
        default_split_spec(*base, wa, "*", sz_a, sz_b, 3);
        FAIL("expected an error");
    } catch (const error& e) {
        std::string msg = e.what();
        CHECK(msg.find("need 4") != std::string::npos);
        CHECK(msg.find("have 3") != std::string::npos);
        CHECK(msg.find("level 1") != std::string::npos);
    }

    // boundary case: exactly as many parallel edges as required
    ConstructionConfig tight;
    tight.r = RSequence{{2}, 1};
    tight.base = uniform_strict_base(tight.r, 2, 5);
    tight.depth = 5;
    CHECK(validate_inputs(tight).empty());
    CHECK_NOTHROW(build(tight));
}

TEST_CASE("out-degree preservation and the incidence identity") {
    auto base = worked_base();
    auto res = build_split(base, worked_spec(*base, 4), 4);
    const auto& c = *res.diagram;

    for (int l = 0; l < 4; ++l)
        for (const auto& v : c.vertices(l)) {
            auto tv = res.shadow.map_vertex(l, v);
            CHECK(c.out_edges(l, v).size() == base->out_edges(l, tv).size());
        }

    // column identity: the split row pair sums to the base row, the copy's
    // column repeats the original's, every other entry is untouched
    for (int l = 1; l < 4; ++l) {
        Mat mc = incidence_matrix(c, l);
        Mat mb = incidence_matrix(*base, l);
        auto ci = [&](const std::string& v) { return c.vertex_index(l + 1, v); };
        auto cj = [&](const std::string& v) { return c.vertex_index(l, v); };
        auto bi = [&](const std::string& v) { return base->vertex_index(l + 1, v); };
        auto bj = [&](const std::string& v) { return base->vertex_index(l, v); };
        for (const auto& src : base->vertices(l)) {
            for (const auto& dst : base->vertices(l + 1)) {
                Int expected = mb.at(bi(dst), bj(src));
                if (dst == "w") {
                    CHECK(mc.at(ci("w"), cj(src)) + mc.at(ci("w#b"), cj(src)) == expected);
                    CHECK(mc.at(ci("w"), cj("w#b")) + mc.at(ci("w#b"), cj("w#b")) ==
                          mb.at(bi(dst), bj("w")));
                } else {
                    CHECK(mc.at(ci(dst), cj(src)) == expected);
                    CHECK(mc.at(ci(dst), cj("w#b")) == mb.at(bi(dst), bj("w")));
                }
            }
        }
    }
}

TEST_CASE("dot export of a split shows the copies in their layers") {
    auto base = worked_base();
    auto res = build_split(base, worked_spec(*base, 3), 3);
    auto dot = to_dot(*res.diagram, 3);
    CHECK(dot.find("L1:w#b") != std::string::npos);
    CHECK(dot.find("L3:w#b") != std::string::npos);
}

TEST_CASE("path transport through the split is a bijection at every depth") {
    auto base = worked_base();
    auto res = build_split(base, worked_spec(*base, 6), 6);
    for (int l = 1; l <= 6; ++l) {
        auto split_paths = enumerate_paths(*res.diagram, 0, l);
        auto base_paths = enumerate_paths(*base, 0, l);
        CHECK(split_paths.size() == base_paths.size());
        std::set<FinitePath> images;
        for (const auto& p : split_paths) images.insert(shadow_map_path(res.shadow, p));
        CHECK(images.size() == base_paths.size());
    }
}
