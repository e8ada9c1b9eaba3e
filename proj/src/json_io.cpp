#include "etale/json_io.hpp"

#include "etale/fixtures.hpp"

#include <sstream>

namespace etale {

Json diagram_to_json(const BratteliDiagram& d, int depth) {
    d.ensure_level(depth);
    Json j;
    j["schema"] = "bratteli-v1";
    j["start_level"] = d.start_level();
    Json levels = Json::array();
    for (int l = d.start_level(); l <= depth; ++l) levels.push_back(d.vertices(l));
    j["levels"] = levels;
    Json edges = Json::array();
    for (int l = d.start_level(); l < depth; ++l)
        for (const auto& e : d.edges_at(l))
            edges.push_back({{"level", l}, {"from", e.from}, {"label", e.label}, {"to", e.to}});
    j["edges"] = edges;
    if (d.has_tail()) {
        Json rules = Json::array();
        for (const auto& r : d.tail()->rules)
            rules.push_back({{"from", r.from}, {"label", r.label}, {"to", r.to}});
        j["stationary_tail"] = {{"from_level", d.tail()->from_level}, {"rules", rules}};
    }
    return j;
}

DiagramPtr diagram_from_json(const Json& j) {
    if (!j.is_object() || j.value("schema", "") != "bratteli-v1")
        throw error("expected a bratteli-v1 object");
    int start = j.value("start_level", 0);
    std::vector<std::vector<std::string>> levels;
    for (const auto& l : j.at("levels")) levels.push_back(l.get<std::vector<std::string>>());
    std::vector<std::vector<EdgeRec>> edges(levels.empty() ? 0 : levels.size() - 1);
    for (const auto& e : j.value("edges", Json::array())) {
        int level = e.at("level").get<int>();
        int idx = level - start;
        if (idx < 0 || idx >= int(edges.size()))
            throw error("edge at level " + std::to_string(level) + " outside the level list");
        edges[size_t(idx)].push_back(
            {e.at("from").get<std::string>(), e.at("label").get<std::string>(), e.at("to").get<std::string>()});
    }
    std::optional<StationaryTail> tail;
    if (j.contains("stationary_tail")) {
        StationaryTail t;
        t.from_level = j["stationary_tail"].at("from_level").get<int>();
        for (const auto& r : j["stationary_tail"].at("rules"))
            t.rules.push_back({r.at("from").get<std::string>(), r.at("label").get<std::string>(),
                               r.at("to").get<std::string>()});
        tail = std::move(t);
    }
    return std::make_shared<BratteliDiagram>(start, std::move(levels), std::move(edges), std::move(tail));
}

Json construction_to_json(const ConstructionConfig& c) {
    Json j;
    j["schema"] = "construction-v1";
    j["base_diagram"] = diagram_to_json(*c.base, c.base->materialized_depth());
    Json r;
    if (c.r.ratio == 1) {
        Json ex = Json::array();
        for (const auto& x : c.r.prefix) ex.push_back(x.get_si());
        r["explicit"] = ex;
    } else {
        Json pre = Json::array();
        for (const auto& x : c.r.prefix) pre.push_back(x.get_si());
        r["prefix"] = pre;
        r["ratio"] = c.r.ratio.get_si();
    }
    j["r_sequence"] = r;
    if (!c.split_vertex.empty()) j["split_vertex"] = c.split_vertex;
    if (!c.seed_source.empty()) j["seed_source"] = c.seed_source;
    j["mode"] = c.mode == BuildMode::Strict ? "strict" : "r2-relaxed";
    j["depth"] = c.depth;
    if (c.rng_seed != 0) j["rng_seed"] = c.rng_seed;
    return j;
}

ConstructionConfig construction_from_json(const Json& j) {
    if (!j.is_object() || j.value("schema", "") != "construction-v1")
        throw error("expected a construction-v1 object");
    ConstructionConfig c;
    const auto& base = j.at("base_diagram");
    if (base.is_string()) {
        std::string s = base.get<std::string>();
        if (s == "fixture:b2inf")
            c.base = b2inf_diagram();
        else if (s == "fixture:fib-base")
            c.base = fib_base_diagram();
        else
            throw error("unknown base diagram fixture: " + s);
    } else {
        c.base = diagram_from_json(base);
    }
    const auto& r = j.at("r_sequence");
    if (r.contains("explicit")) {
        for (const auto& x : r["explicit"]) c.r.prefix.push_back(Int(x.get<long>()));
        c.r.ratio = 1;
    } else {
        for (const auto& x : r.at("prefix")) c.r.prefix.push_back(Int(x.get<long>()));
        c.r.ratio = Int(r.value("ratio", 1L));
    }
    c.split_vertex = j.value("split_vertex", "");
    c.seed_source = j.value("seed_source", "");
    std::string mode = j.value("mode", "strict");
    if (mode == "strict")
        c.mode = BuildMode::Strict;
    else if (mode == "r2-relaxed")
        c.mode = BuildMode::R2Relaxed;
    else
        throw error("unknown mode: " + mode);
    c.depth = j.value("depth", 8);
    c.rng_seed = j.value("rng_seed", 0u);
    return c;
}

std::string canonical_dump(const Json& j) { return j.dump(2); }

std::string hex_digest(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace etale
