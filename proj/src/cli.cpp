#include "etale/cli.hpp"

#include "etale/aif.hpp"
#include "etale/fixtures.hpp"
#include "etale/homology.hpp"
#include "etale/json_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

namespace etale {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct LoadedConfig {
    Json raw;             // for the digest
    std::string digest;
    bool is_construction = false;
    DiagramPtr diagram;   // when a bare diagram
    ConstructionConfig construction;
};

LoadedConfig load_config(const std::string& arg) {
    LoadedConfig lc;
    if (arg.rfind("fixture:", 0) == 0) {
        std::string name = arg.substr(8);
        lc.digest = hex_digest(arg);
        if (name == "zhalf") {
            lc.is_construction = true;
            lc.construction = zhalf_config();
        } else if (name == "fibonacci") {
            lc.is_construction = true;
            lc.construction = fibonacci_config();
        } else if (name == "r248") {
            lc.is_construction = true;
            lc.construction = r248_config();
        } else if (name == "b2inf") {
            lc.diagram = b2inf_diagram();
        } else if (name == "fib-base") {
            lc.diagram = fib_base_diagram();
        } else if (name == "binary-words") {
            lc.diagram = binary_word_diagram();
        } else {
            throw error("unknown fixture: " + name);
        }
        return lc;
    }
    std::string text = slurp(arg);
    lc.digest = hex_digest(text);
    lc.raw = Json::parse(text);
    std::string schema = lc.raw.value("schema", "");
    if (schema == "bratteli-v1") {
        lc.diagram = diagram_from_json(lc.raw);
    } else if (schema == "construction-v1") {
        lc.is_construction = true;
        lc.construction = construction_from_json(lc.raw);
    } else {
        throw error("unknown schema in " + arg);
    }
    return lc;
}

Json report_header(const std::string& command, const std::string& digest) {
    Json j;
    j["command"] = command;
    j["config_digest"] = digest;
    return j;
}

// one-line-per-key rendering for --format text
void render_text(const Json& j, std::ostream& out, const std::string& prefix = "") {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            render_text(it.value(), out, prefix.empty() ? it.key() : prefix + "." + it.key());
    } else if (j.is_array()) {
        if (j.empty()) out << prefix << ": []\n";
        int i = 0;
        for (const auto& v : j) render_text(v, out, prefix + "[" + std::to_string(i++) + "]");
    } else {
        out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

Json verdict_json(const EtaleVerdict& v) {
    Json j;
    j["hypotheses_hold_to_depth"] = v.hypotheses_hold ? v.depth : -1;
    j["pass"] = v.hypotheses_hold;
    j["note"] = "finite-depth hypothesis verification, not a topology proof";
    Json c;
    c["pass"] = v.constrained.pass;
    Json cw = Json::array();
    for (const auto& w : v.constrained.witnesses) cw.push_back({{"where", w.where}, {"what", w.what}});
    c["witnesses"] = cw;
    j["constrained"] = c;
    Json d;
    d["pass_pairwise"] = v.disjoint.pass;
    d["pass_single"] = v.disjoint.pass_single;
    Json dv = Json::array();
    for (const auto& viol : v.disjoint.violations)
        dv.push_back({{"level", viol.level},
                      {"first", viol.first},
                      {"second", viol.second},
                      {"vertex", viol.vertex},
                      {"same_descendant", viol.same_descendant}});
    d["violations"] = dv;
    j["disjoint"] = d;
    Json h;
    h["pass"] = v.highly_symmetric.pass;
    Json hm = Json::array();
    for (const auto& m : v.highly_symmetric.models)
        hm.push_back({{"level", m.level}, {"truncation", m.truncation}});
    h["models"] = hm;
    Json hw = Json::array();
    for (const auto& w : v.highly_symmetric.witnesses) hw.push_back({{"where", w.where}, {"what", w.what}});
    h["witnesses"] = hw;
    j["highly_symmetric"] = h;
    return j;
}

Json group_json(const FgAbelianGroup& g) {
    Json j;
    j["free_rank"] = g.free_rank;
    Json f = Json::array();
    for (const auto& x : g.factors) f.push_back(x.get_str());
    j["invariant_factors"] = f;
    j["pretty"] = g.to_string();
    return j;
}

SemigroupElement parse_element(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) throw error("element must look like d,t (e.g. 3/2,1/2)");
    auto parse_rat = [](const std::string& t) {
        Rat r(t);
        r.canonicalize();
        return r;
    };
    SemigroupElement e;
    e.d = parse_rat(s.substr(0, comma));
    Rat t = parse_rat(s.substr(comma + 1));
    e.t = TorsionLabel::fraction(t.get_num(), t.get_den());
    return e;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"etale-h0: Bratteli diagram splitting, recipe homeomorphisms, and finite-level homology"};
    app.require_subcommand(1);

    std::string config, recipe_name, input_text, format = "json", x_text, y_text;
    int depth = 6, level = 4, len = 8, max_steps = 256, window = 3;
    bool tail_only = false, reversed = false, timing = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_flag("--timing", timing, "print wall time to stderr");
        sub->add_option("--format", format, "json|text")->check(CLI::IsMember({"json", "text"}));
    };

    auto* c_validate = app.add_subcommand("validate", "check diagram invariants");
    c_validate->add_option("--config", config)->required();
    c_validate->add_option("--depth", depth);
    add_common(c_validate);

    auto* c_split = app.add_subcommand("split", "emit the split diagram of a construction");
    c_split->add_option("--config", config)->required();
    c_split->add_option("--depth", depth);
    add_common(c_split);

    auto* c_build = app.add_subcommand("build", "build a construction bundle and summarize it");
    c_build->add_option("--config", config)->required();
    c_build->add_option("--depth", depth);
    add_common(c_build);

    auto* c_eval = app.add_subcommand("eval-phi", "evaluate the fitting homeomorphism");
    c_eval->add_option("--recipe", recipe_name);
    c_eval->add_option("--config", config);
    c_eval->add_option("--input", input_text)->required();
    c_eval->add_option("--len", len);
    c_eval->add_option("--max-steps", max_steps);
    c_eval->add_flag("--reverse", reversed, "evaluate the inverse map");
    add_common(c_eval);

    auto* c_h0 = app.add_subcommand("h0", "finite-level homology");
    c_h0->add_option("--config", config)->required();
    c_h0->add_option("--level", level)->required();
    c_h0->add_flag("--tail-only", tail_only);
    add_common(c_h0);

    auto* c_etale = app.add_subcommand("check-etale", "verify the sufficient conditions");
    c_etale->add_option("--recipe", recipe_name);
    c_etale->add_option("--config", config);
    c_etale->add_option("--depth", depth);
    add_common(c_etale);

    auto* c_aif = app.add_subcommand("check-aif", "flip criteria");
    c_aif->add_option("--config", config)->required();
    c_aif->add_option("--x", x_text);
    c_aif->add_option("--y", y_text);
    c_aif->add_option("--level", level);
    add_common(c_aif);

    auto* c_dot = app.add_subcommand("export-dot", "layered DOT export");
    c_dot->add_option("--config", config)->required();
    c_dot->add_option("--depth", depth);
    add_common(c_dot);

    auto* c_report = app.add_subcommand("report", "stabilization and verdict report");
    c_report->add_option("--config", config)->required();
    c_report->add_option("--depth", depth);
    c_report->add_option("--level", level);
    add_common(c_report);

    auto* c_simple = app.add_subcommand("check-simplicity", "telescoped positivity");
    c_simple->add_option("--config", config)->required();
    c_simple->add_option("--window", window);
    c_simple->add_option("--depth", depth);
    add_common(c_simple);

    std::vector<std::string> argv = args;
    try {
        std::vector<const char*> cargs;
        cargs.push_back("etale-h0");
        for (const auto& a : argv) cargs.push_back(a.c_str());
        app.parse(int(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n" << app.help();
        return 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    auto emit = [&](const Json& j) {
        if (format == "text")
            render_text(j, out);
        else
            out << canonical_dump(j) << "\n";
    };
    try {
        if (*c_validate) {
            auto lc = load_config(config);
            Json j = report_header("validate", lc.digest);
            Report rep;
            if (lc.is_construction)
                rep = validate_inputs(lc.construction);
            else
                rep = validate(*lc.diagram, depth);
            Json v = Json::array();
            for (const auto& w : rep) v.push_back({{"where", w.where}, {"what", w.what}});
            j["violations"] = v;
            j["pass"] = rep.empty();
            emit(j);
            code = rep.empty() ? 0 : 1;
        } else if (*c_split) {
            auto lc = load_config(config);
            if (!lc.is_construction) throw error("split needs a construction-v1 config");
            lc.construction.depth = std::max(lc.construction.depth, depth);
            Bundle b = build(lc.construction);
            out << canonical_dump(diagram_to_json(*b.split, depth)) << "\n";
        } else if (*c_build) {
            auto lc = load_config(config);
            if (!lc.is_construction) throw error("build needs a construction-v1 config");
            lc.construction.depth = std::max(lc.construction.depth, depth);
            Bundle b = build(lc.construction);
            Json j = report_header("build", lc.digest);
            Json lv = Json::object();
            for (const auto& [l, ld] : b.levels) {
                Json e;
                e["wa"] = ld.wa;
                e["wb"] = ld.wb;
                e["ma_labels"] = ld.ma_labels;
                e["mb_labels"] = ld.mb_labels;
                lv[std::to_string(l)] = e;
            }
            j["levels"] = lv;
            Json sa = Json::array(), sb = Json::array();
            for (const auto& p : b.seeds_a) sa.push_back(p.to_string());
            for (const auto& p : b.seeds_b) sb.push_back(p.to_string());
            j["seeds_a"] = sa;
            j["seeds_b"] = sb;
            j["diagram"] = diagram_to_json(*b.split, depth);
            out << canonical_dump(j) << "\n";
        } else if (*c_eval) {
            RecipePtr r;
            std::string digest;
            if (!recipe_name.empty()) {
                auto f = get_recipe_fixture(recipe_name);
                r = f.recipe;
                digest = hex_digest(recipe_name);
            } else if (!config.empty()) {
                auto lc = load_config(config);
                if (!lc.is_construction) throw error("eval-phi --config needs a construction");
                r = build(lc.construction).recipe;
                digest = lc.digest;
            } else {
                throw error("eval-phi needs --recipe or --config");
            }
            if (reversed) r = reverse_recipe(r);
            Json j = report_header("eval-phi", digest);
            j["input"] = input_text;
            EpPath x = parse_ep_path(input_text);
            auto res = eval_eventually_periodic(r, x, max_steps);
            if (std::holds_alternative<EpPath>(res)) {
                j["output"] = std::get<EpPath>(res).to_string();
                j["resolved"] = true;
            } else {
                j["resolved"] = false;
                j["determined_prefix"] = std::get<Unresolved>(res).prefix.to_string();
            }
            out << canonical_dump(j) << "\n";
        } else if (*c_h0) {
            auto lc = load_config(config);
            Json j = report_header("h0", lc.digest);
            j["level"] = level;
            if (tail_only || !lc.is_construction) {
                const BratteliDiagram& d =
                    lc.is_construction ? *lc.construction.base : *lc.diagram;
                auto t = h0_tail_approx(d, level);
                j["group"] = group_json(t.group);
                Json m = Json::array();
                for (int i = 0; i < t.connecting.rows(); ++i) {
                    Json row = Json::array();
                    for (int cix = 0; cix < t.connecting.cols(); ++cix)
                        row.push_back(t.connecting.at(i, cix).get_str());
                    m.push_back(row);
                }
                j["connecting_map"] = m;
                emit(j);
            } else {
                lc.construction.depth = std::max(lc.construction.depth, level + 2);
                Bundle b = build(lc.construction);
                auto g = h0_R_approx(b, level);
                j["group"] = group_json(g);
                j["free_rank"] = g.free_rank;
                Json f = Json::array();
                for (const auto& x : g.factors) f.push_back(x.get_str());
                j["invariant_factors"] = f;
                auto iso = verify_iso_finite_level(b, level);
                j["iso_check"] = {{"pass", iso.pass},
                                  {"relations_killed", iso.relations_killed},
                                  {"surjective", iso.surjective},
                                  {"groups_match", iso.groups_match},
                                  {"target", iso.rhs.to_string()}};
                Mat conn = incidence_matrix(*b.split, level);
                Json m = Json::array();
                for (int i = 0; i < conn.rows(); ++i) {
                    Json row = Json::array();
                    for (int cix = 0; cix < conn.cols(); ++cix)
                        row.push_back(conn.at(i, cix).get_str());
                    m.push_back(row);
                }
                j["connecting_map"] = m;
                emit(j);
                code = iso.pass ? 0 : 1;
            }
        } else if (*c_etale) {
            RecipePtr r;
            NSequence n;
            std::string digest;
            if (!recipe_name.empty()) {
                auto f = get_recipe_fixture(recipe_name, std::max(16, depth + 2));
                r = f.recipe;
                n = f.n;
                digest = hex_digest(recipe_name);
            } else if (!config.empty()) {
                auto lc = load_config(config);
                if (!lc.is_construction) throw error("check-etale --config needs a construction");
                lc.construction.depth = std::max(lc.construction.depth, depth + 2);
                Bundle b = build(lc.construction);
                r = b.recipe;
                n = b.n_sequence();
                digest = lc.digest;
            } else {
                throw error("check-etale needs --recipe or --config");
            }
            auto v = etale_verdict(r, n, depth);
            Json j = report_header("check-etale", digest);
            j["verdict"] = verdict_json(v);
            emit(j);
            code = v.hypotheses_hold ? 0 : 1;
        } else if (*c_aif) {
            // a construction config runs the rectangle-class check on one
            // original-vertex cylinder against one copy cylinder
            bool is_construction = false;
            {
                if (config.rfind("fixture:", 0) == 0) {
                    is_construction = true;
                } else {
                    try {
                        Json peek = Json::parse(slurp(config));
                        is_construction = peek.value("schema", "") == "construction-v1";
                    } catch (...) {
                    }
                }
            }
            if (is_construction) {
                auto lc = load_config(config);
                lc.construction.depth = std::max(lc.construction.depth, level + 2);
                Bundle b = build(lc.construction);
                auto first_ext = [&](FinitePath p) {
                    while (p.end_level() < level) {
                        auto es = b.split->out_edges(p.end_level(), p.end_vertex());
                        p = p.append(PathEdge{es[0].label, es[0].to});
                    }
                    return p;
                };
                auto res = rectangle_flip_class_check(b, level, {first_ext(b.seeds_a[0])},
                                                      {first_ext(b.seeds_b[0])});
                Json j = report_header("check-aif", lc.digest);
                j["family_applicable"] = res.family_applicable;
                j["family_pass"] = res.family_pass;
                j["family_trace"] = res.family_trace;
                j["group_level_pass"] = res.group_level.pass;
                j["note"] = res.note;
                if (res.class_a) {
                    j["class_a"] = res.class_a->d.get_str() + "," + res.class_a->t.to_string();
                    j["class_b"] = res.class_b->d.get_str() + "," + res.class_b->t.to_string();
                }
                emit(j);
                code = (!res.family_applicable || res.family_pass) ? 0 : 1;
                if (timing) {
                    auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                    err << "wall_ms=" << dt << "\n";
                }
                return code;
            }
            std::string text = slurp(config);
            Json raw = Json::parse(text);
            RationalFamilyParams params;
            for (const auto& p : raw.at("d_primes")) params.d_primes.push_back(Int(p.get<long>()));
            for (const auto& p : raw.value("e_primes", Json::array()))
                params.e_primes.push_back(Int(p.get<long>()));
            for (const auto& p : raw.value("e_caps", Json::array()))
                params.e_caps.push_back(p.get<int>());
            Json j = report_header("check-aif", hex_digest(text));
            auto prep = params.validate();
            if (!prep.empty()) throw error("invalid params:\n" + report_to_string(prep));
            if (!x_text.empty() || !y_text.empty()) {
                if (x_text.empty() || y_text.empty()) throw error("need both --x and --y");
                auto res = flip_check_rational_family(parse_element(x_text), parse_element(y_text), params);
                j["pass"] = res.pass;
                j["trace"] = res.trace;
                code = res.pass ? 0 : 1;
            } else {
                std::mt19937 rng(12345);
                auto rand_elem = [&]() {
                    SemigroupElement e;
                    long num = 1 + long(rng() % 40);
                    Int den = 1;
                    for (int i = 0; i < 3; ++i)
                        if (rng() % 2) den *= params.d_primes[rng() % params.d_primes.size()];
                    e.d = Rat(Int(num), den);
                    e.d.canonicalize();
                    if (!params.e_primes.empty() && rng() % 2) {
                        Int r = params.e_primes[rng() % params.e_primes.size()];
                        e.t = TorsionLabel::fraction(Int(long(1 + rng() % 5)), r);
                    }
                    return e;
                };
                int pass_count = 0, total = 100;
                for (int i = 0; i < total; ++i)
                    if (flip_check_rational_family(rand_elem(), rand_elem(), params).pass) ++pass_count;
                j["random_pairs"] = total;
                j["pass_count"] = pass_count;
                j["pass"] = pass_count == total;
                code = pass_count == total ? 0 : 1;
            }
            emit(j);
        } else if (*c_dot) {
            auto lc = load_config(config);
            DiagramPtr d = lc.diagram;
            if (lc.is_construction) {
                lc.construction.depth = std::max(lc.construction.depth, depth);
                d = build(lc.construction).split;
            }
            out << to_dot(*d, depth);
        } else if (*c_report) {
            auto lc = load_config(config);
            if (!lc.is_construction) throw error("report needs a construction-v1 config");
            lc.construction.depth = std::max({lc.construction.depth, depth + 2, level + 1});
            Bundle b = build(lc.construction);
            Json j = report_header("report", lc.digest);
            j["verdict"] = verdict_json(etale_verdict(b.recipe, b.n_sequence(), depth));
            auto stab = stabilization_report(b, level);
            Json rows = Json::array();
            for (const auto& row : stab.rows)
                rows.push_back({{"level", row.level},
                                {"group", group_json(row.group)},
                                {"torsion_is_rl", row.torsion_is_rl},
                                {"torsion_map_injective", row.torsion_map_injective},
                                {"torsion_map_is_mult_d", row.torsion_map_is_mult_d}});
            j["stabilization"] = {{"aborted", stab.aborted},
                                  {"abort_reason", stab.abort_reason},
                                  {"rows", rows},
                                  {"all_match", stab.all_match}};
            auto iso = verify_iso_finite_level(b, level);
            j["iso_check"] = {{"pass", iso.pass}, {"target", iso.rhs.to_string()}};
            bool ok = !stab.aborted && stab.all_match && iso.pass &&
                      j["verdict"]["pass"].get<bool>();
            j["pass"] = ok;
            emit(j);
            code = ok ? 0 : 1;
        } else if (*c_simple) {
            auto lc = load_config(config);
            DiagramPtr d = lc.is_construction ? lc.construction.base : lc.diagram;
            bool pass = check_simplicity(*d, window, depth);
            Json j = report_header("check-simplicity", lc.digest);
            j["pass"] = pass;
            emit(j);
            code = pass ? 0 : 1;
        }
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    if (timing) {
        auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        err << "wall_ms=" << dt << "\n";
    }
    return code;
}

} // namespace etale
