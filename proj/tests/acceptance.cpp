// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Everything here is finite-truncation and exact; tolerances are equalities
// of integers, invariant factors, and paths.

#include "etale/aif.hpp"
#include "etale/fixtures.hpp"
#include "etale/homology.hpp"
#include "oracle_snf.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace etale;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    std::string thrown;
    auto t0 = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        thrown = e.what();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << " [" << detail << "]";
    if (!thrown.empty()) std::cout << " [exception: " << thrown << "]";
    std::cout << " (" << ms << " ms)" << std::endl;
    if (!ok) ++failures;
}

ConstructionConfig strict_config(const RSequence& r, int n_vertices, int depth, int slack = 0,
                                 unsigned seed = 0) {
    ConstructionConfig c;
    c.r = r;
    c.base = uniform_strict_base(r, n_vertices, depth, slack);
    c.depth = depth;
    c.rng_seed = seed;
    return c;
}

bool check_tower(const Bundle& b, int l_max, int want_free, const std::function<Int(int)>& want_factor,
                 std::string& detail) {
    for (int l = 1; l <= l_max; ++l) {
        auto g = h0_R_approx(b, l);
        std::vector<Int> want;
        if (want_factor(l) >= 2) want.push_back(want_factor(l));
        if (g.free_rank != want_free || g.factors != want) {
            detail = "level " + std::to_string(l) + " gave " + g.to_string();
            return false;
        }
        if (!verify_iso_finite_level(b, l).pass) {
            detail = "iso check failed at level " + std::to_string(l);
            return false;
        }
    }
    return true;
}

bool shadow_suite_one(const Bundle& b, int depth, std::string& detail) {
    auto sv = shadow_verify(*b.shadow, depth);
    if (!sv.pass) {
        detail = "shadow hypotheses failed: " + sv.witnesses[0].what;
        return false;
    }
    // path bijectivity: enumerate when small, otherwise count identity plus
    // sampled lift round-trips (out-edge bijectivity makes lifts unique)
    for (int l = 1; l <= depth; ++l) {
        Mat acc_c = Mat::identity(int(b.split->vertices(0).size()));
        Mat acc_d = Mat::identity(int(b.base->vertices(0).size()));
        for (int i = 0; i < l; ++i) {
            acc_c = incidence_matrix(*b.split, i) * acc_c;
            acc_d = incidence_matrix(*b.base, i) * acc_d;
        }
        Int n_c = 0, n_d = 0;
        for (int i = 0; i < acc_c.rows(); ++i)
            for (int j = 0; j < acc_c.cols(); ++j) n_c += acc_c.at(i, j);
        for (int i = 0; i < acc_d.rows(); ++i)
            for (int j = 0; j < acc_d.cols(); ++j) n_d += acc_d.at(i, j);
        if (n_c != n_d) {
            detail = "path counts differ at level " + std::to_string(l);
            return false;
        }
        if (n_c <= 20000) {
            auto paths = enumerate_paths(*b.split, 0, l);
            std::set<FinitePath> images;
            for (const auto& p : paths) {
                auto q = shadow_map_path(*b.shadow, p);
                images.insert(q);
                if (shadow_lift_path(*b.shadow, q) != p) {
                    detail = "lift round-trip failed at level " + std::to_string(l);
                    return false;
                }
            }
            if (Int(long(images.size())) != n_c) {
                detail = "transport not injective at level " + std::to_string(l);
                return false;
            }
        } else {
            std::mt19937 rng(7u + unsigned(l));
            for (int it = 0; it < 200; ++it) {
                FinitePath p(0, b.split->vertices(0)[rng() % b.split->vertices(0).size()]);
                for (int i = 0; i < l; ++i) {
                    auto es = b.split->out_edges(p.end_level(), p.end_vertex());
                    const auto& e = es[rng() % es.size()];
                    p = p.append(PathEdge{e.label, e.to});
                }
                if (shadow_lift_path(*b.shadow, shadow_map_path(*b.shadow, p)) != p) {
                    detail = "sampled lift round-trip failed";
                    return false;
                }
            }
        }
    }
    return true;
}

std::vector<ConstructionConfig> random_strict_pool() {
    std::vector<RSequence> rs = {
        RSequence{{2}, 1},       RSequence{{3}, 1},          RSequence{{2, 4}, 1},
        RSequence{{2, 2, 4}, 1}, RSequence{{4}, 1},          RSequence{{2, 2, 2, 8}, 1},
        RSequence{{2, 6}, 1},    RSequence{{3, 3}, 1},
    };
    std::mt19937 rng(20250810);
    std::vector<ConstructionConfig> out;
    for (int i = 0; i < 20; ++i) {
        const auto& r = rs[rng() % rs.size()];
        int nv = 2 + int(rng() % 2);
        int slack = int(rng() % 3);
        unsigned seed = (i % 3 == 0) ? 0u : unsigned(1 + rng() % 10000);
        out.push_back(strict_config(r, nv, 7, slack, seed));
    }
    return out;
}

} // namespace

int main() {
    std::cout << "acceptance suite" << std::endl;

    criterion(1, "dyadic fixture: Z + Z/2 at levels 1..12 under 5 s", [](std::string& detail) {
        auto t0 = std::chrono::steady_clock::now();
        Bundle b = build(zhalf_config(14));
        if (!check_tower(b, 12, 1, [](int) -> Int { return Int(2); }, detail)) return false;
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        detail = std::to_string(ms) + " ms";
        return ms < 5000;
    });

    criterion(2, "golden-mean fixture: Z^2 + Z/2 at levels 1..10", [](std::string& detail) {
        Bundle b = build(fibonacci_config(12));
        return check_tower(b, 10, 2, [](int) -> Int { return Int(2); }, detail);
    });

    criterion(3, "doubling tower: Z^2 + Z/2^L at levels 1..6", [](std::string& detail) {
        Bundle b = build(r248_config(7));
        return check_tower(b, 6, 2, [](int l) -> Int { return Int(1) << l; }, detail);
    });

    criterion(4, "fitting suite: depth 5, suffixes up to 3, zero violations", [](std::string& detail) {
        struct Case {
            const char* name;
            Bundle bundle;
        };
        std::vector<Case> cases;
        cases.push_back({"zhalf", build(zhalf_config(12))});
        cases.push_back({"fibonacci", build(fibonacci_config(12))});
        cases.push_back({"strict-r2", build(strict_config(RSequence{{2}, 1}, 2, 9))});
        for (auto& c : cases) {
            auto res = check_fits(c.bundle.recipe, 5, 3);
            if (!res.pass) {
                detail = std::string(c.name) + ": " + std::to_string(res.witnesses.size()) +
                         " violations, first: " + res.witnesses[0].what;
                return false;
            }
        }
        return true;
    });

    criterion(5, "hypothesis suite: fixtures and 20 random strict configs pass, counterexamples fail",
              [](std::string& detail) {
                  for (auto cfg : {zhalf_config(9), fibonacci_config(9)}) {
                      Bundle b = build(cfg);
                      auto v = etale_verdict(b.recipe, b.n_sequence(), 6);
                      if (!v.hypotheses_hold) {
                          detail = "a torsion fixture failed the hypotheses";
                          return false;
                      }
                  }
                  int idx = 0;
                  for (auto& cfg : random_strict_pool()) {
                      Bundle b = build(cfg);
                      auto v = etale_verdict(b.recipe, b.n_sequence(), 6);
                      if (!v.hypotheses_hold) {
                          detail = "random strict config " + std::to_string(idx) + " failed";
                          return false;
                      }
                      ++idx;
                  }
                  auto v1 = etale_verdict(counterexample1_recipe(), [](int l) { return l - 1; }, 4);
                  bool c1_ok = !v1.hypotheses_hold && !v1.disjoint.violations.empty() &&
                               v1.disjoint.violations[0].level == 1 &&
                               v1.disjoint.violations[0].vertex == "a";
                  auto v2 = etale_verdict(counterexample2_recipe(), [](int l) { return l - 1; }, 4);
                  bool c2_ok = !v2.hypotheses_hold && !v2.disjoint.violations.empty() &&
                               v2.disjoint.violations[0].level == 1 &&
                               v2.disjoint.violations[0].vertex == "b";
                  auto v3 = etale_verdict(counterexample3_recipe(),
                                          [](int l) { return std::max(0, l - 1); }, 4);
                  bool c3_cross = false;
                  for (const auto& viol : v3.disjoint.violations)
                      if (!viol.same_descendant && viol.level >= 2 && viol.first != viol.second)
                          c3_cross = true;
                  bool c3_ok = !v3.hypotheses_hold && !v3.highly_symmetric.pass && c3_cross &&
                               !v3.highly_symmetric.witnesses.empty() &&
                               v3.highly_symmetric.witnesses[0].where == "level 1";
                  if (!c1_ok) detail = "counterexample 1 witness wrong";
                  if (!c2_ok) detail = "counterexample 2 witness wrong";
                  if (!c3_ok) detail = "counterexample 3 witness wrong";
                  return c1_ok && c2_ok && c3_ok;
              });

    criterion(6, "special point maps to the displayed image and returns", [](std::string& detail) {
        Bundle b = build(zhalf_config(24));
        auto x = parse_ep_path("ep(*>3>a;a>1>a#b,a#b>2>a)");
        auto res = eval_eventually_periodic(b.recipe, x, 128);
        if (!std::holds_alternative<EpPath>(res)) {
            detail = "forward evaluation unresolved";
            return false;
        }
        auto img = std::get<EpPath>(res);
        if (img.to_string() != "ep(*>1>a#b;a#b>2>a,a>1>a#b)") {
            detail = "image was " + img.to_string();
            return false;
        }
        auto back = eval_eventually_periodic(reverse_recipe(b.recipe), img, 128);
        if (!std::holds_alternative<EpPath>(back)) {
            detail = "reverse evaluation unresolved";
            return false;
        }
        if (std::get<EpPath>(back).to_string() != x.to_string()) {
            detail = "round trip gave " + std::get<EpPath>(back).to_string();
            return false;
        }
        return true;
    });

    criterion(7, "beta consistency to depth 8 on all torsion fixtures", [](std::string& detail) {
        std::vector<std::pair<std::string, Bundle>> bundles;
        bundles.emplace_back("zhalf", build(zhalf_config(9)));
        bundles.emplace_back("fibonacci", build(fibonacci_config(9)));
        bundles.emplace_back("r248", build(r248_config(9)));
        for (auto& [name, b] : bundles) {
            auto res = beta_consistency_check(b, 8);
            if (!res.pass) {
                detail = name + ": " + res.witnesses[0].what;
                return false;
            }
        }
        return true;
    });

    criterion(8, "snf matches the determinantal-divisor oracle on 200 random matrices",
              [](std::string& detail) {
                  std::mt19937 rng(818283);
                  std::uniform_int_distribution<int> dim(1, 8), entry(-20, 20);
                  for (int it = 0; it < 200; ++it) {
                      Mat m(dim(rng), dim(rng));
                      for (int i = 0; i < m.rows(); ++i)
                          for (int j = 0; j < m.cols(); ++j) m.at(i, j) = entry(rng);
                      auto s = snf(m);
                      if (!(s.u * m * s.v == s.d)) {
                          detail = "transform identity failed at iteration " + std::to_string(it);
                          return false;
                      }
                      Int du = det(s.u), dv = det(s.v);
                      if (!((du == 1 || du == -1) && (dv == 1 || dv == -1))) {
                          detail = "non-unimodular transform at iteration " + std::to_string(it);
                          return false;
                      }
                      std::vector<Int> diag;
                      for (const auto& x : s.diagonal())
                          if (x != 0) diag.push_back(x);
                      if (diag != testing::invariant_factors_by_minors(m)) {
                          detail = "oracle mismatch at iteration " + std::to_string(it);
                          return false;
                      }
                  }
                  return true;
              });

    criterion(9, "flip criteria: random family pairs, group-level cases, guarded errors",
              [](std::string& detail) {
                  RationalFamilyParams dyadic{{2}, {2}, {1}};
                  RationalFamilyParams z16{{2, 3}, {3}, {1}};
                  std::mt19937 rng(515253);
                  for (const auto& params : {dyadic, z16}) {
                      for (int it = 0; it < 100; ++it) {
                          auto rand_elem = [&]() {
                              SemigroupElement e;
                              Int den = 1;
                              for (int i = 0; i < 3; ++i)
                                  if (rng() % 2) den *= params.d_primes[rng() % params.d_primes.size()];
                              e.d = Rat(Int(long(1 + rng() % 64)), den);
                              e.d.canonicalize();
                              if (rng() % 2)
                                  e.t = TorsionLabel::fraction(
                                      Int(long(rng() % 6)),
                                      params.e_primes[rng() % params.e_primes.size()]);
                              return e;
                          };
                          if (!flip_check_rational_family(rand_elem(), rand_elem(), params).pass) {
                              detail = "random family pair failed";
                              return false;
                          }
                      }
                  }
                  if (flip_check_fg(FgAbelianGroup{1, {2}}).pass) {
                      detail = "Z + Z/2 should fail";
                      return false;
                  }
                  auto z6 = group_from_presentation(2, {{Int(2), Int(0)}, {Int(0), Int(3)}});
                  if (!flip_check_fg(z6).pass) {
                      detail = "Z/2 + Z/3 should pass";
                      return false;
                  }
                  bool guarded = false;
                  try {
                      RationalFamilyParams cyclic{{}, {2}, {1}};
                      flip_check_rational_family(SemigroupElement{}, SemigroupElement{}, cyclic);
                  } catch (const error& e) {
                      guarded = std::string(e.what()).find("non-cyclic") != std::string::npos;
                  }
                  if (!guarded) {
                      detail = "cyclic D was not rejected";
                      return false;
                  }
                  guarded = false;
                  try {
                      RationalFamilyParams broken{{2}, {3}, {1}};
                      flip_check_rational_family(SemigroupElement{}, SemigroupElement{}, broken);
                  } catch (const error& e) {
                      guarded = std::string(e.what()).find("prime 3") != std::string::npos;
                  }
                  if (!guarded) {
                      detail = "broken divisibility was not rejected";
                      return false;
                  }
                  return true;
              });

    criterion(10, "shadow suite over every split and bundle", [](std::string& detail) {
        std::vector<std::pair<std::string, Bundle>> bundles;
        bundles.emplace_back("zhalf", build(zhalf_config(9)));
        bundles.emplace_back("fibonacci", build(fibonacci_config(9)));
        bundles.emplace_back("r248", build(r248_config(7)));
        int idx = 0;
        for (auto& cfg : random_strict_pool()) {
            if (idx % 4 == 0) bundles.emplace_back("random-" + std::to_string(idx), build(cfg));
            ++idx;
        }
        for (auto& [name, b] : bundles) {
            if (!shadow_suite_one(b, 6, detail)) {
                detail = name + ": " + detail;
                return false;
            }
            int rel_depth = b.config.r.ratio == 1 ? 6 : 5;
            auto rel = shadow_relation_check(b, rel_depth);
            if (!rel.pass) {
                detail = name + ": shadow relation check failed";
                return false;
            }
        }
        return true;
    });

    std::cout << (failures == 0 ? "acceptance: all criteria passed"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
