#pragma once
// Built-in diagrams, recipes, and construction configs used by the CLI and
// the test suites: the two worked torsion constructions, the odometer and
// bit-flip recipes, and the three recipes whose combination with tail
// equivalence goes wrong.

#include "etale/construction.hpp"
#include "etale/recipe.hpp"

namespace etale {

DiagramPtr b2inf_diagram();          // one vertex per level, 4 then 2 edges
DiagramPtr fib_base_diagram();       // two vertices, telescoped golden-mean counts
DiagramPtr binary_word_diagram();    // two vertices per level, edges named by target
DiagramPtr binary_loop_diagram();    // one vertex per level, loop edges 0 and 1
DiagramPtr abc_word_diagram();       // words over {a,b,c}
DiagramPtr abc_truncated_diagram();  // first level {b,c}, then {a,b,c}

/// Path in the loop diagram spelled by a binary word of edge labels.
FinitePath loop_word_path(const std::string& w);

ConstructionConfig zhalf_config(int depth = 16);
ConstructionConfig fibonacci_config(int depth = 16);
ConstructionConfig r248_config(int depth = 7); // strict, r doubling each level
/// Strict-mode base with exactly the required multiplicities everywhere.
DiagramPtr uniform_strict_base(const RSequence& r, int n_vertices, int depth, int slack = 0);

RecipePtr odometer_recipe();
RecipePtr flip_recipe();
RecipePtr counterexample1_recipe(); // letter swap fixing a, rooted at level 1
RecipePtr counterexample2_recipe(); // same with the first-level a removed
RecipePtr counterexample3_recipe(); // odometer and flip glued side by side

struct RecipeFixture {
    std::string name;
    DiagramPtr diagram;
    RecipePtr recipe;
    NSequence n;
    std::string description;
};

std::vector<std::string> fixture_names(); // the five above plus zhalf, fibonacci
RecipeFixture get_recipe_fixture(const std::string& name, int depth_hint = 16);

} // namespace etale
