#pragma once

#include "mugame/equation.hpp"
#include "mugame/game.hpp"
#include "mugame/term.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mugame {

// mt19937_64 with hand-rolled rejection sampling, because the engine is
// specified bit for bit by the standard while the distributions are not.
// Fixture seeds must reproduce everywhere.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    // Uniform in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n);
    // Uniform in [lo, hi], inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi);
    bool coin() { return below(2) == 1; }
    // True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
};

struct GameGenOptions {
    unsigned min_vertices = 1;
    unsigned max_vertices = 6;
    unsigned max_priority = 4;
    unsigned max_degree = 3;
    // Edges only from lower to higher ids, so every play is finite.
    bool acyclic = false;
    // Number of distinct leaf labels to sprinkle in; 0 keeps the game
    // closed.
    unsigned label_count = 0;
};

ParityGame random_game(Rng& rng, const GameGenOptions& opt);

struct TermGenOptions {
    unsigned max_depth = 4;
    unsigned max_width = 3;
    // Allowed free variables; bound variables are made up fresh.
    std::vector<std::string> free_vars;
};

TermPtr random_term(Rng& rng, const TermGenOptions& opt);

struct SystemGenOptions {
    BinderKind kind = BinderKind::Mu;
    unsigned min_equations = 2;
    unsigned max_equations = 3;
    unsigned max_params = 3;
    unsigned rhs_depth = 2;
    unsigned rhs_width = 3;
    // Strictly ascending priorities of the right parity, so elimination
    // order matches equation order.
    bool ascending_priorities = true;
};

// Homogeneous system X1..Xk with random right-hand sides over the lhs
// variables and parameters P1..Pm.
EquationSystem random_system(Rng& rng, const SystemGenOptions& opt);

} // namespace mugame
