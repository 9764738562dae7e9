#pragma once

#include "mugame/equation.hpp"
#include "mugame/term.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mugame {

// Solutions to an equation system: one term per original variable, in the
// original equation order. Solution terms are closed except for the
// system's parameters.
struct SolvedSystem {
    std::vector<std::pair<std::string, TermPtr>> solutions;

    const TermPtr& solution_for(const std::string& var) const;
};

// Nested solution of a two-variable least-fixed-point system
//   X =mu F(X,Y)   Y =mu G(X,Y)
// The X binder ends up innermost:
//   Y ↦ mu Y. G(mu X. F(X,Y), Y)
//   X ↦ (mu X. F(X,Y))[Y := Y-solution]
SolvedSystem bekic_nest(const EquationSystem& sys);

// Solution of the degenerate system X = F(Y), Y =mu G(X,Y) where the first
// equation has no fixed-point content:
//   Y ↦ mu Y. G(F(Y), Y)       X ↦ F(Y-solution)
// `x`/`y` name the variables playing the two roles. `f` must not mention x.
SolvedSystem pairing_forward(const TermPtr& f, const TermPtr& g,
                             const std::string& x = "X", const std::string& y = "Y");

// Converse direction: recovers the single-variable fixed point
// mu Y. G(F(Y), Y) from a solved form of the paired system.
TermPtr pairing_backward(const TermPtr& f, const TermPtr& g, const SolvedSystem& nested,
                         const std::string& x = "X", const std::string& y = "Y");

// General solver, mixed binder kinds allowed. Variables are eliminated in
// ascending (priority, equation index) order; each eliminated variable's
// binder is wrapped around its right-hand side and the local solution is
// substituted into the remaining equations. Back-substitution then closes
// every local solution. Lowest priorities end innermost.
SolvedSystem gaussian_eliminate(const EquationSystem& sys);

} // namespace mugame
