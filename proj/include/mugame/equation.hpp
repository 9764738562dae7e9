#pragma once

#include "mugame/term.hpp"

#include <string>
#include <vector>

namespace mugame {

enum class BinderKind : std::uint8_t { Mu, Nu };

// One fixed-point equation. The parity of `priority` always matches the
// kind: odd for mu, even for nu.
struct Equation {
    std::string lhs;
    BinderKind kind;
    unsigned priority;
    TermPtr rhs;
};

// Ordered list of equations plus the ambient parameters. Right-hand sides
// may mention any lhs variable and any parameter.
struct EquationSystem {
    std::vector<Equation> equations;
    std::vector<std::string> parameters;
};

// Throws ValidationError on duplicate names, kind/parity mismatch, or a
// right-hand side mentioning an unknown variable.
void validate_system(const EquationSystem& s);

// Line-based concrete syntax:
//   # comment
//   param Y;
//   X0 =mu[1] (sum (prod) (var X0))
// Parameters may appear anywhere; their relative order is kept.
EquationSystem parse_equation_system(const std::string& text);

std::string print_equation_system(const EquationSystem& s);

} // namespace mugame
