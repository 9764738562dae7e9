#include "mugame/bekic.hpp"

#include "mugame/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace mugame {

const TermPtr& SolvedSystem::solution_for(const std::string& var) const {
    for (const auto& [name, term] : solutions)
        if (name == var) return term;
    throw ValidationError("no solution for variable '" + var + "'");
}

SolvedSystem bekic_nest(const EquationSystem& sys) {
    validate_system(sys);
    if (sys.equations.size() != 2)
        throw ValidationError("bekic_nest expects exactly two equations");
    for (const auto& eq : sys.equations)
        if (eq.kind != BinderKind::Mu)
            throw ValidationError("bekic_nest expects both equations of kind mu");

    const Equation& ex = sys.equations[0];
    const Equation& ey = sys.equations[1];

    TermPtr inner_x = Term::mu(ex.lhs, ex.rhs);
    TermPtr y_sol = canonicalize(Term::mu(ey.lhs, substitute(ey.rhs, ex.lhs, inner_x)));
    TermPtr x_sol = canonicalize(substitute(inner_x, ey.lhs, y_sol));

    SolvedSystem out;
    out.solutions.emplace_back(ex.lhs, x_sol);
    out.solutions.emplace_back(ey.lhs, y_sol);
    return out;
}

SolvedSystem pairing_forward(const TermPtr& f, const TermPtr& g,
                             const std::string& x, const std::string& y) {
    auto f_free = free_vars(f);
    if (std::find(f_free.begin(), f_free.end(), x) != f_free.end())
        throw ValidationError("pairing_forward: first term must not mention '" + x + "'");
    TermPtr y_sol = canonicalize(Term::mu(y, substitute(g, x, f)));
    TermPtr x_sol = canonicalize(substitute(f, y, y_sol));
    SolvedSystem out;
    out.solutions.emplace_back(x, x_sol);
    out.solutions.emplace_back(y, y_sol);
    return out;
}

TermPtr pairing_backward(const TermPtr& f, const TermPtr& g, const SolvedSystem& nested,
                         const std::string& x, const std::string& y) {
    auto f_free = free_vars(f);
    if (std::find(f_free.begin(), f_free.end(), x) != f_free.end())
        throw ValidationError("pairing_backward: first term must not mention '" + x + "'");
    // Both components must be present in the solved form being inverted.
    nested.solution_for(x);
    nested.solution_for(y);
    return canonicalize(Term::mu(y, substitute(g, x, f)));
}

SolvedSystem gaussian_eliminate(const EquationSystem& sys) {
    validate_system(sys);
    const std::size_t n = sys.equations.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sys.equations[a].priority < sys.equations[b].priority;
    });

    // Forward sweep: wrap each equation in its own binder, then inline the
    // local solution into every equation not yet eliminated.
    std::vector<TermPtr> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = sys.equations[i].rhs;
    std::vector<TermPtr> local(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t i = order[step];
        const Equation& eq = sys.equations[i];
        local[i] = eq.kind == BinderKind::Mu ? Term::mu(eq.lhs, rhs[i])
                                             : Term::nu(eq.lhs, rhs[i]);
        for (std::size_t later = step + 1; later < n; ++later) {
            std::size_t j = order[later];
            rhs[j] = substitute(rhs[j], eq.lhs, local[i]);
        }
    }

    // Back-substitution: the last eliminated variable is closed already;
    // walking backwards closes the rest.
    std::vector<TermPtr> closed(n);
    for (std::size_t step = n; step-- > 0;) {
        std::size_t i = order[step];
        TermPtr t = local[i];
        for (std::size_t later = step + 1; later < n; ++later) {
            std::size_t j = order[later];
            t = substitute(t, sys.equations[j].lhs, closed[j]);
        }
        closed[i] = t;
    }

    SolvedSystem out;
    // Solutions are left as produced: substitution shares repeated
    // occurrences, and canonical renaming would unshare them, which makes
    // dense systems blow up. Callers canonicalize when printing.
    for (std::size_t i = 0; i < n; ++i)
        out.solutions.emplace_back(sys.equations[i].lhs, closed[i]);
    return out;
}

} // namespace mugame
