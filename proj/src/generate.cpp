#include "mugame/generate.hpp"

#include "mugame/error.hpp"

#include <algorithm>
#include <limits>

namespace mugame {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw InternalError("Rng::below(0)");
    // rejection keeps the draw unbiased for every n
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
    for (;;) {
        std::uint64_t x = engine();
        if (x < limit || limit == 0) return x % n;
    }
}

std::uint64_t Rng::range(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw InternalError("Rng::range: empty range");
    return lo + below(hi - lo + 1);
}

ParityGame random_game(Rng& rng, const GameGenOptions& opt) {
    if (opt.min_vertices == 0 || opt.min_vertices > opt.max_vertices)
        throw ValidationError("random_game: bad vertex bounds");
    ParityGame g;
    unsigned n = static_cast<unsigned>(rng.range(opt.min_vertices, opt.max_vertices));
    std::vector<VertexId> ids;
    for (unsigned i = 0; i < n; ++i) ids.push_back(g.arena.add_vertex());
    // leaves first so their ids never receive edges
    std::vector<char> is_leaf(n, 0);
    if (opt.label_count > 0) {
        unsigned leaves = static_cast<unsigned>(rng.range(1, std::min(opt.label_count, n)));
        for (unsigned i = 0; i < leaves; ++i) {
            std::size_t pick = rng.below(n);
            if (is_leaf[pick]) continue;
            is_leaf[pick] = 1;
            g.var_label[ids[pick]] = std::string(1, static_cast<char>('A' + rng.below(opt.label_count)));
        }
    }
    for (unsigned i = 0; i < n; ++i) {
        g.owner[ids[i]] = rng.coin() ? Player::Eva : Player::Adam;
        g.priority[ids[i]] = static_cast<unsigned>(rng.below(opt.max_priority + 1));
        if (is_leaf[i]) continue;
        unsigned degree;
        if (opt.acyclic && i + 1 == n) {
            degree = 0;
        } else {
            degree = static_cast<unsigned>(rng.below(opt.max_degree + 1));
        }
        for (unsigned d = 0; d < degree; ++d) {
            std::size_t t = opt.acyclic ? i + 1 + rng.below(n - i - 1) : rng.below(n);
            g.arena.add_edge(ids[i], ids[t]);
        }
    }
    g.initial = ids[0];
    g.priority_bound = std::max(max_priority(g), opt.max_priority);
    validate_game(g);
    return g;
}

namespace {

TermPtr random_term_rec(Rng& rng, const TermGenOptions& opt, unsigned depth,
                        std::vector<std::string>& scope, unsigned& fresh) {
    // at the depth limit only leaves remain
    bool leaf_only = depth >= opt.max_depth;
    unsigned pick = static_cast<unsigned>(rng.below(leaf_only ? 3u : 10u));
    if (pick < 2 && !scope.empty()) {
        return Term::var(scope[rng.below(scope.size())]);
    }
    if (leaf_only || pick < 4) {
        return rng.coin() ? Term::prod({}) : Term::coprod({});
    }
    if (pick < 6 || (pick < 8 && opt.max_width == 0)) {
        std::string name = "B" + std::to_string(fresh++);
        bool mu = rng.coin();
        scope.push_back(name);
        TermPtr body = random_term_rec(rng, opt, depth + 1, scope, fresh);
        scope.pop_back();
        return mu ? Term::mu(name, body) : Term::nu(name, body);
    }
    unsigned width = static_cast<unsigned>(rng.range(1, std::max(1u, opt.max_width)));
    std::vector<TermPtr> kids;
    kids.reserve(width);
    for (unsigned i = 0; i < width; ++i)
        kids.push_back(random_term_rec(rng, opt, depth + 1, scope, fresh));
    return pick < 8 ? Term::prod(std::move(kids)) : Term::coprod(std::move(kids));
}

} // namespace

TermPtr random_term(Rng& rng, const TermGenOptions& opt) {
    std::vector<std::string> scope = opt.free_vars;
    unsigned fresh = 0;
    TermPtr t = random_term_rec(rng, opt, 0, scope, fresh);
    return canonicalize(t);
}

EquationSystem random_system(Rng& rng, const SystemGenOptions& opt) {
    if (opt.min_equations == 0 || opt.min_equations > opt.max_equations)
        throw ValidationError("random_system: bad equation bounds");
    EquationSystem sys;
    unsigned k = static_cast<unsigned>(rng.range(opt.min_equations, opt.max_equations));
    unsigned m = static_cast<unsigned>(rng.below(opt.max_params + 1));
    std::vector<std::string> names;
    for (unsigned i = 1; i <= k; ++i) names.push_back("X" + std::to_string(i));
    for (unsigned i = 1; i <= m; ++i) {
        sys.parameters.push_back("P" + std::to_string(i));
        names.push_back(sys.parameters.back());
    }
    bool mu = opt.kind == BinderKind::Mu;
    for (unsigned i = 0; i < k; ++i) {
        Equation eq;
        eq.lhs = "X" + std::to_string(i + 1);
        eq.kind = opt.kind;
        if (opt.ascending_priorities) {
            eq.priority = 2 * i + (mu ? 1 : 0);
        } else {
            eq.priority = mu ? 1 : 0;
        }
        TermGenOptions topt;
        topt.max_depth = opt.rhs_depth;
        topt.max_width = opt.rhs_width;
        topt.free_vars = names;
        eq.rhs = random_term(rng, topt);
        sys.equations.push_back(std::move(eq));
    }
    validate_system(sys);
    return sys;
}

} // namespace mugame
