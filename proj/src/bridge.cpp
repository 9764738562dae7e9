#include "mugame/bridge.hpp"

#include "mugame/bekic.hpp"
#include "mugame/error.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mugame {

namespace {

std::string eq_var(VertexId v) { return "X" + std::to_string(v.value); }

} // namespace

EquationSystem game_to_system(const ParityGame& g) {
    validate_game(g);
    EquationSystem sys;
    std::set<std::string> lhs_names;
    for (VertexId v : g.arena.vertices())
        if (!g.var_label.count(v)) lhs_names.insert(eq_var(v));
    std::set<std::string> seen_params;
    for (VertexId v : g.arena.vertices()) {
        auto lab = g.var_label.find(v);
        if (lab != g.var_label.end()) {
            if (lhs_names.count(lab->second))
                throw ValidationError("leaf label " + lab->second +
                                      " collides with an equation variable");
            if (seen_params.insert(lab->second).second) sys.parameters.push_back(lab->second);
            continue;
        }
        bool eva = g.owner.at(v) == Player::Eva;
        const auto& outs = g.arena.out_edges(v);
        Equation eq;
        eq.lhs = eq_var(v);
        if (outs.empty()) {
            // the losing owner gets the matching degenerate connective
            eq.kind = eva ? BinderKind::Mu : BinderKind::Nu;
            eq.priority = eva ? 1u : 0u;
            eq.rhs = eva ? Term::coprod({}) : Term::prod({});
        } else {
            unsigned p = g.priority.at(v);
            eq.kind = (p % 2 == 0) ? BinderKind::Nu : BinderKind::Mu;
            eq.priority = p;
            std::vector<TermPtr> parts;
            parts.reserve(outs.size());
            for (EdgeId e : outs) {
                VertexId w = g.arena.tgt(e);
                auto wl = g.var_label.find(w);
                parts.push_back(Term::var(wl == g.var_label.end() ? eq_var(w) : wl->second));
            }
            eq.rhs = eva ? Term::coprod(std::move(parts)) : Term::prod(std::move(parts));
        }
        sys.equations.push_back(std::move(eq));
    }
    validate_system(sys);
    return sys;
}

TermPtr game_to_term(const ParityGame& g) {
    SolvedSystem solved = gaussian_eliminate(game_to_system(g));
    return solved.solution_for(eq_var(g.initial));
}

namespace {

// Priority of each binder occurrence, keyed by node identity. A binder
// outranks everything inside its body by the least margin that keeps its
// parity: odd for mu, even for nu.
int assign_binder_priorities(const TermPtr& t, std::map<const Term*, unsigned>& prio) {
    switch (t->kind()) {
    case TermKind::Var:
        return -1;
    case TermKind::Prod:
    case TermKind::Coprod: {
        int m = -1;
        for (const auto& c : t->children()) m = std::max(m, assign_binder_priorities(c, prio));
        return m;
    }
    case TermKind::Mu:
    case TermKind::Nu: {
        int inner = assign_binder_priorities(t->body(), prio);
        int c = inner + 1;
        bool want_odd = t->kind() == TermKind::Mu;
        if ((c % 2 == 1) != want_odd) ++c;
        prio[t.get()] = static_cast<unsigned>(c);
        return c;
    }
    }
    throw InternalError("assign_binder_priorities: unreachable");
}

struct GameBuilder {
    ParityGame g;
    const std::map<const Term*, unsigned>& prio;
    std::map<std::string, VertexId> bound;

    explicit GameBuilder(const std::map<const Term*, unsigned>& p) : prio(p) {}

    VertexId fresh(Player owner, unsigned priority) {
        VertexId v = g.arena.add_vertex();
        g.owner[v] = owner;
        g.priority[v] = priority;
        return v;
    }

    VertexId build(const TermPtr& t) {
        switch (t->kind()) {
        case TermKind::Var: {
            auto it = bound.find(t->name());
            if (it != bound.end()) return it->second;
            VertexId v = fresh(Player::Eva, 0);
            g.var_label[v] = t->name();
            return v;
        }
        case TermKind::Prod:
        case TermKind::Coprod:
            return build_branching(t, t->kind() == TermKind::Prod ? Player::Adam : Player::Eva,
                                   0);
        case TermKind::Mu:
        case TermKind::Nu: {
            unsigned p = prio.at(t.get());
            const TermPtr& body = t->body();
            VertexId v;
            auto saved = bound.find(t->name()) != bound.end()
                             ? std::optional<VertexId>(bound[t->name()])
                             : std::nullopt;
            if (body->kind() == TermKind::Prod || body->kind() == TermKind::Coprod) {
                // the binder rides on its body's vertex
                v = fresh(body->kind() == TermKind::Prod ? Player::Adam : Player::Eva, p);
                bound[t->name()] = v;
                for (const auto& c : body->children()) {
                    VertexId w = build(c);
                    g.arena.add_edge(v, w);
                }
            } else {
                // pass-through vertex so the priority is still visited
                v = fresh(Player::Eva, p);
                bound[t->name()] = v;
                VertexId w = build(body);
                g.arena.add_edge(v, w);
            }
            if (saved)
                bound[t->name()] = *saved;
            else
                bound.erase(t->name());
            return v;
        }
        }
        throw InternalError("term_to_game: unreachable");
    }

    VertexId build_branching(const TermPtr& t, Player owner, unsigned priority) {
        VertexId v = fresh(owner, priority);
        for (const auto& c : t->children()) {
            VertexId w = build(c);
            g.arena.add_edge(v, w);
        }
        return v;
    }
};

} // namespace

ParityGame term_to_game(const TermPtr& t) {
    std::map<const Term*, unsigned> prio;
    assign_binder_priorities(t, prio);
    GameBuilder b(prio);
    b.g.initial = b.build(t);
    b.g.priority_bound = max_priority(b.g);
    validate_game(b.g);
    return b.g;
}

} // namespace mugame
