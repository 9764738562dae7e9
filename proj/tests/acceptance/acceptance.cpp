// End-to-end checks tying the solver, the translations and the evaluator
// together on randomized batches. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any fails. Batches run under OpenMP, one
// independent seed per item, results reduced in index order so the output
// is deterministic.

#include "brute.hpp"
#include "mugame/bekic.hpp"
#include "mugame/bridge.hpp"
#include "mugame/equation.hpp"
#include "mugame/error.hpp"
#include "mugame/game.hpp"
#include "mugame/generate.hpp"
#include "mugame/oracle.hpp"
#include "mugame/semantics.hpp"
#include "mugame/term.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace mugame;

namespace {

enum class ItemStatus { Pass, Fail, Skip };

struct Item {
    ItemStatus status = ItemStatus::Pass;
    std::string detail;
};

Item pass_item() { return {ItemStatus::Pass, ""}; }
Item skip_item() { return {ItemStatus::Skip, ""}; }
Item fail_item(std::string detail) { return {ItemStatus::Fail, std::move(detail)}; }

// Runs f(0..n-1) in parallel. Exceptions may not cross the parallel region,
// so anything thrown becomes a failing item.
std::vector<Item> run_batch(std::size_t n, const std::function<Item(std::size_t)>& f) {
    std::vector<Item> out(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
        } catch (const std::exception& e) {
            out[static_cast<std::size_t>(i)] =
                fail_item("item " + std::to_string(i) + " threw: " + e.what());
        } catch (...) {
            out[static_cast<std::size_t>(i)] =
                fail_item("item " + std::to_string(i) + " threw a non-standard exception");
        }
    }
    return out;
}

// Empty string when every item passed and at least `need_pass` did; the
// first few failure details otherwise.
std::string summarize(const std::vector<Item>& items, std::size_t need_pass,
                      const std::string& what) {
    std::size_t passes = 0;
    std::vector<std::string> fails;
    for (const Item& it : items) {
        if (it.status == ItemStatus::Pass) ++passes;
        else if (it.status == ItemStatus::Fail) fails.push_back(it.detail);
    }
    if (!fails.empty()) {
        std::string msg = fails.front();
        for (std::size_t i = 1; i < fails.size() && i < 3; ++i) msg += "; " + fails[i];
        if (fails.size() > 3) msg += " (+" + std::to_string(fails.size() - 3) + " more)";
        return msg;
    }
    if (passes < need_pass)
        return what + ": only " + std::to_string(passes) + " usable instances out of " +
               std::to_string(items.size()) + " attempts, needed " + std::to_string(need_pass);
    return "";
}

Evaluator make_evaluator() {
    EvalOptions opts;
    opts.budget = 512;
    return Evaluator(opts);
}

// 1. Solver regions equal exhaustive positional brute force, open games
// included via leaf assumptions.
std::string check_solver_vs_brute() {
    auto items = run_batch(1000, [](std::size_t i) -> Item {
        Rng rng(1000 + i);
        GameGenOptions opt;
        opt.max_vertices = 6;
        opt.max_priority = 4;
        if (i % 5 == 4) opt.label_count = 1 + static_cast<unsigned>(i % 2);
        ParityGame g = random_game(rng, opt);
        std::map<std::string, LeafAssumption> assume;
        for (const auto& [v, name] : g.var_label)
            if (!assume.count(name))
                assume[name] = rng.coin() ? LeafAssumption::Win : LeafAssumption::Lose;
        WinningRegions fast = zielonka_solve(g, assume);
        WinningRegions slow = testing::brute_force_regions(g, assume);
        if (fast.eva_region != slow.eva_region || fast.adam_region != slow.adam_region)
            return fail_item("seed " + std::to_string(1000 + i) +
                             ": solver and brute force disagree on the regions");
        return pass_item();
    });
    return summarize(items, items.size(), "solver vs brute force");
}

// 2. The translated term denotes a nonempty set exactly when Eva wins the
// initial vertex.
std::string check_emptiness() {
    auto items = run_batch(500, [](std::size_t i) -> Item {
        Rng rng(2000 + i);
        GameGenOptions opt;
        opt.max_vertices = 8;
        ParityGame g = random_game(rng, opt);
        bool eva_wins = zielonka_solve(g).eva_region.count(g.initial) == 1;
        Evaluator ev = make_evaluator();
        bool nonempty;
        try {
            SetValue v = ev.eval(game_to_term(g), {});
            nonempty = !v.finite || v.cardinality() > 0;
        } catch (const SizeError&) {
            // Kleene stages grow monotonically from the empty set, so only
            // a nonempty denotation can overrun the size cap.
            nonempty = true;
        }
        if (nonempty != eva_wins)
            return fail_item("seed " + std::to_string(2000 + i) + ": evaluator says " +
                             (nonempty ? "nonempty" : "empty") + " but the solver says Eva " +
                             (eva_wins ? "wins" : "loses"));
        return pass_item();
    });
    return summarize(items, items.size(), "emptiness");
}

// 3. Cardinality of the translated term counts Eva's deterministic winning
// strategies: exactly on acyclic games, and on cyclic games through the
// stabilized prefix count. Strictly growing prefix counts force an
// infinite denotation.
std::string check_strategy_counts() {
    auto acyclic = run_batch(200, [](std::size_t i) -> Item {
        Rng rng(3000 + i);
        GameGenOptions opt;
        opt.max_vertices = 6;
        opt.acyclic = true;
        ParityGame g = random_game(rng, opt);
        unsigned depth = static_cast<unsigned>(g.arena.vertices().size()) + 2;
        StabilizedCount sc = stabilized_count(g, depth);
        if (!sc.stabilized)
            return fail_item("seed " + std::to_string(3000 + i) +
                             ": acyclic game failed to stabilize");
        Evaluator ev = make_evaluator();
        SetValue v = ev.eval(game_to_term(g), {});
        if (!v.finite)
            return fail_item("seed " + std::to_string(3000 + i) +
                             ": acyclic game evaluated to an infinite set");
        if (v.cardinality() != sc.count)
            return fail_item("seed " + std::to_string(3000 + i) + ": strategy count " +
                             std::to_string(sc.count) + " but cardinality " +
                             std::to_string(v.cardinality()));
        return pass_item();
    });
    std::string res = summarize(acyclic, acyclic.size(), "acyclic counting");
    if (!res.empty()) return res;

    auto cyclic = run_batch(1000, [](std::size_t a) -> Item {
        Rng rng(3500 + a);
        GameGenOptions opt;
        opt.max_vertices = 6;
        ParityGame g = random_game(rng, opt);
        StabilizedCount sc;
        try {
            sc = stabilized_count(g, 12);
        } catch (const SizeError&) {
            // Counts overran the exact-arithmetic cap before depth 12; no
            // verdict either way.
            return skip_item();
        }
        Evaluator ev = make_evaluator();
        if (sc.stabilized) {
            SetValue v;
            try {
                v = ev.eval(game_to_term(g), {});
            } catch (const SizeError&) {
                return fail_item("seed " + std::to_string(3500 + a) +
                                 ": stabilized count but the evaluator overran its size cap");
            }
            if (!v.finite)
                return fail_item("seed " + std::to_string(3500 + a) +
                                 ": stabilized count but an infinite denotation");
            if (v.cardinality() != sc.count)
                return fail_item("seed " + std::to_string(3500 + a) + ": stabilized count " +
                                 std::to_string(sc.count) + " but cardinality " +
                                 std::to_string(v.cardinality()));
            return pass_item();
        }
        bool strictly_up = true;
        for (std::size_t d = 0; d + 1 < sc.counts.size(); ++d)
            if (sc.counts[d] >= sc.counts[d + 1]) {
                strictly_up = false;
                break;
            }
        if (strictly_up) {
            SetValue v = ev.eval(game_to_term(g), {});
            if (v.finite)
                return fail_item("seed " + std::to_string(3500 + a) +
                                 ": prefix counts grow strictly but the denotation is finite");
            // Verified, but not a stabilized sample.
            return skip_item();
        }
        return skip_item();
    });
    return summarize(cyclic, 200, "stabilized counting");
}

// 4. Simultaneous (vectorial) fixed points agree with the nested solutions
// componentwise, witnessed by comparison bijections.
std::string check_system_elimination(BinderKind kind, std::uint64_t seed_base,
                                     const std::string& what) {
    auto items = run_batch(900, [=](std::size_t a) -> Item {
        Rng rng(seed_base + a);
        SystemGenOptions so;
        so.kind = kind;
        EquationSystem sys = random_system(rng, so);
        Env env;
        std::map<std::string, std::size_t> sizes;
        for (const auto& p : sys.parameters) {
            std::size_t n = static_cast<std::size_t>(rng.range(1, 2));
            env[p] = atom_set(p, n);
            sizes[p] = n;
        }
        SolvedSystem solved = gaussian_eliminate(sys);
        std::vector<TermPtr> nested;
        for (const auto& eq : sys.equations) nested.push_back(solved.solution_for(eq.lhs));
        for (const auto& t : nested)
            if (finiteness_analysis(t, sizes).verdict == SizeVerdict::Infinite) return skip_item();
        Evaluator ev = make_evaluator();
        try {
            std::vector<FiniteSet> vec = ev.eval_system_vectorial(sys, env);
            std::vector<FiniteFunction> cmp = kind == BinderKind::Mu
                                                  ? ev.mu_comparison(sys, nested, env)
                                                  : ev.nu_comparison(sys, nested, env);
            for (std::size_t i = 0; i < nested.size(); ++i) {
                FiniteSet comp = ev.eval_finite(nested[i], env);
                if (vec[i].size() != comp.size())
                    return fail_item("seed " + std::to_string(seed_base + a) + " component " +
                                     std::to_string(i) + ": vectorial size " +
                                     std::to_string(vec[i].size()) + " but nested size " +
                                     std::to_string(comp.size()));
                if (!cmp[i].is_bijection())
                    return fail_item("seed " + std::to_string(seed_base + a) + " component " +
                                     std::to_string(i) + ": comparison map is not a bijection");
                const FiniteSet& dom = kind == BinderKind::Mu ? vec[i] : comp;
                const FiniteSet& cod = kind == BinderKind::Mu ? comp : vec[i];
                if (!(cmp[i].domain == dom) || !(cmp[i].codomain == cod))
                    return fail_item("seed " + std::to_string(seed_base + a) + " component " +
                                     std::to_string(i) + ": comparison endpoints are wrong");
            }
        } catch (const SizeError&) {
            return skip_item();
        } catch (const BudgetError&) {
            return skip_item();
        }
        return pass_item();
    });
    return summarize(items, 300, what);
}

// 5. Solving X = F(Y), Y = mu G(X, Y) and substituting back recovers
// mu Y. G(F(Y), Y), syntactically up to alpha and semantically.
std::string check_pairing() {
    auto items = run_batch(100, [](std::size_t i) -> Item {
        Rng rng(5000 + i);
        TermGenOptions fo;
        fo.max_depth = 3;
        fo.free_vars = {"Y", "P"};
        TermPtr f = random_term(rng, fo);
        TermGenOptions go;
        go.max_depth = 3;
        go.free_vars = {"X", "Y", "P"};
        TermPtr g = random_term(rng, go);
        SolvedSystem solved = pairing_forward(f, g);
        TermPtr back = pairing_backward(f, g, solved);
        TermPtr direct = Term::mu("Y", substitute(g, "X", f));
        if (!alpha_eq(back, direct))
            return fail_item("seed " + std::to_string(5000 + i) +
                             ": pairing round trip is not alpha-equal to the direct form");
        Env env{{"P", atom_set("P", 2)}};
        Evaluator ev = make_evaluator();
        SetValue vy = ev.eval(solved.solution_for("Y"), env);
        SetValue vd = ev.eval(direct, env);
        if (vy.finite != vd.finite)
            return fail_item("seed " + std::to_string(5000 + i) +
                             ": Y component and direct form disagree on finiteness");
        if (vy.finite && vy.cardinality() != vd.cardinality())
            return fail_item("seed " + std::to_string(5000 + i) + ": Y component has " +
                             std::to_string(vy.cardinality()) + " elements, direct form " +
                             std::to_string(vd.cardinality()));
        return pass_item();
    });
    return summarize(items, items.size(), "pairing");
}

// 6. Fold and unfold of a binder term are mutually inverse bijections
// between the carrier and the one-step unrolling.
std::string check_fold_unfold() {
    // Most generated roots are not binders and some denote infinite sets, so
    // the attempt pool is much larger than the 300 passing instances needed.
    auto items = run_batch(3000, [](std::size_t a) -> Item {
        Rng rng(6000 + a);
        TermGenOptions to;
        to.free_vars = {"A"};
        TermPtr t = random_term(rng, to);
        if (!t->is_binder()) return skip_item();
        std::size_t n = static_cast<std::size_t>(rng.range(1, 2));
        std::map<std::string, std::size_t> sizes{{"A", n}};
        if (finiteness_analysis(t, sizes).verdict == SizeVerdict::Infinite) return skip_item();
        Env env{{"A", atom_set("A", n)}};
        TermPtr unrolled = substitute(t->body(), t->name(), t);
        Evaluator ev = make_evaluator();
        try {
            FiniteFunction fd = ev.fold(t, env);
            FiniteFunction uf = ev.unfold(t, env);
            FiniteSet carrier = ev.eval_finite(t, env);
            FiniteSet unrolled_val = ev.eval_finite(unrolled, env);
            if (!fd.is_bijection() || !uf.is_bijection())
                return fail_item("seed " + std::to_string(6000 + a) +
                                 ": fold or unfold is not a bijection");
            if (!(fd.domain == unrolled_val) || !(fd.codomain == carrier) ||
                !(uf.domain == carrier) || !(uf.codomain == unrolled_val))
                return fail_item("seed " + std::to_string(6000 + a) +
                                 ": fold/unfold endpoints are wrong");
            if (!(fd.then(uf) == FiniteFunction::identity(unrolled_val)) ||
                !(uf.then(fd) == FiniteFunction::identity(carrier)))
                return fail_item("seed " + std::to_string(6000 + a) +
                                 ": fold and unfold are not mutually inverse");
            if (unrolled_val.size() != carrier.size())
                return fail_item("seed " + std::to_string(6000 + a) +
                                 ": unrolling changed the cardinality");
        } catch (const SizeError&) {
            return skip_item();
        } catch (const BudgetError&) {
            return skip_item();
        }
        return pass_item();
    });
    return summarize(items, 300, "fold/unfold");
}

// 7. The functorial action preserves identities and composition.
std::string check_functor_laws() {
    auto items = run_batch(1200, [](std::size_t a) -> Item {
        Rng rng(7000 + a);
        TermGenOptions to;
        to.free_vars = {"A"};
        TermPtr t = random_term(rng, to);
        std::map<std::string, std::size_t> s2{{"A", 2}}, s3{{"A", 3}};
        if (finiteness_analysis(t, s2).verdict == SizeVerdict::Infinite) return skip_item();
        if (finiteness_analysis(t, s3).verdict == SizeVerdict::Infinite) return skip_item();
        FiniteSet a2 = atom_set("A", 2);
        FiniteSet a3 = atom_set("A", 3);
        FiniteFunction u{a2, a3, {}};
        for (std::size_t k = 0; k < a2.size(); ++k)
            u.images.push_back(a3.elems()[rng.below(a3.size())]);
        FiniteFunction v{a3, a2, {}};
        for (std::size_t k = 0; k < a3.size(); ++k)
            v.images.push_back(a2.elems()[rng.below(a2.size())]);
        Evaluator ev = make_evaluator();
        try {
            FiniteFunction idlift =
                ev.eval_on_morphism(t, {{"A", FiniteFunction::identity(a2)}});
            if (!(idlift == FiniteFunction::identity(ev.eval_finite(t, Env{{"A", a2}}))))
                return fail_item("seed " + std::to_string(7000 + a) +
                                 ": identity does not lift to the identity");
            FiniteFunction lu = ev.eval_on_morphism(t, {{"A", u}});
            FiniteFunction lv = ev.eval_on_morphism(t, {{"A", v}});
            FiniteFunction luv = ev.eval_on_morphism(t, {{"A", u.then(v)}});
            if (!(lu.then(lv) == luv))
                return fail_item("seed " + std::to_string(7000 + a) +
                                 ": lifting does not commute with composition");
        } catch (const SizeError&) {
            return skip_item();
        } catch (const BudgetError&) {
            return skip_item();
        }
        return pass_item();
    });
    return summarize(items, 200, "functor laws");
}

// 8. Hand-computable denotations.
std::string check_closed_forms() {
    struct ClosedForm {
        const char* text;
        bool finite;
        std::size_t card;
    };
    const ClosedForm table[] = {
        {"(mu X (var X))", true, 0},
        {"(nu X (var X))", true, 1},
        {"(mu X (sum (prod) (var X)))", false, 0},
        {"(nu X (prod (var X) (var X)))", true, 1},
        {"(prod (sum (prod) (prod)) (sum (prod) (prod) (prod)))", true, 6},
    };
    Evaluator ev = make_evaluator();
    for (const ClosedForm& cf : table) {
        SetValue v = ev.eval(parse_term(cf.text), {});
        if (v.finite != cf.finite)
            return std::string(cf.text) + ": expected " + (cf.finite ? "finite" : "infinite") +
                   ", got the opposite";
        if (cf.finite && v.cardinality() != cf.card)
            return std::string(cf.text) + ": expected " + std::to_string(cf.card) +
                   " elements, got " + std::to_string(v.cardinality());
    }
    return "";
}

// 9. Every fixture reprints byte for byte.
std::string check_round_trips() {
    namespace fs = std::filesystem;
    auto check_dir = [](const char* sub, const char* ext,
                        const std::function<std::string(const std::string&)>& reprint,
                        std::size_t want) -> std::string {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(fs::path(FIXTURE_DIR) / sub))
            if (entry.path().extension() == ext) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.size() != want)
            return std::string(sub) + ": expected " + std::to_string(want) + " fixtures, found " +
                   std::to_string(files.size());
        for (const fs::path& p : files) {
            std::ifstream in(p, std::ios::binary);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            std::string again;
            try {
                again = reprint(text);
            } catch (const std::exception& e) {
                return p.filename().string() + ": " + e.what();
            }
            if (again != text) return p.filename().string() + " does not reprint byte-identically";
        }
        return "";
    };
    std::string res = check_dir(
        "pg", ".pg", [](const std::string& s) { return print_game(parse_game(s)); }, 25);
    if (!res.empty()) return res;
    return check_dir(
        "mu", ".mu", [](const std::string& s) { return print_term(parse_term(s)) + "\n"; }, 25);
}

} // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {"solver_matches_brute_force", check_solver_vs_brute},
        {"nonempty_iff_eva_wins", check_emptiness},
        {"cardinality_counts_strategies", check_strategy_counts},
        {"vectorial_matches_nested", [] {
             std::string r = check_system_elimination(BinderKind::Mu, 4000, "least fixed points");
             if (!r.empty()) return r;
             return check_system_elimination(BinderKind::Nu, 4500, "greatest fixed points");
         }},
        {"pairing_round_trip", check_pairing},
        {"fold_unfold_inverse", check_fold_unfold},
        {"functorial_action_laws", check_functor_laws},
        {"closed_form_values", check_closed_forms},
        {"format_round_trips", check_round_trips},
    };
    bool all_ok = true;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::string res;
        try {
            res = c.run();
        } catch (const std::exception& e) {
            res = std::string("unexpected exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (res.empty()) {
            std::printf("PASS %s (%.1fs)\n", c.name.c_str(), secs);
        } else {
            std::printf("FAIL %s: %s\n", c.name.c_str(), res.c_str());
            all_ok = false;
        }
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
