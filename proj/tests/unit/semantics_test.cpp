#include <doctest.h>

#include "mugame/bekic.hpp"
#include "mugame/error.hpp"
#include "mugame/generate.hpp"
#include "mugame/report.hpp"
#include "mugame/semantics.hpp"
#include "mugame/term.hpp"

#include <map>

using namespace mugame;

namespace {

SetValue ev(const std::string& src, const Env& env = {}) {
    Evaluator e;
    return e.eval(parse_term(src), env);
}

std::map<std::string, std::size_t> sizes_of(const Env& env) {
    std::map<std::string, std::size_t> out;
    for (const auto& [k, v] : env) out[k] = v.size();
    return out;
}

} // namespace

TEST_CASE("closed forms") {
    SUBCASE("mu X. X is empty") {
        SetValue v = ev("(mu X (var X))");
        REQUIRE(v.finite);
        CHECK(v.elements.empty());
    }
    SUBCASE("nu X. X is a singleton") {
        SetValue v = ev("(nu X (var X))");
        REQUIRE(v.finite);
        CHECK(v.elements.size() == 1);
    }
    SUBCASE("mu X. 1 + X is infinite with a growth certificate") {
        SetValue v = ev("(mu X (sum (prod) (var X)))");
        REQUIRE_FALSE(v.finite);
        CHECK_FALSE(v.certificate.empty());
    }
    SUBCASE("nu X. X * X is a singleton") {
        SetValue v = ev("(nu X (prod (var X) (var X)))");
        REQUIRE(v.finite);
        CHECK(v.elements.size() == 1);
        CHECK(v.elements.elems()[0]->kind() == ElemKind::NuTree);
    }
    SUBCASE("(1+1) * (1+1+1) has six elements in lexicographic order") {
        SetValue v = ev("(prod (sum (prod) (prod)) (sum (prod) (prod) (prod)))");
        REQUIRE(v.finite);
        REQUIRE(v.elements.size() == 6);
        unsigned expect[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}};
        for (std::size_t i = 0; i < 6; ++i) {
            const ElemPtr& e = v.elements.elems()[i];
            REQUIRE(e->kind() == ElemKind::Tuple);
            REQUIRE(e->components().size() == 2);
            CHECK(e->components()[0]->index() == expect[i][0]);
            CHECK(e->components()[1]->index() == expect[i][1]);
        }
    }
}

TEST_CASE("parameters evaluate to their sets") {
    Env env{{"A", atom_set("A", 3)}};
    SetValue v = ev("(var A)", env);
    REQUIRE(v.finite);
    CHECK(v.elements == atom_set("A", 3));
    CHECK_THROWS_AS(ev("(var B)", env), ValidationError);
}

TEST_CASE("finiteness analysis matches evaluation") {
    struct Case {
        const char* src;
        SizeVerdict verdict;
    };
    Case cases[] = {
        {"(mu X (var X))", SizeVerdict::Empty},
        {"(sum)", SizeVerdict::Empty},
        {"(prod (sum) (var A))", SizeVerdict::Empty},
        {"(prod)", SizeVerdict::NonemptyFinite},
        {"(nu X (var X))", SizeVerdict::NonemptyFinite},
        {"(mu X (sum (prod) (var X)))", SizeVerdict::Infinite},
        {"(nu X (sum (prod) (var X)))", SizeVerdict::Infinite},
        {"(nu X (prod (var X) (var X)))", SizeVerdict::NonemptyFinite},
        {"(mu X (sum (var A) (prod (var X) (var X))))", SizeVerdict::Infinite},
    };
    std::map<std::string, std::size_t> sizes{{"A", 2}};
    for (const Case& c : cases) {
        CAPTURE(c.src);
        CHECK(finiteness_analysis(parse_term(c.src), sizes).verdict == c.verdict);
    }

    SUBCASE("emptiness of a parameter depends on its size") {
        TermPtr t = parse_term("(mu X (sum (var A) (prod (var X) (var X))))");
        CHECK(finiteness_analysis(t, {{"A", 0}}).verdict == SizeVerdict::Empty);
        CHECK(finiteness_analysis(t, {{"A", 1}}).verdict == SizeVerdict::Infinite);
    }
}

TEST_CASE("evaluation is alpha invariant and environment-restricted") {
    Env env{{"A", atom_set("A", 2)}, {"Unused", atom_set("Unused", 3)}};
    SetValue a = ev("(mu X (sum (var A) (sum)))", env);
    SetValue b = ev("(mu Y (sum (var A) (sum)))", env);
    REQUIRE(a.finite);
    CHECK(a.elements == b.elements);
    CHECK(a.elements.size() == 2);
}

TEST_CASE("substitution commutes with evaluation") {
    // eval(t[s/X]) equals eval(t) in the environment binding X to eval(s)
    for (unsigned seed = 0; seed < 30; ++seed) {
        Rng rng(900 + seed);
        TermGenOptions sopt;
        sopt.max_depth = 2;
        sopt.free_vars = {"A"};
        TermPtr s = random_term(rng, sopt);
        TermGenOptions topt;
        topt.max_depth = 3;
        topt.free_vars = {"X", "A"};
        TermPtr t = random_term(rng, topt);

        Env env{{"A", atom_set("A", 2)}};
        if (finiteness_analysis(s, sizes_of(env)).verdict == SizeVerdict::Infinite) continue;
        Evaluator e;
        FiniteSet sval = e.eval_finite(s, env);
        TermPtr subst = substitute(t, "X", s);
        Env inner = env;
        inner["X"] = sval;
        if (finiteness_analysis(subst, sizes_of(env)).verdict == SizeVerdict::Infinite) {
            CHECK_FALSE(e.eval(t, inner).finite);
            continue;
        }
        CAPTURE(print_term(t));
        CAPTURE(print_term(s));
        CHECK(e.eval_finite(subst, env) == e.eval_finite(t, inner));
    }
}

TEST_CASE("fold and unfold are mutually inverse bijections") {
    SUBCASE("on an initial algebra") {
        TermPtr t = parse_term("(mu X (sum (prod) (prod (sum) (var X))))");
        Evaluator e;
        FiniteFunction f = e.fold(t, {});
        FiniteFunction u = e.unfold(t, {});
        REQUIRE(f.is_bijection());
        REQUIRE(u.is_bijection());
        CHECK(f.domain.size() == 1);
        CHECK(u.then(f) == FiniteFunction::identity(f.codomain));
        CHECK(f.then(u) == FiniteFunction::identity(f.domain));
        // fold's domain is the unrolled body, its codomain the carrier
        FiniteSet carrier = e.eval_finite(t, {});
        CHECK(f.codomain == carrier);
        FiniteSet unrolled = e.eval_finite(substitute(t->body(), t->name(), t), {});
        CHECK(f.domain == unrolled);
    }

    SUBCASE("on a final coalgebra over atoms") {
        Env env{{"A", atom_set("A", 2)}};
        TermPtr t = parse_term("(nu X (sum (var A) (prod (sum) (var X))))");
        Evaluator e;
        FiniteSet carrier = e.eval_finite(t, env);
        CHECK(carrier.size() == 2);
        FiniteFunction u = e.unfold(t, env);
        FiniteFunction f = e.fold(t, env);
        REQUIRE(u.is_bijection());
        CHECK(u.domain == carrier);
        CHECK(u.then(f) == FiniteFunction::identity(carrier));
        CHECK(f.then(u) == FiniteFunction::identity(u.codomain));
        // each branch of the sum is an A-atom; unfolding recovers it
        for (const ElemPtr& e2 : carrier.elems()) {
            REQUIRE(e2->kind() == ElemKind::NuTree);
            ElemPtr img = u.apply(e2);
            REQUIRE(img->kind() == ElemKind::Inj);
            CHECK(img->index() == 0);
            CHECK(img->child()->kind() == ElemKind::Atom);
        }
    }
}

TEST_CASE("functorial action on morphisms") {
    Env dom{{"A", atom_set("A", 2)}};
    Env cod{{"A", atom_set("B", 3)}};
    TermPtr t = parse_term("(sum (var A) (prod (var A) (var A)))");

    FiniteFunction swap_a;
    swap_a.domain = atom_set("A", 2);
    swap_a.codomain = atom_set("A", 2);
    swap_a.images = {Elem::atom("A", 1), Elem::atom("A", 0)};

    Evaluator e;
    SUBCASE("identity maps to identity") {
        FiniteFunction idm = FiniteFunction::identity(atom_set("A", 2));
        FiniteFunction lifted = e.eval_on_morphism(t, {{"A", idm}});
        CHECK(lifted == FiniteFunction::identity(e.eval_finite(t, dom)));
    }

    SUBCASE("composition is preserved") {
        FiniteFunction embed;
        embed.domain = atom_set("A", 2);
        embed.codomain = atom_set("B", 3);
        embed.images = {Elem::atom("B", 2), Elem::atom("B", 0)};

        FiniteFunction left = e.eval_on_morphism(t, {{"A", swap_a.then(embed)}});
        FiniteFunction right =
            e.eval_on_morphism(t, {{"A", swap_a}}).then(e.eval_on_morphism(t, {{"A", embed}}));
        CHECK(left == right);
        CHECK(left.domain == e.eval_finite(t, dom));
        CHECK(left.codomain == e.eval_finite(t, cod));
    }

    SUBCASE("bijections lift through binders") {
        TermPtr t2 = parse_term("(nu X (sum (var A) (prod (sum) (var X))))");
        FiniteFunction lifted = e.eval_on_morphism(t2, {{"A", swap_a}});
        CHECK(lifted.domain == e.eval_finite(t2, dom));
        CHECK(lifted.codomain == lifted.domain);
        CHECK(lifted.is_bijection());
        // the swap stays visible through the coalgebra wrapping
        for (const ElemPtr& el : lifted.domain.elems())
            CHECK_FALSE(elem_eq(lifted.apply(el), el));
    }
}

TEST_CASE("vectorial solutions agree with nested elimination") {
    SUBCASE("an all-mu pair") {
        EquationSystem sys = parse_equation_system("X1 =mu[1] (sum (prod) (sum))\n"
                                                   "X2 =mu[3] (sum (var X1) (var X1))\n");
        Evaluator e;
        std::vector<FiniteSet> vec = e.eval_system_vectorial(sys, {});
        REQUIRE(vec.size() == 2);
        CHECK(vec[0].size() == 1);
        CHECK(vec[1].size() == 2);

        SolvedSystem solved = gaussian_eliminate(sys);
        std::vector<TermPtr> nested;
        for (const auto& [var, term] : solved.solutions) nested.push_back(term);
        auto cmp = e.mu_comparison(sys, nested, {});
        REQUIRE(cmp.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(cmp[i].is_bijection());
            CHECK(cmp[i].domain == vec[i]);
            CHECK(cmp[i].codomain == e.eval_finite(nested[i], {}));
        }
    }

    SUBCASE("an all-nu pair") {
        EquationSystem sys = parse_equation_system("X1 =nu[2] (prod (var X2))\n"
                                                   "X2 =nu[4] (prod (var X1) (var X1))\n");
        Evaluator e;
        std::vector<FiniteSet> vec = e.eval_system_vectorial(sys, {});
        REQUIRE(vec.size() == 2);
        CHECK(vec[0].size() == 1);
        CHECK(vec[1].size() == 1);

        SolvedSystem solved = gaussian_eliminate(sys);
        std::vector<TermPtr> nested;
        for (const auto& [var, term] : solved.solutions) nested.push_back(term);
        auto cmp = e.nu_comparison(sys, nested, {});
        REQUIRE(cmp.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(cmp[i].is_bijection());
            CHECK(cmp[i].domain == e.eval_finite(nested[i], {}));
            CHECK(cmp[i].codomain == vec[i]);
        }
    }

    SUBCASE("mixed systems are rejected by the vectorial evaluator") {
        EquationSystem sys = parse_equation_system("X1 =mu[1] (sum)\n"
                                                   "X2 =nu[2] (prod (var X1))\n");
        Evaluator e;
        CHECK_THROWS_AS(e.eval_system_vectorial(sys, {}), ValidationError);
    }
}

TEST_CASE("resource limits") {
    SUBCASE("iteration budget") {
        EvalOptions opts;
        opts.budget = 1;
        Evaluator e(opts);
        CHECK_THROWS_AS(e.eval(parse_term("(mu X (sum (prod) (prod (sum) (var X))))"), {}),
                        BudgetError);
    }

    SUBCASE("set size cap") {
        EvalOptions opts;
        opts.max_set_size = 2;
        Evaluator e(opts);
        CHECK_THROWS_AS(e.eval(parse_term("(sum (prod) (prod) (prod))"), {}), SizeError);
    }
}

TEST_CASE("report serialization is stable") {
    SetValue v = ev("(prod (sum (prod) (prod)) (sum (prod) (prod) (prod)))");
    Json j = set_value_to_json(v);
    CHECK(j["verdict"] == "finite");
    CHECK(j["cardinality"] == 6);
    CHECK(j["elements"][0].dump() == R"(["tuple",["inj",0,["tuple"]],["inj",0,["tuple"]]])");

    SUBCASE("element cap suppresses listings") {
        Json capped = set_value_to_json(v, 5);
        CHECK_FALSE(capped.contains("elements"));
        CHECK(capped["cardinality"] == 6);
    }

    SUBCASE("infinite verdicts carry the certificate") {
        Json inf = set_value_to_json(ev("(mu X (sum (prod) (var X)))"));
        CHECK(inf["verdict"] == "infinite");
        CHECK(inf.contains("certificate"));
    }
}
