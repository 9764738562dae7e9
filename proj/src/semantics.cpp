#include "mugame/semantics.hpp"

#include "analysis_internal.hpp"
#include "mugame/error.hpp"

#include <algorithm>
#include <functional>
#include <utility>

namespace mugame {

namespace {

std::size_t hash_mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

ElemPtr elem_identity(const ElemPtr& e) { return e; }

} // namespace

Elem::Elem(ElemKind kind, std::string param, std::uint32_t index, std::vector<ElemPtr> children)
    : kind_(kind), param_(std::move(param)), index_(index), children_(std::move(children)) {
    std::size_t h = hash_mix(17, static_cast<std::size_t>(kind_));
    h = hash_mix(h, std::hash<std::string>{}(param_));
    h = hash_mix(h, index_);
    for (const auto& c : children_) h = hash_mix(h, c->hash());
    hash_ = h;
}

ElemPtr Elem::atom(const std::string& param, std::uint32_t index) {
    if (param.empty()) throw InternalError("atom with empty parameter name");
    return ElemPtr(new Elem(ElemKind::Atom, param, index, {}));
}

ElemPtr Elem::star() {
    static const ElemPtr s(new Elem(ElemKind::Star, "", 0, {}));
    return s;
}

ElemPtr Elem::tuple(std::vector<ElemPtr> components) {
    for (const auto& c : components)
        if (!c) throw InternalError("tuple with null component");
    return ElemPtr(new Elem(ElemKind::Tuple, "", 0, std::move(components)));
}

ElemPtr Elem::inj(std::uint32_t tag, ElemPtr value) {
    if (!value) throw InternalError("inj with null payload");
    return ElemPtr(new Elem(ElemKind::Inj, "", tag, {std::move(value)}));
}

ElemPtr Elem::fold(ElemPtr value) {
    if (!value) throw InternalError("fold with null payload");
    return ElemPtr(new Elem(ElemKind::Fold, "", 0, {std::move(value)}));
}

ElemPtr Elem::nu_tree(ElemPtr stage) {
    if (!stage) throw InternalError("nu_tree with null payload");
    return ElemPtr(new Elem(ElemKind::NuTree, "", 0, {std::move(stage)}));
}

int compare_elems(const ElemPtr& a, const ElemPtr& b) {
    if (a == b) return 0;
    if (!a || !b) throw InternalError("compare_elems: null element");
    if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
    switch (a->kind()) {
        case ElemKind::Atom: {
            if (int c = a->param().compare(b->param())) return c < 0 ? -1 : 1;
            if (a->index() != b->index()) return a->index() < b->index() ? -1 : 1;
            return 0;
        }
        case ElemKind::Star:
            return 0;
        case ElemKind::Inj: {
            if (a->index() != b->index()) return a->index() < b->index() ? -1 : 1;
            return compare_elems(a->child(), b->child());
        }
        case ElemKind::Tuple: {
            const auto& xs = a->components();
            const auto& ys = b->components();
            if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
            for (std::size_t i = 0; i < xs.size(); ++i)
                if (int c = compare_elems(xs[i], ys[i])) return c;
            return 0;
        }
        case ElemKind::Fold:
        case ElemKind::NuTree:
            return compare_elems(a->child(), b->child());
    }
    throw InternalError("compare_elems: unknown element kind");
}

bool elem_eq(const ElemPtr& a, const ElemPtr& b) {
    if (a == b) return true;
    if (a && b && a->hash() != b->hash()) return false;
    return compare_elems(a, b) == 0;
}

bool elem_less(const ElemPtr& a, const ElemPtr& b) { return compare_elems(a, b) < 0; }

std::string print_elem(const ElemPtr& e) {
    if (!e) throw InternalError("print_elem: null element");
    switch (e->kind()) {
        case ElemKind::Atom: return e->param() + "#" + std::to_string(e->index());
        case ElemKind::Star: return "*";
        case ElemKind::Tuple: {
            std::string s = "(";
            for (std::size_t i = 0; i < e->components().size(); ++i) {
                if (i) s += ",";
                s += print_elem(e->components()[i]);
            }
            return s + ")";
        }
        case ElemKind::Inj:
            return "in" + std::to_string(e->index()) + "(" + print_elem(e->child()) + ")";
        case ElemKind::Fold: return "fold(" + print_elem(e->child()) + ")";
        case ElemKind::NuTree: return "tree(" + print_elem(e->child()) + ")";
    }
    throw InternalError("print_elem: unknown element kind");
}

FiniteSet FiniteSet::from_vector(std::vector<ElemPtr> elems) {
    std::sort(elems.begin(), elems.end(), elem_less);
    elems.erase(std::unique(elems.begin(), elems.end(), elem_eq), elems.end());
    FiniteSet s;
    s.elems_ = std::move(elems);
    return s;
}

FiniteSet FiniteSet::from_sorted(std::vector<ElemPtr> elems) {
    for (std::size_t i = 1; i < elems.size(); ++i)
        if (compare_elems(elems[i - 1], elems[i]) >= 0)
            throw InternalError("from_sorted: sequence is not strictly ascending");
    FiniteSet s;
    s.elems_ = std::move(elems);
    return s;
}

bool FiniteSet::contains(const ElemPtr& e) const { return index_of(e) != npos; }

std::size_t FiniteSet::index_of(const ElemPtr& e) const {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), e, elem_less);
    if (it == elems_.end() || !elem_eq(*it, e)) return npos;
    return static_cast<std::size_t>(it - elems_.begin());
}

bool FiniteSet::subset_of(const FiniteSet& other) const {
    std::size_t j = 0;
    for (const auto& e : elems_) {
        while (j < other.elems_.size() && elem_less(other.elems_[j], e)) ++j;
        if (j == other.elems_.size() || !elem_eq(other.elems_[j], e)) return false;
        ++j;
    }
    return true;
}

bool FiniteSet::operator==(const FiniteSet& other) const {
    if (elems_.size() != other.elems_.size()) return false;
    for (std::size_t i = 0; i < elems_.size(); ++i)
        if (!elem_eq(elems_[i], other.elems_[i])) return false;
    return true;
}

FiniteSet atom_set(const std::string& name, std::size_t n) {
    std::vector<ElemPtr> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(Elem::atom(name, static_cast<std::uint32_t>(i)));
    return FiniteSet::from_sorted(std::move(out));
}

std::size_t SetValue::cardinality() const {
    if (!finite) throw ValidationError("cardinality of a non-finite value");
    return elements.size();
}

ElemPtr FiniteFunction::apply(const ElemPtr& e) const {
    std::size_t i = domain.index_of(e);
    if (i == FiniteSet::npos) throw ValidationError("apply: element outside the domain");
    return images.at(i);
}

bool FiniteFunction::is_bijection() const {
    if (images.size() != domain.size()) throw InternalError("function table size mismatch");
    if (domain.size() != codomain.size()) return false;
    std::vector<bool> hit(codomain.size(), false);
    for (const auto& im : images) {
        std::size_t j = codomain.index_of(im);
        if (j == FiniteSet::npos) throw InternalError("function image outside the codomain");
        if (hit[j]) return false;
        hit[j] = true;
    }
    return true;
}

FiniteFunction FiniteFunction::inverse() const {
    if (!is_bijection()) throw ValidationError("inverse of a non-bijection");
    std::vector<ElemPtr> inv(codomain.size());
    for (std::size_t i = 0; i < images.size(); ++i)
        inv[codomain.index_of(images[i])] = domain.elems()[i];
    return {codomain, domain, std::move(inv)};
}

FiniteFunction FiniteFunction::then(const FiniteFunction& g) const {
    if (!(codomain == g.domain)) throw ValidationError("composition through mismatched sets");
    std::vector<ElemPtr> comp;
    comp.reserve(images.size());
    for (const auto& im : images) comp.push_back(g.apply(im));
    return {domain, g.codomain, std::move(comp)};
}

FiniteFunction FiniteFunction::identity(const FiniteSet& s) { return {s, s, s.elems()}; }

bool FiniteFunction::operator==(const FiniteFunction& other) const {
    if (!(domain == other.domain) || !(codomain == other.codomain)) return false;
    if (images.size() != other.images.size()) return false;
    for (std::size_t i = 0; i < images.size(); ++i)
        if (!elem_eq(images[i], other.images[i])) return false;
    return true;
}

std::size_t Evaluator::MemoKeyHash::operator()(const MemoKey& k) const {
    std::size_t h = std::hash<const void*>{}(k.term);
    for (const auto& [name, set] : k.env) {
        h = hash_mix(h, std::hash<std::string>{}(name));
        h = hash_mix(h, set.size());
        for (const auto& e : set.elems()) h = hash_mix(h, e->hash());
    }
    return h;
}

bool Evaluator::MemoKeyEq::operator()(const MemoKey& a, const MemoKey& b) const {
    if (a.term != b.term || a.env.size() != b.env.size()) return false;
    for (std::size_t i = 0; i < a.env.size(); ++i) {
        if (a.env[i].first != b.env[i].first) return false;
        if (!(a.env[i].second == b.env[i].second)) return false;
    }
    return true;
}

Evaluator::MemoKey Evaluator::memo_key(const TermPtr& t, const Env& env) const {
    MemoKey k;
    k.term = t.get();
    // free_names() is already sorted, so the key needs no extra sort.
    for (const auto& v : t->free_names()) {
        auto it = env.find(v);
        if (it == env.end()) throw InternalError("memo key: unbound variable " + v);
        k.env.emplace_back(v, it->second);
    }
    return k;
}

void Evaluator::check_cap(std::size_t n) const {
    if (n > opts_.max_set_size)
        throw SizeError("set of size " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(opts_.max_set_size));
}

bool Evaluator::pruned_inhabited(const TermPtr& t,
                                 const std::map<std::string, std::uint8_t>& aenv) {
    std::pair<const Term*, std::vector<std::pair<std::string, std::uint8_t>>> key;
    key.first = t.get();
    for (const auto& v : t->free_names()) {
        auto it = aenv.find(v);
        if (it == aenv.end()) throw InternalError("pruning: unbound variable " + v);
        key.second.emplace_back(v, it->second);
    }
    if (auto hit = inhabited_cache_.find(key); hit != inhabited_cache_.end()) return hit->second;
    detail::AbsEnv restricted;
    for (const auto& [name, size] : key.second)
        restricted[name] = static_cast<detail::AbsSize>(size);
    bool res = detail::abs_inhabited(t, restricted);
    inhabited_cache_.emplace(std::move(key), res);
    return res;
}

SetValue Evaluator::eval(const TermPtr& t, const Env& env) {
    if (!t) throw ValidationError("eval: null term");
    std::map<std::string, std::size_t> sizes;
    for (const auto& v : free_vars(t)) {
        auto it = env.find(v);
        if (it == env.end()) throw ValidationError("eval: no binding for free variable " + v);
        sizes[v] = it->second.size();
    }
    AnalysisResult a = finiteness_analysis(t, sizes);
    if (a.verdict == SizeVerdict::Infinite) return {false, FiniteSet{}, a.certificate};
    // Caches key on node addresses, so the root must outlive them.
    retained_.push_back(t);
    return {true, eval_set(t, env), ""};
}

FiniteSet Evaluator::eval_finite(const TermPtr& t, const Env& env) {
    SetValue v = eval(t, env);
    if (!v.finite) throw ValidationError("term denotes an infinite set: " + v.certificate);
    return std::move(v.elements);
}

FiniteSet Evaluator::eval_set(const TermPtr& t, const Env& env) {
    switch (t->kind()) {
        case TermKind::Var: {
            auto it = env.find(t->name());
            if (it == env.end()) throw InternalError("eval: unbound variable " + t->name());
            return it->second;
        }
        case TermKind::Prod: {
            const auto& kids = t->children();
            // A dead factor annihilates the product. Checking emptiness up
            // front keeps the siblings unevaluated; one of them may not
            // even have a finite value.
            std::map<std::string, std::uint8_t> aenv;
            for (const auto& [name, set] : env)
                aenv[name] = static_cast<std::uint8_t>(detail::abs_of_count(set.size()));
            for (const auto& c : kids)
                if (!pruned_inhabited(c, aenv)) return FiniteSet{};
            std::vector<FiniteSet> parts;
            parts.reserve(kids.size());
            std::size_t total = 1;
            for (const auto& c : kids) {
                parts.push_back(eval_set(c, env));
                std::size_t sz = parts.back().size();
                if (sz == 0) throw InternalError("eval: factor pruned as inhabited came back empty");
                if (total > opts_.max_set_size / sz)
                    throw SizeError("product exceeds the set size cap of " +
                                    std::to_string(opts_.max_set_size));
                total *= sz;
            }
            std::vector<ElemPtr> out;
            out.reserve(total);
            std::vector<std::size_t> idx(kids.size(), 0);
            for (std::size_t n = 0; n < total; ++n) {
                std::vector<ElemPtr> comps(kids.size());
                for (std::size_t i = 0; i < kids.size(); ++i) comps[i] = parts[i].elems()[idx[i]];
                out.push_back(Elem::tuple(std::move(comps)));
                for (std::size_t i = kids.size(); i-- > 0;) {
                    if (++idx[i] < parts[i].size()) break;
                    idx[i] = 0;
                }
            }
            // last index moves fastest, so tuples come out in order
            return FiniteSet::from_sorted(std::move(out));
        }
        case TermKind::Coprod: {
            const auto& kids = t->children();
            std::vector<ElemPtr> out;
            for (std::size_t tag = 0; tag < kids.size(); ++tag) {
                FiniteSet part = eval_set(kids[tag], env);
                check_cap(out.size() + part.size());
                for (const auto& e : part.elems())
                    out.push_back(Elem::inj(static_cast<std::uint32_t>(tag), e));
            }
            // tags ascend and each block is sorted
            return FiniteSet::from_sorted(std::move(out));
        }
        case TermKind::Mu:
            return eval_mu(t, env);
        case TermKind::Nu:
            return eval_nu(t, env);
    }
    throw InternalError("eval: unknown term kind");
}

FiniteSet Evaluator::eval_mu(const TermPtr& t, const Env& env) {
    MemoKey key = memo_key(t, env);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    FiniteSet cur;
    for (unsigned step = 1; step <= opts_.budget; ++step) {
        Env sub = env;
        sub[t->name()] = cur;
        FiniteSet body = eval_set(t->body(), sub);
        std::vector<ElemPtr> wrapped;
        wrapped.reserve(body.size());
        for (const auto& e : body.elems()) wrapped.push_back(Elem::fold(e));
        FiniteSet next = FiniteSet::from_sorted(std::move(wrapped));
        check_cap(next.size());
        if (!cur.subset_of(next)) throw InternalError("mu chain is not monotone");
        if (next == cur) {
            memo_.emplace(std::move(key), cur);
            retained_.push_back(t);
            return cur;
        }
        cur = std::move(next);
    }
    throw BudgetError("mu chain for " + t->name() + " did not stabilize within " +
                      std::to_string(opts_.budget) + " steps");
}

FiniteSet Evaluator::eval_nu(const TermPtr& t, const Env& env) {
    MemoKey key = memo_key(t, env);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto chain = nu_chain(t, env, 0);
    std::vector<ElemPtr> wrapped;
    wrapped.reserve(chain->stages[chain->stab].size());
    for (const auto& e : chain->stages[chain->stab].elems()) wrapped.push_back(Elem::nu_tree(e));
    FiniteSet carrier = FiniteSet::from_sorted(std::move(wrapped));
    memo_.emplace(std::move(key), carrier);
    retained_.push_back(t);
    return carrier;
}

void Evaluator::chain_step(NuChain& chain, const TermPtr& t, const Env& env) {
    std::size_t k = chain.proj.size();
    if (chain.stages.size() != k + 1) throw InternalError("nu chain shape broken");
    Env sub = env;
    sub[t->name()] = chain.stages[k];
    FiniteSet next = eval_set(t->body(), sub);
    check_cap(next.size());
    std::vector<ElemPtr> images;
    images.reserve(next.size());
    if (k == 0) {
        for (std::size_t i = 0; i < next.size(); ++i) images.push_back(Elem::star());
    } else {
        VarMaps vm;
        for (const auto& v : t->body()->free_names())
            if (v != t->name()) vm[v] = elem_identity;
        const FiniteFunction& prev = chain.proj[k - 1];
        vm[t->name()] = [&prev](const ElemPtr& e) { return prev.apply(e); };
        Env dsub = env;
        dsub[t->name()] = chain.stages[k];
        Env csub = env;
        csub[t->name()] = chain.stages[k - 1];
        for (const auto& e : next.elems()) {
            ElemPtr img = map_elem(t->body(), e, vm, dsub, csub);
            if (!chain.stages[k].contains(img))
                throw InternalError("nu projection left its stage");
            images.push_back(img);
        }
    }
    chain.proj.push_back(FiniteFunction{next, chain.stages[k], std::move(images)});
    chain.stages.push_back(std::move(next));
}

std::shared_ptr<Evaluator::NuChain> Evaluator::nu_chain(const TermPtr& t, const Env& env,
                                                        std::size_t min_proj) {
    MemoKey key = memo_key(t, env);
    std::shared_ptr<NuChain> chain;
    if (auto it = nu_memo_.find(key); it != nu_memo_.end()) {
        chain = it->second;
    } else {
        chain = std::make_shared<NuChain>();
        chain->stages.push_back(FiniteSet::from_sorted({Elem::star()}));
        // run to the first bijective projection past stage zero; the seed
        // projection onto the singleton is never accepted, otherwise a
        // one-element body would freeze the chain too early
        for (;;) {
            if (chain->proj.size() >= opts_.budget)
                throw BudgetError("nu chain for " + t->name() + " did not stabilize within " +
                                  std::to_string(opts_.budget) + " stages");
            chain_step(*chain, t, env);
            std::size_t k = chain->proj.size() - 1;
            if (k >= 1 && chain->proj[k].is_bijection()) {
                chain->stab = k;
                break;
            }
        }
        nu_memo_.emplace(std::move(key), chain);
        retained_.push_back(t);
    }
    while (chain->proj.size() < min_proj) {
        chain_step(*chain, t, env);
        if (!chain->proj.back().is_bijection())
            throw InternalError("nu chain lost bijectivity past its stabilization point");
    }
    return chain;
}

ElemPtr Evaluator::map_elem(const TermPtr& t, const ElemPtr& e, const VarMaps& vm,
                            const Env& dom_env, const Env& cod_env) {
    switch (t->kind()) {
        case TermKind::Var: {
            auto it = vm.find(t->name());
            if (it == vm.end()) throw InternalError("map_elem: no map for variable " + t->name());
            return it->second(e);
        }
        case TermKind::Prod: {
            const auto& kids = t->children();
            if (e->kind() != ElemKind::Tuple || e->components().size() != kids.size())
                throw InternalError("map_elem: element does not match the product shape");
            std::vector<ElemPtr> comps;
            comps.reserve(kids.size());
            for (std::size_t i = 0; i < kids.size(); ++i)
                comps.push_back(map_elem(kids[i], e->components()[i], vm, dom_env, cod_env));
            return Elem::tuple(std::move(comps));
        }
        case TermKind::Coprod: {
            const auto& kids = t->children();
            if (e->kind() != ElemKind::Inj || e->index() >= kids.size())
                throw InternalError("map_elem: element does not match the coproduct shape");
            return Elem::inj(e->index(), map_elem(kids[e->index()], e->child(), vm, dom_env, cod_env));
        }
        case TermKind::Mu: {
            if (e->kind() != ElemKind::Fold)
                throw InternalError("map_elem: mu element is not a fold");
            Env dsub = dom_env;
            dsub[t->name()] = eval_set(t, dom_env);
            Env csub = cod_env;
            csub[t->name()] = eval_set(t, cod_env);
            VarMaps vm2 = vm;
            vm2[t->name()] = [this, &t, &vm, &dom_env, &cod_env](const ElemPtr& u) {
                return map_elem(t, u, vm, dom_env, cod_env);
            };
            return Elem::fold(map_elem(t->body(), e->child(), vm2, dsub, csub));
        }
        case TermKind::Nu: {
            if (e->kind() != ElemKind::NuTree)
                throw InternalError("map_elem: nu element is not a stage tree");
            auto chain_d = nu_chain(t, dom_env, 0);
            auto chain_c = nu_chain(t, cod_env, 0);
            std::size_t top = std::max(chain_d->stab, chain_c->stab);
            nu_chain(t, dom_env, top);
            nu_chain(t, cod_env, top);
            // lift the tree to the common stage through inverted projections
            ElemPtr s = e->child();
            for (std::size_t k = chain_d->stab; k < top; ++k) {
                const FiniteFunction& p = chain_d->proj[k];
                std::size_t at = FiniteSet::npos;
                for (std::size_t i = 0; i < p.images.size(); ++i)
                    if (elem_eq(p.images[i], s)) {
                        at = i;
                        break;
                    }
                if (at == FiniteSet::npos)
                    throw InternalError("map_elem: stage tree has no preimage");
                s = p.domain.elems()[at];
            }
            // stage-indexed action, constant on stage zero
            std::function<ElemPtr(std::size_t, const ElemPtr&)> act =
                [&](std::size_t k, const ElemPtr& x) -> ElemPtr {
                if (k == 0) return Elem::star();
                VarMaps vm2 = vm;
                vm2[t->name()] = [&act, k](const ElemPtr& y) { return act(k - 1, y); };
                Env dsub = dom_env;
                dsub[t->name()] = chain_d->stages[k - 1];
                Env csub = cod_env;
                csub[t->name()] = chain_c->stages[k - 1];
                return map_elem(t->body(), x, vm2, dsub, csub);
            };
            ElemPtr r = act(top, s);
            for (std::size_t k = top; k-- > chain_c->stab;) r = chain_c->proj[k].apply(r);
            if (!chain_c->stages[chain_c->stab].contains(r))
                throw InternalError("map_elem: nu image left its stage");
            return Elem::nu_tree(r);
        }
    }
    throw InternalError("map_elem: unknown term kind");
}

FiniteFunction Evaluator::eval_on_morphism(const TermPtr& t,
                                           const std::map<std::string, FiniteFunction>& var_maps) {
    if (!t) throw ValidationError("eval_on_morphism: null term");
    Env dom_env;
    Env cod_env;
    for (const auto& [v, f] : var_maps) {
        if (f.images.size() != f.domain.size())
            throw ValidationError("eval_on_morphism: malformed function for " + v);
        for (const auto& im : f.images)
            if (!f.codomain.contains(im))
                throw ValidationError("eval_on_morphism: image outside the codomain for " + v);
        dom_env[v] = f.domain;
        cod_env[v] = f.codomain;
    }
    for (const auto& v : free_vars(t))
        if (!var_maps.count(v))
            throw ValidationError("eval_on_morphism: no map for free variable " + v);
    FiniteSet dom = eval_finite(t, dom_env);
    FiniteSet cod = eval_finite(t, cod_env);
    VarMaps vm;
    for (const auto& [v, f] : var_maps)
        vm[v] = [fp = &f](const ElemPtr& e) { return fp->apply(e); };
    std::vector<ElemPtr> images;
    images.reserve(dom.size());
    for (const auto& e : dom.elems()) {
        ElemPtr r = map_elem(t, e, vm, dom_env, cod_env);
        if (!cod.contains(r)) throw InternalError("morphism image outside the codomain");
        images.push_back(r);
    }
    return {std::move(dom), std::move(cod), std::move(images)};
}

FiniteFunction Evaluator::fold(const TermPtr& t, const Env& env) {
    if (!t || !t->is_binder()) throw ValidationError("fold: term is not a binder");
    if (t->kind() == TermKind::Nu) return unfold(t, env).inverse();
    FiniteSet carrier = eval_finite(t, env);
    TermPtr unrolled = substitute(t->body(), t->name(), t);
    FiniteSet dom = eval_finite(unrolled, env);
    std::vector<ElemPtr> images;
    images.reserve(dom.size());
    for (const auto& e : dom.elems()) {
        ElemPtr v = Elem::fold(e);
        if (!carrier.contains(v)) throw InternalError("fold image outside the carrier");
        images.push_back(v);
    }
    return {std::move(dom), std::move(carrier), std::move(images)};
}

FiniteFunction Evaluator::unfold(const TermPtr& t, const Env& env) {
    if (!t || !t->is_binder()) throw ValidationError("unfold: term is not a binder");
    if (t->kind() == TermKind::Mu) return fold(t, env).inverse();
    FiniteSet carrier = eval_finite(t, env);
    TermPtr unrolled = substitute(t->body(), t->name(), t);
    FiniteSet cod = eval_finite(unrolled, env);
    auto chain = nu_chain(t, env, 0);
    FiniteFunction up = chain->proj[chain->stab].inverse();
    VarMaps vm;
    for (const auto& v : free_vars(t->body()))
        if (v != t->name()) vm[v] = elem_identity;
    vm[t->name()] = [](const ElemPtr& u) { return Elem::nu_tree(u); };
    Env dsub = env;
    dsub[t->name()] = chain->stages[chain->stab];
    Env csub = env;
    csub[t->name()] = carrier;
    std::vector<ElemPtr> images;
    images.reserve(carrier.size());
    for (const auto& v : carrier.elems()) {
        ElemPtr lifted = up.apply(v->child());
        ElemPtr out = map_elem(t->body(), lifted, vm, dsub, csub);
        if (!cod.contains(out)) throw InternalError("unfold image outside the unrolled set");
        images.push_back(out);
    }
    return {std::move(carrier), std::move(cod), std::move(images)};
}

std::vector<FiniteSet> Evaluator::vec_mu_carriers(const EquationSystem& sys, const Env& env) {
    std::size_t n = sys.equations.size();
    std::vector<FiniteSet> cur(n);
    for (unsigned step = 1; step <= opts_.budget; ++step) {
        Env sub = env;
        for (std::size_t i = 0; i < n; ++i) sub[sys.equations[i].lhs] = cur[i];
        std::vector<FiniteSet> next(n);
        bool stable = true;
        for (std::size_t i = 0; i < n; ++i) {
            FiniteSet body = eval_set(sys.equations[i].rhs, sub);
            std::vector<ElemPtr> wrapped;
            wrapped.reserve(body.size());
            for (const auto& e : body.elems()) wrapped.push_back(Elem::fold(e));
            next[i] = FiniteSet::from_sorted(std::move(wrapped));
            check_cap(next[i].size());
            if (!cur[i].subset_of(next[i])) throw InternalError("vectorial mu chain is not monotone");
            if (!(next[i] == cur[i])) stable = false;
        }
        if (stable) return cur;
        cur = std::move(next);
    }
    throw BudgetError("vectorial mu chain did not stabilize within " +
                      std::to_string(opts_.budget) + " steps");
}

Evaluator::VecNuChain Evaluator::vec_nu_chain(const EquationSystem& sys, const Env& env) {
    std::size_t n = sys.equations.size();
    VecNuChain c;
    c.stages.assign(n, {FiniteSet::from_sorted({Elem::star()})});
    c.proj.assign(n, {});
    for (std::size_t k = 0;; ++k) {
        if (k >= opts_.budget)
            throw BudgetError("vectorial nu chain did not stabilize within " +
                              std::to_string(opts_.budget) + " stages");
        Env sub = env;
        for (std::size_t i = 0; i < n; ++i) sub[sys.equations[i].lhs] = c.stages[i][k];
        std::vector<FiniteSet> fresh(n);
        for (std::size_t i = 0; i < n; ++i) {
            fresh[i] = eval_set(sys.equations[i].rhs, sub);
            check_cap(fresh[i].size());
        }
        bool all_bij = true;
        for (std::size_t i = 0; i < n; ++i) {
            const TermPtr& rhs = sys.equations[i].rhs;
            std::vector<ElemPtr> images;
            images.reserve(fresh[i].size());
            if (k == 0) {
                for (std::size_t m = 0; m < fresh[i].size(); ++m) images.push_back(Elem::star());
            } else {
                VarMaps vm;
                for (const auto& v : free_vars(rhs)) vm[v] = elem_identity;
                for (std::size_t j = 0; j < n; ++j) {
                    const FiniteFunction* prev = &c.proj[j][k - 1];
                    vm[sys.equations[j].lhs] = [prev](const ElemPtr& e) { return prev->apply(e); };
                }
                Env dsub = env;
                Env csub = env;
                for (std::size_t j = 0; j < n; ++j) {
                    dsub[sys.equations[j].lhs] = c.stages[j][k];
                    csub[sys.equations[j].lhs] = c.stages[j][k - 1];
                }
                for (const auto& e : fresh[i].elems()) {
                    ElemPtr img = map_elem(rhs, e, vm, dsub, csub);
                    if (!c.stages[i][k].contains(img))
                        throw InternalError("vectorial nu projection left its stage");
                    images.push_back(img);
                }
            }
            c.proj[i].push_back(FiniteFunction{fresh[i], c.stages[i][k], std::move(images)});
            if (!c.proj[i][k].is_bijection()) all_bij = false;
        }
        for (std::size_t i = 0; i < n; ++i) c.stages[i].push_back(std::move(fresh[i]));
        if (k >= 1 && all_bij) {
            c.stab = k;
            return c;
        }
    }
}

std::vector<FiniteSet> Evaluator::eval_system_vectorial(const EquationSystem& sys, const Env& env) {
    validate_system(sys);
    if (sys.equations.empty()) return {};
    bool all_mu = true;
    bool all_nu = true;
    for (const auto& eq : sys.equations) {
        all_mu = all_mu && eq.kind == BinderKind::Mu;
        all_nu = all_nu && eq.kind == BinderKind::Nu;
    }
    if (!all_mu && !all_nu)
        throw ValidationError("vectorial evaluation needs an all-mu or all-nu system");
    for (const auto& p : sys.parameters)
        if (!env.count(p)) throw ValidationError("vectorial evaluation: no binding for parameter " + p);
    if (all_mu) return vec_mu_carriers(sys, env);
    VecNuChain c = vec_nu_chain(sys, env);
    std::vector<FiniteSet> out(sys.equations.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::vector<ElemPtr> wrapped;
        wrapped.reserve(c.stages[i][c.stab].size());
        for (const auto& e : c.stages[i][c.stab].elems()) wrapped.push_back(Elem::nu_tree(e));
        out[i] = FiniteSet::from_sorted(std::move(wrapped));
    }
    return out;
}

std::vector<FiniteFunction> Evaluator::mu_comparison(const EquationSystem& sys,
                                                     const std::vector<TermPtr>& nested,
                                                     const Env& env) {
    validate_system(sys);
    std::size_t n = sys.equations.size();
    if (nested.size() != n) throw ValidationError("mu_comparison: solution count mismatch");
    for (const auto& eq : sys.equations)
        if (eq.kind != BinderKind::Mu) throw ValidationError("mu_comparison needs an all-mu system");
    std::vector<FiniteSet> vec = eval_system_vectorial(sys, env);
    std::vector<FiniteSet> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = eval_finite(nested[i], env);
    Env dsub = env;
    Env csub = env;
    for (std::size_t i = 0; i < n; ++i) {
        dsub[sys.equations[i].lhs] = vec[i];
        csub[sys.equations[i].lhs] = comp[i];
    }
    // peel one fold, push the body element through the rhs action, rewrap;
    // lands in the nested carrier because the nested solutions satisfy the
    // system up to literal equality of denotations
    std::vector<std::map<ElemPtr, ElemPtr, ElemLess>> cache(n);
    std::function<ElemPtr(std::size_t, const ElemPtr&)> eta =
        [&](std::size_t i, const ElemPtr& v) -> ElemPtr {
        if (auto hit = cache[i].find(v); hit != cache[i].end()) return hit->second;
        if (v->kind() != ElemKind::Fold) throw InternalError("mu_comparison: element is not a fold");
        VarMaps vm;
        for (const auto& fv : free_vars(sys.equations[i].rhs)) vm[fv] = elem_identity;
        for (std::size_t j = 0; j < n; ++j)
            vm[sys.equations[j].lhs] = [&eta, j](const ElemPtr& u) { return eta(j, u); };
        ElemPtr r = Elem::fold(map_elem(sys.equations[i].rhs, v->child(), vm, dsub, csub));
        if (!comp[i].contains(r))
            throw ValidationError("mu_comparison: nested solutions do not satisfy the system");
        cache[i].emplace(v, r);
        return r;
    };
    std::vector<FiniteFunction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<ElemPtr> images;
        images.reserve(vec[i].size());
        for (const auto& v : vec[i].elems()) images.push_back(eta(i, v));
        out.push_back(FiniteFunction{vec[i], comp[i], std::move(images)});
    }
    return out;
}

std::vector<FiniteFunction> Evaluator::nu_comparison(const EquationSystem& sys,
                                                     const std::vector<TermPtr>& nested,
                                                     const Env& env) {
    validate_system(sys);
    std::size_t n = sys.equations.size();
    if (nested.size() != n) throw ValidationError("nu_comparison: solution count mismatch");
    for (const auto& eq : sys.equations)
        if (eq.kind != BinderKind::Nu) throw ValidationError("nu_comparison needs an all-nu system");
    VecNuChain chain = vec_nu_chain(sys, env);
    std::vector<FiniteSet> vec(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<ElemPtr> wrapped;
        wrapped.reserve(chain.stages[i][chain.stab].size());
        for (const auto& e : chain.stages[i][chain.stab].elems())
            wrapped.push_back(Elem::nu_tree(e));
        vec[i] = FiniteSet::from_sorted(std::move(wrapped));
    }
    std::vector<FiniteSet> comp(n);
    for (std::size_t i = 0; i < n; ++i) comp[i] = eval_finite(nested[i], env);
    Env at_comp = env;
    for (std::size_t i = 0; i < n; ++i) at_comp[sys.equations[i].lhs] = comp[i];
    // each nested solution unfolds into the rhs evaluated at the component
    // carriers, again up to literal equality
    std::vector<FiniteFunction> un(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (nested[i]->kind() != TermKind::Nu)
            throw ValidationError("nu_comparison: nested solution is not a nu binder");
        un[i] = unfold(nested[i], env);
        if (!(un[i].codomain == eval_finite(sys.equations[i].rhs, at_comp)))
            throw ValidationError("nu_comparison: nested solutions do not satisfy the system");
    }
    // stage maps from the component carriers into the vectorial stages
    std::vector<std::vector<ElemPtr>> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i].assign(comp[i].size(), Elem::star());
    for (std::size_t k = 1; k <= chain.stab; ++k) {
        std::vector<std::vector<ElemPtr>> next(n);
        Env csub = env;
        for (std::size_t j = 0; j < n; ++j) csub[sys.equations[j].lhs] = chain.stages[j][k - 1];
        for (std::size_t i = 0; i < n; ++i) {
            const TermPtr& rhs = sys.equations[i].rhs;
            VarMaps vm;
            for (const auto& fv : free_vars(rhs)) vm[fv] = elem_identity;
            for (std::size_t j = 0; j < n; ++j) {
                vm[sys.equations[j].lhs] = [&pi, &comp, j](const ElemPtr& u) {
                    std::size_t at = comp[j].index_of(u);
                    if (at == FiniteSet::npos)
                        throw InternalError("nu_comparison: element outside its carrier");
                    return pi[j][at];
                };
            }
            next[i].reserve(comp[i].size());
            for (const auto& v : comp[i].elems()) {
                ElemPtr u = un[i].apply(v);
                ElemPtr r = map_elem(rhs, u, vm, at_comp, csub);
                if (!chain.stages[i][k].contains(r))
                    throw InternalError("nu_comparison: stage image escaped");
                next[i].push_back(r);
            }
        }
        pi = std::move(next);
    }
    std::vector<FiniteFunction> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<ElemPtr> images;
        images.reserve(comp[i].size());
        for (const auto& e : pi[i]) images.push_back(Elem::nu_tree(e));
        out.push_back(FiniteFunction{comp[i], vec[i], std::move(images)});
    }
    return out;
}

} // namespace mugame
