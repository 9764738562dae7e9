#pragma once

#include "mugame/equation.hpp"
#include "mugame/term.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mugame {

enum class ElemKind : std::uint8_t { Atom, Star, Tuple, Inj, Fold, NuTree };

class Elem;
using ElemPtr = std::shared_ptr<const Elem>;

// Immutable element of a finite set denotation. Atoms come from parameter
// sets, Star is the seed of a nu chain and never appears in a final carrier
// except beneath NuTree, Fold wraps mu elements, NuTree wraps a stabilized
// stage tree. Hash is precomputed; nodes are shared freely.
class Elem {
public:
    static ElemPtr atom(const std::string& param, std::uint32_t index);
    static ElemPtr star();
    static ElemPtr tuple(std::vector<ElemPtr> components);
    static ElemPtr inj(std::uint32_t tag, ElemPtr value);
    static ElemPtr fold(ElemPtr value);
    static ElemPtr nu_tree(ElemPtr stage);

    ElemKind kind() const { return kind_; }
    // Atom: owning parameter set name.
    const std::string& param() const { return param_; }
    // Atom: position in the parameter set; Inj: coproduct tag.
    std::uint32_t index() const { return index_; }
    const std::vector<ElemPtr>& components() const { return children_; }
    // Payload of Inj, Fold, NuTree.
    const ElemPtr& child() const { return children_.front(); }
    std::size_t hash() const { return hash_; }

private:
    Elem(ElemKind kind, std::string param, std::uint32_t index, std::vector<ElemPtr> children);

    ElemKind kind_;
    std::string param_;
    std::uint32_t index_;
    std::vector<ElemPtr> children_;
    std::size_t hash_;
};

// Total order: kind rank (Atom < Star < Tuple < Inj < Fold < NuTree), then
// param, index, child count, children lexicographically.
int compare_elems(const ElemPtr& a, const ElemPtr& b);
bool elem_eq(const ElemPtr& a, const ElemPtr& b);
bool elem_less(const ElemPtr& a, const ElemPtr& b);
std::string print_elem(const ElemPtr& e);

struct ElemLess {
    bool operator()(const ElemPtr& a, const ElemPtr& b) const { return elem_less(a, b); }
};

// Finite set of elements kept sorted and duplicate free.
class FiniteSet {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    FiniteSet() = default;
    static FiniteSet from_vector(std::vector<ElemPtr> elems);
    // Trusts that `elems` is strictly ascending; checked cheaply.
    static FiniteSet from_sorted(std::vector<ElemPtr> elems);

    const std::vector<ElemPtr>& elems() const { return elems_; }
    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    bool contains(const ElemPtr& e) const;
    std::size_t index_of(const ElemPtr& e) const;
    bool subset_of(const FiniteSet& other) const;
    bool operator==(const FiniteSet& other) const;
    bool operator!=(const FiniteSet& other) const { return !(*this == other); }

private:
    std::vector<ElemPtr> elems_;
};

// The parameter set {name#0, ..., name#(n-1)}.
FiniteSet atom_set(const std::string& name, std::size_t n);

using Env = std::map<std::string, FiniteSet>;

struct SetValue {
    bool finite = true;
    FiniteSet elements;
    // Non-finiteness witness; empty when finite.
    std::string certificate;

    std::size_t cardinality() const;
};

// Total function between finite sets, tabulated in domain order.
struct FiniteFunction {
    FiniteSet domain;
    FiniteSet codomain;
    std::vector<ElemPtr> images;

    ElemPtr apply(const ElemPtr& e) const;
    bool is_bijection() const;
    FiniteFunction inverse() const;
    FiniteFunction then(const FiniteFunction& g) const;
    static FiniteFunction identity(const FiniteSet& s);
    bool operator==(const FiniteFunction& other) const;
};

enum class SizeVerdict : std::uint8_t { Empty, NonemptyFinite, Infinite };

struct AnalysisResult {
    SizeVerdict verdict;
    // Human-readable growth witness when Infinite.
    std::string certificate;
};

// Decides emptiness and finiteness of the denotation from parameter set
// sizes alone, without running any chain. Sound in both directions for
// terms built from finite products, coproducts, mu and nu.
AnalysisResult finiteness_analysis(const TermPtr& t,
                                   const std::map<std::string, std::size_t>& env_sizes);

struct EvalOptions {
    // Max iterations per fixed-point chain.
    unsigned budget = 64;
    // Cap on any intermediate or final set size.
    std::size_t max_set_size = 1'000'000;
};

// Kleene evaluator for mu terms over concrete finite sets. Results are
// memoized per (subterm, environment restricted to its free names).
class Evaluator {
public:
    explicit Evaluator(EvalOptions opts = {}) : opts_(opts) {}

    // Full verdict: finite value or an infinity certificate.
    SetValue eval(const TermPtr& t, const Env& env);
    // Like eval but demands finiteness.
    FiniteSet eval_finite(const TermPtr& t, const Env& env);

    // Functorial action: given maps on the free variables, the induced map
    // eval(t, domains) -> eval(t, codomains).
    FiniteFunction eval_on_morphism(const TermPtr& t,
                                    const std::map<std::string, FiniteFunction>& var_maps);

    // Structure map eval(body[t/X], env) -> eval(t, env) of a binder term
    // and its inverse; both are bijections.
    FiniteFunction fold(const TermPtr& t, const Env& env);
    FiniteFunction unfold(const TermPtr& t, const Env& env);

    // Simultaneous (vectorial) solution of a homogeneous all-mu or all-nu
    // system, one carrier per equation in system order.
    std::vector<FiniteSet> eval_system_vectorial(const EquationSystem& sys, const Env& env);

    // Comparison maps between the vectorial solution and the component
    // carriers of the nested (eliminated) solutions. For all-mu systems the
    // maps go vectorial -> nested; for all-nu systems nested -> vectorial.
    std::vector<FiniteFunction> mu_comparison(const EquationSystem& sys,
                                              const std::vector<TermPtr>& nested, const Env& env);
    std::vector<FiniteFunction> nu_comparison(const EquationSystem& sys,
                                              const std::vector<TermPtr>& nested, const Env& env);

    const EvalOptions& options() const { return opts_; }

private:
    // Stages and projections of one nu chain: proj[k] maps stages[k+1] to
    // stages[k]; stab is the least n >= 1 with proj[n] bijective.
    struct NuChain {
        std::vector<FiniteSet> stages;
        std::vector<FiniteFunction> proj;
        std::size_t stab = 0;
    };

    using VarMaps = std::map<std::string, std::function<ElemPtr(const ElemPtr&)>>;

    struct MemoKey {
        const Term* term = nullptr;
        std::vector<std::pair<std::string, FiniteSet>> env;
    };
    struct MemoKeyHash {
        std::size_t operator()(const MemoKey& k) const;
    };
    struct MemoKeyEq {
        bool operator()(const MemoKey& a, const MemoKey& b) const;
    };

    FiniteSet eval_set(const TermPtr& t, const Env& env);
    FiniteSet eval_mu(const TermPtr& t, const Env& env);
    FiniteSet eval_nu(const TermPtr& t, const Env& env);
    // Cached chain for a nu binder; extended in place until it holds at
    // least `min_proj` projections.
    std::shared_ptr<NuChain> nu_chain(const TermPtr& t, const Env& env, std::size_t min_proj);
    void chain_step(NuChain& chain, const TermPtr& t, const Env& env);
    // Element action of t on e, sending free variables through vm; the two
    // environments give the variable carriers on each side.
    ElemPtr map_elem(const TermPtr& t, const ElemPtr& e, const VarMaps& vm, const Env& dom_env,
                     const Env& cod_env);
    void check_cap(std::size_t n) const;
    MemoKey memo_key(const TermPtr& t, const Env& env) const;
    // Memoized emptiness pruning; the abstract environment only ranges
    // over four values per name, so hits dominate inside chain loops.
    bool pruned_inhabited(const TermPtr& t, const std::map<std::string, std::uint8_t>& aenv);

    // Vectorial nu chain: stages[i][k] and proj[i][k] per equation.
    struct VecNuChain {
        std::vector<std::vector<FiniteSet>> stages;
        std::vector<std::vector<FiniteFunction>> proj;
        std::size_t stab = 0;
    };
    std::vector<FiniteSet> vec_mu_carriers(const EquationSystem& sys, const Env& env);
    VecNuChain vec_nu_chain(const EquationSystem& sys, const Env& env);

    EvalOptions opts_;
    std::unordered_map<MemoKey, FiniteSet, MemoKeyHash, MemoKeyEq> memo_;
    std::unordered_map<MemoKey, std::shared_ptr<NuChain>, MemoKeyHash, MemoKeyEq> nu_memo_;
    std::map<std::pair<const Term*, std::vector<std::pair<std::string, std::uint8_t>>>, bool>
        inhabited_cache_;
    std::vector<TermPtr> retained_;
};

} // namespace mugame
