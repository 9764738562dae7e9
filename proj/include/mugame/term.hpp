#pragma once

#include <memory>
#include <string>
#include <vector>

namespace mugame {

class Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind : std::uint8_t { Var, Prod, Coprod, Mu, Nu };

// Immutable fixed-point expression over finite products and coproducts.
// prod() with no children is the singleton, coprod() with none is empty.
// Subterms are shared; a Term is never mutated after construction.
class Term {
public:
    static TermPtr var(std::string name);
    static TermPtr prod(std::vector<TermPtr> children);
    static TermPtr coprod(std::vector<TermPtr> children);
    static TermPtr mu(std::string binder, TermPtr body);
    static TermPtr nu(std::string binder, TermPtr body);

    TermKind kind() const { return kind_; }
    // Var name, or binder name for Mu/Nu.
    const std::string& name() const { return name_; }
    const std::vector<TermPtr>& children() const { return children_; }
    const TermPtr& body() const { return children_.front(); }
    bool is_binder() const { return kind_ == TermKind::Mu || kind_ == TermKind::Nu; }
    // Free names, sorted and deduplicated. Precomputed at construction so
    // scope checks stay cheap on heavily shared terms.
    const std::vector<std::string>& free_names() const { return free_set_; }
    bool mentions(const std::string& var) const;

protected:
    Term(TermKind kind, std::string name, std::vector<TermPtr> children)
        : kind_(kind), name_(std::move(name)), children_(std::move(children)),
          free_set_(compute_free(kind_, name_, children_)) {}

private:
    static std::vector<std::string> compute_free(TermKind kind, const std::string& name,
                                                 const std::vector<TermPtr>& children);

    TermKind kind_;
    std::string name_;
    std::vector<TermPtr> children_;
    std::vector<std::string> free_set_;
};

// Distinct free variable names, order significant.
using Context = std::vector<std::string>;

// Free names in order of first occurrence (left to right).
std::vector<std::string> free_vars(const TermPtr& t);

// Capture-avoiding substitution of `replacement` for free occurrences of
// `var`. Binders are renamed on the way down when they would capture.
TermPtr substitute(const TermPtr& t, const std::string& var, const TermPtr& replacement);

bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Renames every binder to a fresh integer-suffixed name so that all binders
// are pairwise distinct and distinct from every free name. Idempotent on its
// own output. Free occurrences are never touched.
TermPtr canonicalize(const TermPtr& t);

// Removes binders whose variable never occurs in the body, bottom-up, so
// `mu X. b` becomes `b` whenever X is not free in b. Semantics-preserving:
// a constant map has its constant as the unique fixed point.
TermPtr drop_vacuous_binders(const TermPtr& t);

/// S-expression concrete syntax:
//   (var X) | (prod T...) | (sum T...) | (mu X T) | (nu X T)
// `;` starts a comment running to end of line. The parsed term is
// canonicalized; shadowing or duplicate binder names in the input are
// reported through `warnings` when given.
TermPtr parse_term(const std::string& text, std::vector<std::string>* warnings = nullptr);

std::string print_term(const TermPtr& t);

// Total structural order on alpha-canonical terms; used for deterministic
// containers. Compares kinds, then names, then children.
int compare_terms(const TermPtr& a, const TermPtr& b);

} // namespace mugame
