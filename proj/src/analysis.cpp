#include "mugame/semantics.hpp"

#include "analysis_internal.hpp"
#include "mugame/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

namespace mugame {
namespace detail {

AbsSize abs_of_count(std::size_t n) {
    if (n == 0) return AbsSize::Zero;
    if (n == 1) return AbsSize::One;
    return AbsSize::Many;
}

namespace {

// Per-query memo tables. Keys pair the node with the abstract values of its
// free names only, so a subterm shared across many positions is analyzed
// once per distinct abstract environment instead of once per path; without
// this the binder iteration loops stack up exponentially on the heavily
// shared terms elimination produces.
struct Memo {
    std::map<std::pair<const Term*, std::vector<AbsSize>>, AbsResult> size;
    std::map<std::pair<const Term*, std::vector<char>>, bool> inhabited;
    // Failed occurrence searches; successes short-circuit to the top, so
    // only the misses are worth remembering.
    std::map<std::tuple<const Term*, std::string, bool, bool, std::vector<AbsSize>>, char> occ_miss;
};

std::vector<AbsSize> size_key(const TermPtr& t, const AbsEnv& env) {
    std::vector<AbsSize> out;
    out.reserve(t->free_names().size());
    for (const auto& v : t->free_names()) {
        auto it = env.find(v);
        if (it == env.end()) throw InternalError("abs_size: unbound variable " + v);
        out.push_back(it->second);
    }
    return out;
}

bool inhabited_rec(const TermPtr& t, std::map<std::string, bool>& env, Memo& memo) {
    if (t->kind() == TermKind::Var) {
        auto it = env.find(t->name());
        if (it == env.end()) throw InternalError("inhabited: unbound variable " + t->name());
        return it->second;
    }
    std::vector<char> restricted;
    restricted.reserve(t->free_names().size());
    for (const auto& v : t->free_names()) {
        auto it = env.find(v);
        if (it == env.end()) throw InternalError("inhabited: unbound variable " + v);
        restricted.push_back(it->second ? 1 : 0);
    }
    auto key = std::make_pair(t.get(), std::move(restricted));
    if (auto hit = memo.inhabited.find(key); hit != memo.inhabited.end()) return hit->second;
    bool res = false;
    switch (t->kind()) {
        case TermKind::Var:
            throw InternalError("inhabited: unreachable");
        case TermKind::Prod: {
            res = true;
            for (const auto& c : t->children())
                if (!inhabited_rec(c, env, memo)) {
                    res = false;
                    break;
                }
            break;
        }
        case TermKind::Coprod: {
            res = false;
            for (const auto& c : t->children())
                if (inhabited_rec(c, env, memo)) {
                    res = true;
                    break;
                }
            break;
        }
        case TermKind::Mu:
        case TermKind::Nu: {
            // Boolean Kleene iteration; the lattice has height one so a
            // single repeat detects the fixed point.
            bool cur = t->kind() == TermKind::Nu;
            bool settled = false;
            for (int step = 0; step < 3 && !settled; ++step) {
                auto saved = env.find(t->name());
                bool had = saved != env.end();
                bool old = had ? saved->second : false;
                env[t->name()] = cur;
                bool next = inhabited_rec(t->body(), env, memo);
                if (had) env[t->name()] = old; else env.erase(t->name());
                if (next == cur) {
                    res = cur;
                    settled = true;
                }
                cur = next;
            }
            if (!settled) throw InternalError("inhabited: boolean chain failed to settle");
            break;
        }
    }
    memo.inhabited.emplace(std::move(key), res);
    return res;
}

// Occurrence search shared by the mu pumping rule and the nu growth rule.
// Walks the body looking for a live occurrence of `var`, i.e. one reachable
// without passing through an uninhabited subterm. In nu mode the occurrence
// only counts if the path accumulated branching evidence: a Prod sibling of
// size >= 2 or a Coprod with two or more inhabited alternatives.
struct OccurrenceFound {
    std::vector<std::string> path;
    std::string note;
};

bool find_live_occurrence(const TermPtr& t, const std::string& var, const AbsEnv& env,
                          bool need_growth, bool have_growth, std::string growth_note,
                          OccurrenceFound& out, Memo& memo);

AbsResult abs_size_rec(const TermPtr& t, const AbsEnv& env, Memo& memo);

bool find_live_occurrence(const TermPtr& t, const std::string& var, const AbsEnv& env,
                          bool need_growth, bool have_growth, std::string growth_note,
                          OccurrenceFound& out, Memo& memo) {
    if (!t->mentions(var)) return false;
    auto key = std::make_tuple(t.get(), var, need_growth, have_growth, size_key(t, env));
    if (memo.occ_miss.count(key)) return false;
    switch (t->kind()) {
        case TermKind::Var: {
            // mentions() above already matched the name
            if (!need_growth || have_growth) {
                out.path.clear();
                out.note = growth_note;
                return true;
            }
            break;
        }
        case TermKind::Prod: {
            const auto& kids = t->children();
            // Every sibling must be inhabited or the whole product is dead.
            std::vector<AbsSize> sizes(kids.size());
            bool dead = false;
            for (std::size_t i = 0; i < kids.size(); ++i) {
                sizes[i] = abs_size_rec(kids[i], env, memo).size;
                if (sizes[i] == AbsSize::Zero) {
                    dead = true;
                    break;
                }
            }
            if (dead) break;
            bool found = false;
            for (std::size_t i = 0; i < kids.size() && !found; ++i) {
                bool grown = have_growth;
                std::string note = growth_note;
                for (std::size_t j = 0; j < kids.size(); ++j) {
                    if (j == i) continue;
                    if (sizes[j] == AbsSize::Many || sizes[j] == AbsSize::Inf) {
                        grown = true;
                        note = "product sibling #" + std::to_string(j) + " has size >= 2";
                        break;
                    }
                }
                if (find_live_occurrence(kids[i], var, env, need_growth, grown, note, out, memo)) {
                    out.path.insert(out.path.begin(), "prod#" + std::to_string(i));
                    found = true;
                }
            }
            if (found) return true;
            break;
        }
        case TermKind::Coprod: {
            const auto& kids = t->children();
            std::size_t live = 0;
            for (const auto& k : kids)
                if (abs_size_rec(k, env, memo).size != AbsSize::Zero) ++live;
            if (live == 0) break;
            bool found = false;
            for (std::size_t i = 0; i < kids.size() && !found; ++i) {
                if (abs_size_rec(kids[i], env, memo).size == AbsSize::Zero) continue;
                bool grown = have_growth || live >= 2;
                std::string note = growth_note;
                if (!have_growth && live >= 2)
                    note = "coproduct offers " + std::to_string(live) + " inhabited branches";
                if (find_live_occurrence(kids[i], var, env, need_growth, grown, note, out, memo)) {
                    out.path.insert(out.path.begin(), "sum#" + std::to_string(i));
                    found = true;
                }
            }
            if (found) return true;
            break;
        }
        case TermKind::Mu:
        case TermKind::Nu: {
            // mentions() above rules out shadowing
            AbsResult inner = abs_size_rec(t, env, memo);
            if (inner.size == AbsSize::Zero) break;
            AbsEnv sub = env;
            sub[t->name()] = inner.size;
            if (find_live_occurrence(t->body(), var, sub, need_growth, have_growth,
                                     std::move(growth_note), out, memo)) {
                out.path.insert(out.path.begin(),
                                (t->kind() == TermKind::Mu ? "mu " : "nu ") + t->name());
                return true;
            }
            break;
        }
    }
    memo.occ_miss.emplace(std::move(key), 1);
    return false;
}

std::string join_path(const std::vector<std::string>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += "/";
        s += path[i];
    }
    return s.empty() ? "(root)" : s;
}

AbsResult abs_size_rec(const TermPtr& t, const AbsEnv& env, Memo& memo) {
    if (t->kind() == TermKind::Var) {
        auto it = env.find(t->name());
        if (it == env.end()) throw InternalError("abs_size: unbound variable " + t->name());
        return {it->second, ""};
    }
    auto key = std::make_pair(t.get(), size_key(t, env));
    if (auto hit = memo.size.find(key); hit != memo.size.end()) return hit->second;
    AbsResult res{AbsSize::Zero, ""};
    switch (t->kind()) {
        case TermKind::Var:
            throw InternalError("abs_size: unreachable");
        case TermKind::Prod: {
            // An empty factor annihilates regardless of infinite siblings.
            std::vector<AbsResult> rs;
            rs.reserve(t->children().size());
            for (const auto& c : t->children()) rs.push_back(abs_size_rec(c, env, memo));
            res = {AbsSize::One, ""};
            for (const auto& r : rs)
                if (r.size == AbsSize::Zero) res = {AbsSize::Zero, ""};
            if (res.size != AbsSize::Zero) {
                for (const auto& r : rs)
                    if (r.size == AbsSize::Inf) {
                        res = r;
                        break;
                    }
                if (res.size != AbsSize::Inf)
                    for (const auto& r : rs)
                        if (r.size == AbsSize::Many) {
                            res = {AbsSize::Many, ""};
                            break;
                        }
            }
            break;
        }
        case TermKind::Coprod: {
            std::vector<AbsResult> rs;
            for (const auto& c : t->children()) {
                AbsResult r = abs_size_rec(c, env, memo);
                if (r.size != AbsSize::Zero) rs.push_back(std::move(r));
            }
            if (rs.empty()) {
                res = {AbsSize::Zero, ""};
            } else {
                res = {AbsSize::Zero, ""};
                bool set = false;
                for (const auto& r : rs)
                    if (r.size == AbsSize::Inf) {
                        res = r;
                        set = true;
                        break;
                    }
                if (!set) res = rs.size() >= 2 ? AbsResult{AbsSize::Many, ""} : rs.front();
            }
            break;
        }
        case TermKind::Mu: {
            AbsSize cur = AbsSize::Zero;
            AbsResult step{AbsSize::Zero, ""};
            bool settled = false;
            // The certificate can surface one iteration before the value
            // settles and the final re-evaluation then reaches Inf through
            // plain env lookups, so keep the last one seen.
            std::string last_cert;
            for (int i = 0; i < 5 && !settled; ++i) {
                AbsEnv sub = env;
                sub[t->name()] = cur;
                step = abs_size_rec(t->body(), sub, memo);
                if (!step.cert.empty()) last_cert = step.cert;
                if (step.size == cur) settled = true;
                cur = step.size;
            }
            if (!settled) throw InternalError("abs_size: mu chain failed to settle");
            if (cur == AbsSize::Zero || cur == AbsSize::Inf) {
                res = {cur, cur == AbsSize::Inf ? last_cert : std::string()};
            } else {
                AbsEnv sub = env;
                sub[t->name()] = cur;
                OccurrenceFound occ;
                if (find_live_occurrence(t->body(), t->name(), sub, false, false, "", occ, memo)) {
                    res = {AbsSize::Inf,
                           "mu " + t->name() + ": recursive occurrence at " + join_path(occ.path) +
                               " stays inhabited, so each iteration adds strictly deeper trees"};
                } else {
                    res = {cur, ""};
                }
            }
            break;
        }
        case TermKind::Nu: {
            AbsSize cur = AbsSize::One;
            AbsResult step{AbsSize::One, ""};
            bool settled = false;
            std::string last_cert;
            for (int i = 0; i < 5 && !settled; ++i) {
                AbsEnv sub = env;
                sub[t->name()] = cur;
                step = abs_size_rec(t->body(), sub, memo);
                if (!step.cert.empty()) last_cert = step.cert;
                if (step.size == cur) settled = true;
                cur = step.size;
            }
            if (!settled) throw InternalError("abs_size: nu chain failed to settle");
            if (cur == AbsSize::Zero || cur == AbsSize::Inf || cur == AbsSize::One) {
                res = {cur, cur == AbsSize::Inf ? last_cert : step.cert};
            } else {
                AbsEnv sub = env;
                sub[t->name()] = cur;
                OccurrenceFound occ;
                if (find_live_occurrence(t->body(), t->name(), sub, true, false, "", occ, memo)) {
                    res = {AbsSize::Inf, "nu " + t->name() + ": stage growth at " +
                                             join_path(occ.path) + " (" + occ.note +
                                             "), so the stage sizes increase strictly"};
                } else {
                    res = {cur, ""};
                }
            }
            break;
        }
    }
    memo.size.emplace(std::move(key), res);
    return res;
}

} // namespace

AbsResult abs_size(const TermPtr& t, const AbsEnv& env) {
    Memo memo;
    return abs_size_rec(t, env, memo);
}

bool abs_inhabited(const TermPtr& t, const AbsEnv& env) {
    std::map<std::string, bool> benv;
    for (const auto& [k, v] : env) benv[k] = v != AbsSize::Zero;
    Memo memo;
    return inhabited_rec(t, benv, memo);
}

} // namespace detail

AnalysisResult finiteness_analysis(const TermPtr& t,
                                   const std::map<std::string, std::size_t>& env_sizes) {
    if (!t) throw ValidationError("finiteness_analysis: null term");
    detail::AbsEnv env;
    for (const auto& [name, n] : env_sizes) env[name] = detail::abs_of_count(n);
    for (const auto& v : free_vars(t))
        if (!env.count(v))
            throw ValidationError("finiteness_analysis: no size for free variable " + v);
    detail::AbsResult r = detail::abs_size(t, env);
    switch (r.size) {
        case detail::AbsSize::Zero: return {SizeVerdict::Empty, ""};
        case detail::AbsSize::Inf: return {SizeVerdict::Infinite, r.cert};
        default: return {SizeVerdict::NonemptyFinite, ""};
    }
}

} // namespace mugame
