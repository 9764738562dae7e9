#include "mugame/oracle.hpp"

#include "mugame/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <utility>

namespace mugame {

namespace {

constexpr std::uint64_t kCap = 1'000'000;

// Dense view of a closed game together with Eva's winning region. Play
// that leaves the region can never belong to a winning-extendable prefix,
// so all counting happens on region vertices.
struct OracleCtx {
    std::vector<VertexId> ids;
    std::map<VertexId, std::size_t> at;
    std::vector<Player> owner;
    std::vector<char> region;
    std::vector<char> dead;
    std::vector<std::vector<std::size_t>> succ;
    std::size_t root = 0;
};

OracleCtx make_ctx(const ParityGame& g) {
    validate_game(g);
    if (!g.var_label.empty())
        throw ValidationError("strategy counting needs a closed game (no labeled leaves)");
    WinningRegions w = zielonka_solve(g);
    OracleCtx cx;
    cx.ids = g.arena.vertices();
    for (std::size_t i = 0; i < cx.ids.size(); ++i) cx.at[cx.ids[i]] = i;
    cx.owner.resize(cx.ids.size());
    cx.region.assign(cx.ids.size(), 0);
    cx.dead.assign(cx.ids.size(), 0);
    cx.succ.resize(cx.ids.size());
    for (std::size_t i = 0; i < cx.ids.size(); ++i) {
        VertexId v = cx.ids[i];
        cx.owner[i] = g.owner.at(v);
        cx.region[i] = w.eva_region.count(v) != 0;
        const auto& outs = g.arena.out_edges(v);
        cx.dead[i] = outs.empty();
        for (EdgeId e : outs) cx.succ[i].push_back(cx.at.at(g.arena.tgt(e)));
    }
    cx.root = cx.at.at(g.initial);
    return cx;
}

// Value of one region vertex at remaining depth r, given the layer below.
// Sets `over` instead of throwing so it can run inside a parallel region.
std::uint64_t layer_value(const OracleCtx& cx, std::size_t v, unsigned r,
                          const std::vector<std::uint64_t>& below, bool& over) {
    if (cx.dead[v]) return cx.owner[v] == Player::Adam ? 1u : 0u;
    if (r == 0) return 1;
    if (cx.owner[v] == Player::Eva) {
        std::uint64_t s = 0;
        for (std::size_t w : cx.succ[v]) {
            s += cx.region[w] ? below[w] : 0;
            if (s > kCap) {
                over = true;
                return s;
            }
        }
        return s;
    }
    std::uint64_t p = 1;
    for (std::size_t w : cx.succ[v]) {
        p *= cx.region[w] ? below[w] : 0;
        if (p > kCap) {
            over = true;
            return p;
        }
    }
    return p;
}

std::uint64_t count_from_ctx(const OracleCtx& cx, unsigned depth) {
    if (!cx.region[cx.root]) return 0;
    // need[r]: region vertices whose value at remaining depth r feeds the
    // root; keeps the work (and the overflow behavior) identical to the
    // on-demand recursion.
    std::vector<std::vector<std::size_t>> need(depth + 1);
    need[depth].push_back(cx.root);
    std::vector<char> in_need(cx.ids.size(), 0);
    for (unsigned r = depth; r > 0; --r) {
        std::fill(in_need.begin(), in_need.end(), 0);
        for (std::size_t v : need[r]) {
            if (cx.dead[v]) continue;
            for (std::size_t w : cx.succ[v])
                if (cx.region[w] && !in_need[w]) {
                    in_need[w] = 1;
                    need[r - 1].push_back(w);
                }
        }
        std::sort(need[r - 1].begin(), need[r - 1].end());
    }
    std::vector<std::uint64_t> below(cx.ids.size(), 0);
    std::vector<std::uint64_t> cur(cx.ids.size(), 0);
    for (unsigned r = 0; r <= depth; ++r) {
        const auto& layer = need[r];
        int over = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(|| : over) if (layer.size() > 64)
#endif
        for (std::size_t k = 0; k < layer.size(); ++k) {
            bool local_over = false;
            cur[layer[k]] = layer_value(cx, layer[k], r, below, local_over);
            over = over || local_over;
        }
        if (over) throw SizeError("more than 1000000 strategy prefixes at the requested depth");
        std::swap(below, cur);
    }
    return below[cx.root];
}

} // namespace

std::uint64_t count_prefixes(const ParityGame& g, unsigned depth) {
    OracleCtx cx = make_ctx(g);
    return count_from_ctx(cx, depth);
}

std::uint64_t count_prefixes_serial(const ParityGame& g, unsigned depth) {
    OracleCtx cx = make_ctx(g);
    if (!cx.region[cx.root]) return 0;
    std::map<std::pair<std::size_t, unsigned>, std::uint64_t> memo;
    auto rec = [&](auto&& self, std::size_t v, unsigned r) -> std::uint64_t {
        auto key = std::make_pair(v, r);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool over = false;
        std::uint64_t val;
        if (cx.dead[v] || r == 0) {
            val = layer_value(cx, v, r, {}, over);
        } else if (cx.owner[v] == Player::Eva) {
            val = 0;
            for (std::size_t w : cx.succ[v]) {
                val += cx.region[w] ? self(self, w, r - 1) : 0;
                if (val > kCap) over = true;
            }
        } else {
            val = 1;
            for (std::size_t w : cx.succ[v]) {
                val *= cx.region[w] ? self(self, w, r - 1) : 0;
                if (val > kCap) over = true;
            }
        }
        if (over) throw SizeError("more than 1000000 strategy prefixes at the requested depth");
        memo[key] = val;
        return val;
    };
    return rec(rec, cx.root, depth);
}

StabilizedCount stabilized_count(const ParityGame& g, unsigned max_depth) {
    OracleCtx cx = make_ctx(g);
    StabilizedCount out;
    out.counts.reserve(max_depth + 1);
    for (unsigned d = 0; d <= max_depth; ++d) out.counts.push_back(count_from_ctx(cx, d));
    if (!cx.region[cx.root]) {
        out.stabilized = true;
        out.count = 0;
        return out;
    }
    std::size_t n = cx.ids.size();
    // pre[v]: an Eva vertex with at least two in-region moves is reachable
    // from v by region play (Eva restricted to region moves, Adam free)
    std::vector<std::vector<std::size_t>> radj(n);
    std::vector<char> multi(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        if (!cx.region[v] || cx.dead[v]) continue;
        std::size_t live = 0;
        for (std::size_t w : cx.succ[v]) {
            if (cx.owner[v] == Player::Eva && !cx.region[w]) continue;
            radj[w].push_back(v);
            ++live;
        }
        if (cx.owner[v] == Player::Eva && live >= 2) multi[v] = 1;
    }
    std::vector<char> pre = multi;
    std::deque<std::size_t> work;
    for (std::size_t v = 0; v < n; ++v)
        if (pre[v]) work.push_back(v);
    while (!work.empty()) {
        std::size_t u = work.front();
        work.pop_front();
        for (std::size_t v : radj[u])
            if (!pre[v]) {
                pre[v] = 1;
                work.push_back(v);
            }
    }
    // walk the depth-d frontiers until one is clear of pre[]
    std::vector<char> frontier(n, 0);
    frontier[cx.root] = 1;
    for (unsigned d = 0; d + 1 <= max_depth; ++d) {
        bool clear = true;
        for (std::size_t v = 0; v < n; ++v)
            if (frontier[v] && pre[v]) clear = false;
        if (clear) {
            out.stabilized = true;
            out.count = out.counts[max_depth];
            for (unsigned e = d; e <= max_depth; ++e)
                if (out.counts[e] != out.count)
                    throw InternalError("prefix counts moved past their stabilization point");
            return out;
        }
        std::vector<char> next(n, 0);
        for (std::size_t v = 0; v < n; ++v) {
            if (!frontier[v] || cx.dead[v]) continue;
            for (std::size_t w : cx.succ[v]) {
                if (cx.owner[v] == Player::Eva && !cx.region[w]) continue;
                next[w] = 1;
            }
        }
        frontier = std::move(next);
    }
    out.stabilized = false;
    return out;
}

} // namespace mugame
