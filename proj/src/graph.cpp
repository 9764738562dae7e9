#include "mugame/graph.hpp"

#include "mugame/error.hpp"

#include <algorithm>

namespace mugame {

VertexId Graph::add_vertex() {
    VertexId v{next_vertex_};
    add_vertex(v);
    return v;
}

void Graph::add_vertex(VertexId v) {
    if (has_vertex(v)) throw ValidationError("vertex id already present");
    out_.emplace(v, std::vector<EdgeId>{});
    next_vertex_ = std::max(next_vertex_, v.value + 1);
}

EdgeId Graph::add_edge(VertexId src, VertexId tgt) {
    EdgeId e{next_edge_};
    add_edge(e, src, tgt);
    return e;
}

void Graph::add_edge(EdgeId e, VertexId src, VertexId tgt) {
    if (has_edge(e)) throw ValidationError("edge id already present");
    if (!has_vertex(src) || !has_vertex(tgt))
        throw ValidationError("edge endpoints must be existing vertices");
    edges_.emplace(e, EdgeEnds{src, tgt});
    out_[src].push_back(e);
    next_edge_ = std::max(next_edge_, e.value + 1);
}

VertexId Graph::src(EdgeId e) const {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw ValidationError("unknown edge id");
    return it->second.src;
}

VertexId Graph::tgt(EdgeId e) const {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw ValidationError("unknown edge id");
    return it->second.tgt;
}

const std::vector<EdgeId>& Graph::out_edges(VertexId v) const {
    auto it = out_.find(v);
    if (it == out_.end()) throw ValidationError("unknown vertex id");
    return it->second;
}

std::vector<VertexId> Graph::vertices() const {
    std::vector<VertexId> vs;
    vs.reserve(out_.size());
    for (const auto& [v, _] : out_) vs.push_back(v);
    return vs;
}

bool is_valid_path(const Graph& g, const Path& p) {
    if (!g.has_vertex(p.start)) return false;
    VertexId at = p.start;
    for (EdgeId e : p.steps) {
        if (!g.has_edge(e) || g.src(e) != at) return false;
        at = g.tgt(e);
    }
    return true;
}

VertexId path_end(const Graph& g, const Path& p) {
    if (!is_valid_path(g, p)) throw ValidationError("invalid path");
    return p.steps.empty() ? p.start : g.tgt(p.steps.back());
}

bool is_valid_lasso(const Graph& g, const LassoPath& l) {
    if (!is_valid_path(g, l.stem) || !is_valid_path(g, l.cycle)) return false;
    if (l.cycle.steps.empty()) return false;
    VertexId knot = path_end(g, l.stem);
    return l.cycle.start == knot && path_end(g, l.cycle) == knot;
}

Path compose_paths(const Graph& g, const Path& a, const Path& b) {
    if (!is_valid_path(g, a) || !is_valid_path(g, b))
        throw ValidationError("compose_paths: invalid operand");
    if (path_end(g, a) != b.start)
        throw ValidationError("compose_paths: endpoint of first path differs from start of second");
    Path r = a;
    r.steps.insert(r.steps.end(), b.steps.begin(), b.steps.end());
    return r;
}

bool is_prefix(const Path& shorter, const Path& longer) {
    if (shorter.start != longer.start) return false;
    if (shorter.steps.size() > longer.steps.size()) return false;
    return std::equal(shorter.steps.begin(), shorter.steps.end(), longer.steps.begin());
}

bool is_valid_morphism(const Graph& from, const Graph& to, const GraphMorphism& m) {
    for (VertexId v : from.vertices()) {
        auto it = m.vertex_map.find(v);
        if (it == m.vertex_map.end() || !to.has_vertex(it->second)) return false;
    }
    for (VertexId v : from.vertices()) {
        for (EdgeId e : from.out_edges(v)) {
            auto it = m.edge_map.find(e);
            if (it == m.edge_map.end() || !to.has_edge(it->second)) return false;
            EdgeId f = it->second;
            if (to.src(f) != m.vertex_map.at(from.src(e))) return false;
            if (to.tgt(f) != m.vertex_map.at(from.tgt(e))) return false;
        }
    }
    return true;
}

Path apply_morphism(const Graph& from, const Graph& to, const GraphMorphism& m,
                    const Path& p) {
    if (!is_valid_path(from, p)) throw ValidationError("apply_morphism: invalid path");
    auto vit = m.vertex_map.find(p.start);
    if (vit == m.vertex_map.end()) throw ValidationError("apply_morphism: unmapped vertex");
    Path r;
    r.start = vit->second;
    for (EdgeId e : p.steps) {
        auto eit = m.edge_map.find(e);
        if (eit == m.edge_map.end()) throw ValidationError("apply_morphism: unmapped edge");
        EdgeId f = eit->second;
        if (to.src(f) != m.vertex_map.at(from.src(e)) ||
            to.tgt(f) != m.vertex_map.at(from.tgt(e)))
            throw ValidationError("apply_morphism: incidence not preserved");
        r.steps.push_back(f);
    }
    if (!is_valid_path(to, r)) throw InternalError("apply_morphism produced an invalid path");
    return r;
}

LassoPath apply_morphism(const Graph& from, const Graph& to, const GraphMorphism& m,
                         const LassoPath& l) {
    if (!is_valid_lasso(from, l)) throw ValidationError("apply_morphism: invalid lasso");
    LassoPath r{apply_morphism(from, to, m, l.stem), apply_morphism(from, to, m, l.cycle)};
    if (!is_valid_lasso(to, r)) throw InternalError("apply_morphism produced an invalid lasso");
    return r;
}

} // namespace mugame
