#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

namespace mugame {

struct VertexId {
    std::uint32_t value = 0;
    auto operator<=>(const VertexId&) const = default;
};

struct EdgeId {
    std::uint32_t value = 0;
    auto operator<=>(const EdgeId&) const = default;
};

// Finite directed multigraph over sparse, totally ordered ids. Ids can be
// chosen by the caller (needed when carving subgraphs that must keep their
// identity) or allocated fresh. Out-edge lists keep insertion order, which
// doubles as the canonical successor order everywhere in the library.
class Graph {
public:
    VertexId add_vertex();
    void add_vertex(VertexId v);
    EdgeId add_edge(VertexId src, VertexId tgt);
    void add_edge(EdgeId e, VertexId src, VertexId tgt);

    bool has_vertex(VertexId v) const { return out_.count(v) != 0; }
    bool has_edge(EdgeId e) const { return edges_.count(e) != 0; }
    std::size_t vertex_count() const { return out_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    VertexId src(EdgeId e) const;
    VertexId tgt(EdgeId e) const;
    const std::vector<EdgeId>& out_edges(VertexId v) const;

    // Ascending id order.
    std::vector<VertexId> vertices() const;

private:
    struct EdgeEnds {
        VertexId src;
        VertexId tgt;
    };
    std::map<VertexId, std::vector<EdgeId>> out_;
    std::map<EdgeId, EdgeEnds> edges_;
    std::uint32_t next_vertex_ = 0;
    std::uint32_t next_edge_ = 0;
};

// A (possibly empty) directed walk: a start vertex plus consecutive edges.
struct Path {
    VertexId start;
    std::vector<EdgeId> steps;
};

// Ultimately periodic walk: follow stem, then repeat cycle forever.
// The cycle must be nonempty and close back on the stem's endpoint.
struct LassoPath {
    Path stem;
    Path cycle;
};

bool is_valid_path(const Graph& g, const Path& p);
bool is_valid_lasso(const Graph& g, const LassoPath& l);
VertexId path_end(const Graph& g, const Path& p);

// Endpoint of `a` must equal start of `b`.
Path compose_paths(const Graph& g, const Path& a, const Path& b);

// True iff `shorter` is an initial segment of `longer` (same start).
bool is_prefix(const Path& shorter, const Path& longer);

// Pair of maps preserving incidence: src/tgt of a mapped edge are the
// mapped src/tgt. Total on the domain graph.
struct GraphMorphism {
    std::map<VertexId, VertexId> vertex_map;
    std::map<EdgeId, EdgeId> edge_map;
};

bool is_valid_morphism(const Graph& from, const Graph& to, const GraphMorphism& m);

// Throws ValidationError if the morphism is not total and incidence-preserving
// on the path's vertices and edges.
Path apply_morphism(const Graph& from, const Graph& to, const GraphMorphism& m,
                    const Path& p);
LassoPath apply_morphism(const Graph& from, const Graph& to, const GraphMorphism& m,
                         const LassoPath& l);

} // namespace mugame
