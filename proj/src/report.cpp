#include "mugame/report.hpp"

#include "mugame/error.hpp"

namespace mugame {

Json elem_to_json(const ElemPtr& e) {
    switch (e->kind()) {
    case ElemKind::Atom:
        return Json::array({"atom", e->param(), e->index()});
    case ElemKind::Star:
        return Json::array({"star"});
    case ElemKind::Tuple: {
        Json a = Json::array({"tuple"});
        for (const auto& c : e->components()) a.push_back(elem_to_json(c));
        return a;
    }
    case ElemKind::Inj:
        return Json::array({"inj", e->index(), elem_to_json(e->child())});
    case ElemKind::Fold:
        return Json::array({"fold", elem_to_json(e->child())});
    case ElemKind::NuTree:
        return Json::array({"nu", elem_to_json(e->child())});
    }
    throw InternalError("elem_to_json: unreachable");
}

Json set_value_to_json(const SetValue& v, std::size_t element_cap) {
    Json out;
    if (!v.finite) {
        out["verdict"] = "infinite";
        out["certificate"] = v.certificate;
        return out;
    }
    out["verdict"] = "finite";
    out["cardinality"] = v.elements.size();
    if (v.elements.size() <= element_cap) {
        Json arr = Json::array();
        for (const auto& e : v.elements.elems()) arr.push_back(elem_to_json(e));
        out["elements"] = std::move(arr);
    }
    return out;
}

namespace {

Json region_array(const std::set<VertexId>& r) {
    Json a = Json::array();
    for (VertexId v : r) a.push_back(v.value);
    return a;
}

Json strategy_array(const ParityGame& g, const std::map<VertexId, EdgeId>& strat) {
    Json a = Json::array();
    for (const auto& [v, e] : strat) {
        Json move;
        move["from"] = v.value;
        move["to"] = g.arena.tgt(e).value;
        a.push_back(std::move(move));
    }
    return a;
}

} // namespace

Json regions_to_json(const ParityGame& g, const WinningRegions& w) {
    Json out;
    out["winner"] = w.eva_region.count(g.initial) ? "eva" : "adam";
    out["eva_region"] = region_array(w.eva_region);
    out["adam_region"] = region_array(w.adam_region);
    out["eva_strategy"] = strategy_array(g, w.eva_strategy);
    out["adam_strategy"] = strategy_array(g, w.adam_strategy);
    return out;
}

Json stabilized_to_json(const StabilizedCount& s) {
    Json out;
    out["counts"] = s.counts;
    out["stabilized"] = s.stabilized;
    if (s.stabilized) out["count"] = s.count;
    return out;
}

Json game_summary(const ParityGame& g) {
    Json out;
    out["vertices"] = g.arena.vertex_count();
    out["edges"] = g.arena.edge_count();
    out["max_priority"] = g.arena.vertex_count() ? max_priority(g) : 0;
    out["leaves"] = g.var_label.size();
    return out;
}

namespace {

void term_stats(const TermPtr& t, std::size_t& nodes, std::size_t& binders) {
    ++nodes;
    switch (t->kind()) {
    case TermKind::Var:
        return;
    case TermKind::Prod:
    case TermKind::Coprod:
        for (const auto& c : t->children()) term_stats(c, nodes, binders);
        return;
    case TermKind::Mu:
    case TermKind::Nu:
        ++binders;
        term_stats(t->body(), nodes, binders);
        return;
    }
}

} // namespace

Json term_summary(const TermPtr& t) {
    std::size_t nodes = 0;
    std::size_t binders = 0;
    term_stats(t, nodes, binders);
    Json out;
    out["nodes"] = nodes;
    out["binders"] = binders;
    Json fv = Json::array();
    for (const auto& v : free_vars(t)) fv.push_back(v);
    out["free_vars"] = std::move(fv);
    return out;
}

} // namespace mugame
