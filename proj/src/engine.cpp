#include "wfav/engine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wfav::engine {

ExecContext::ExecContext(const WfaNet& net, std::map<Id, bool> iq_gate) : net_(&net) {
    for (const auto& p : net.places) {
        place_index_.emplace(p, place_ids_.size());
        place_ids_.push_back(p);
    }
    for (const auto& t : net.transitions) {
        trans_index_.emplace(t.id, trans_.size());
        TransData td;
        td.t = &t;
        auto it = iq_gate.find(t.id);
        td.iq_ok = it == iq_gate.end() ? true : it->second;
        trans_.push_back(td);
    }
    for (const auto& [a, b] : net.arcs) {
        auto pa = place_index_.find(a);
        auto tb = trans_index_.find(b);
        if (pa != place_index_.end() && tb != trans_index_.end())
            trans_[tb->second].pre.push_back(pa->second);
        auto ta = trans_index_.find(a);
        auto pb = place_index_.find(b);
        if (ta != trans_index_.end() && pb != place_index_.end())
            trans_[ta->second].post.push_back(pb->second);
    }
    for (auto& td : trans_) {
        std::sort(td.pre.begin(), td.pre.end());
        std::sort(td.post.begin(), td.post.end());
    }
}

std::optional<size_t> ExecContext::place_index(const Id& id) const {
    auto it = place_index_.find(id);
    if (it == place_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<size_t> ExecContext::transition_index(const Id& id) const {
    auto it = trans_index_.find(id);
    if (it == trans_index_.end()) return std::nullopt;
    return it->second;
}

Configuration ExecContext::initial() const {
    Configuration c;
    c.marking.assign(place_ids_.size(), 0);
    auto it = place_index_.find(net_->initial_place);
    if (it != place_index_.end()) c.marking[it->second] = 1;
    return c;
}

ExecContext::Enabled ExecContext::enabled(const Configuration& c, size_t ti) const {
    const TransData& td = trans_[ti];
    for (size_t p : td.pre)
        if (c.marking[p] == 0) return {false, "marking"};
    if (td.pre.empty()) return {false, "marking"};  // a sourceless transition never fires

    auto have = [&](const Id& info) {
        for (const auto& tok : c.info_state)
            if (tok.info == info && tok.holder == td.t->res) return true;
        return false;
    };
    for (const auto& i : td.t->rd)
        if (!have(i)) return {false, "information-flow:" + i};
    for (const auto& i : td.t->md)
        if (!have(i)) return {false, "information-flow:" + i};
    for (const auto& s : td.t->sd)
        if (!have(s.info)) return {false, "information-flow:" + s.info};

    if (!td.iq_ok) return {false, "iq:" + td.t->id};
    return {true, ""};
}

Configuration ExecContext::fire(const Configuration& c, size_t ti) const {
    Enabled e = enabled(c, ti);
    if (!e.enabled)
        throw NotEnabledError("transition " + trans_[ti].t->id + " not enabled (" + e.reason + ")");
    const TransData& td = trans_[ti];
    Configuration out = c;
    for (size_t p : td.pre) out.marking[p] -= 1;
    for (size_t p : td.post) out.marking[p] += 1;

    Tick tick = 1;
    for (const auto& tok : out.info_state) tick = std::max(tick, tok.tick + 1);
    auto put = [&](const Id& info, const Id& holder) {
        InfoToken tok{info, holder, tick};
        auto it = std::lower_bound(out.info_state.begin(), out.info_state.end(), tok);
        if (it == out.info_state.end() || *it != tok) out.info_state.insert(it, tok);
    };
    for (const auto& i : td.t->pd) put(i, td.t->res);
    for (const auto& s : td.t->sd) put(s.info, s.destination);
    return out;
}

std::vector<Id> ReachabilityGraph::firing_sequence(const ExecContext& ctx, size_t node) const {
    std::vector<Id> seq;
    while (node != npos && parent_node[node] != npos) {
        seq.push_back(ctx.transition_id(parent_transition[node]));
        node = parent_node[node];
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

namespace {

struct Successor {
    Configuration config;
    size_t from;
    size_t transition;
    std::optional<Id> broken_place;
};

std::vector<Successor> expand_one(const ExecContext& ctx, const Configuration& c, size_t from,
                                  std::uint32_t bound) {
    std::vector<Successor> out;
    for (size_t ti = 0; ti < ctx.transition_count(); ++ti) {
        if (!ctx.enabled(c, ti).enabled) continue;
        Successor s;
        s.config = ctx.fire(c, ti);
        s.from = from;
        s.transition = ti;
        for (size_t p = 0; p < s.config.marking.size(); ++p)
            if (s.config.marking[p] > bound) {
                s.broken_place = ctx.place_id(p);
                break;
            }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

ExploreResult explore(const ExecContext& ctx, const Configuration& initial, std::uint32_t bound,
                      bool parallel) {
    ExploreResult res;
    ReachabilityGraph g;
    std::map<Configuration, size_t> index;

    g.nodes.push_back(initial);
    g.parent_node.push_back(ReachabilityGraph::npos);
    g.parent_transition.push_back(ReachabilityGraph::npos);
    index.emplace(initial, 0);

    std::vector<size_t> frontier{0};
    while (!frontier.empty()) {
        std::vector<std::vector<Successor>> buckets(frontier.size());
        if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (std::int64_t k = 0; k < static_cast<std::int64_t>(frontier.size()); ++k)
                buckets[k] = expand_one(ctx, g.nodes[frontier[k]], frontier[k], bound);
        } else {
            for (size_t k = 0; k < frontier.size(); ++k)
                buckets[k] = expand_one(ctx, g.nodes[frontier[k]], frontier[k], bound);
        }

        // Merge in frontier order so node numbering is independent of the
        // expansion schedule.
        std::vector<size_t> next;
        for (auto& bucket : buckets) {
            for (auto& s : bucket) {
                auto [it, fresh] = index.emplace(s.config, g.nodes.size());
                if (fresh) {
                    g.nodes.push_back(s.config);
                    g.parent_node.push_back(s.from);
                    g.parent_transition.push_back(s.transition);
                    next.push_back(it->second);
                }
                if (s.broken_place) {
                    BoundExceeded be;
                    be.place = *s.broken_place;
                    be.witness = g.firing_sequence(ctx, s.from);
                    be.witness.push_back(ctx.transition_id(s.transition));
                    res.bound_exceeded = std::move(be);
                    return res;
                }
                g.edges.push_back({s.from, s.transition, it->second});
            }
        }
        frontier = std::move(next);
    }
    res.graph = std::move(g);
    return res;
}

ExploreResult explore_reference(const ExecContext& ctx, const Configuration& initial,
                                std::uint32_t bound) {
    ExploreResult res;
    ReachabilityGraph g;
    std::map<Configuration, size_t> index;

    g.nodes.push_back(initial);
    g.parent_node.push_back(ReachabilityGraph::npos);
    g.parent_transition.push_back(ReachabilityGraph::npos);
    index.emplace(initial, 0);

    std::deque<size_t> queue{0};
    while (!queue.empty()) {
        size_t cur = queue.front();
        queue.pop_front();
        for (const auto& s : expand_one(ctx, g.nodes[cur], cur, bound)) {
            auto [it, fresh] = index.emplace(s.config, g.nodes.size());
            if (fresh) {
                g.nodes.push_back(s.config);
                g.parent_node.push_back(cur);
                g.parent_transition.push_back(s.transition);
                queue.push_back(it->second);
            }
            if (s.broken_place) {
                BoundExceeded be;
                be.place = *s.broken_place;
                be.witness = g.firing_sequence(ctx, cur);
                be.witness.push_back(ctx.transition_id(s.transition));
                res.bound_exceeded = std::move(be);
                return res;
            }
            g.edges.push_back({cur, s.transition, it->second});
        }
    }
    res.graph = std::move(g);
    return res;
}

SoundnessOutcome check_soundness(const ExecContext& ctx, const Configuration& initial,
                                 std::uint32_t bound, bool parallel) {
    SoundnessOutcome out;
    ExploreResult ex = explore(ctx, initial, bound, parallel);
    if (ex.bound_exceeded) {
        out.bound_exceeded = std::move(ex.bound_exceeded);
        return out;
    }
    const ReachabilityGraph& g = *ex.graph;
    SoundnessReport rep;
    rep.configuration_count = g.nodes.size();
    rep.edge_count = g.edges.size();

    auto final_index = ctx.place_index(ctx.net().final_place);
    auto is_completion = [&](const Configuration& c) {
        if (!final_index) return false;
        for (size_t p = 0; p < c.marking.size(); ++p) {
            if (p == *final_index) {
                if (c.marking[p] != 1) return false;
            } else if (c.marking[p] != 0) {
                return false;
            }
        }
        return true;
    };

    // Option to complete: backward reachability from completion configs.
    std::vector<std::vector<size_t>> rev(g.nodes.size());
    for (const auto& e : g.edges) rev[e.to].push_back(e.from);
    std::vector<char> can_complete(g.nodes.size(), 0);
    std::deque<size_t> q;
    for (size_t n = 0; n < g.nodes.size(); ++n)
        if (is_completion(g.nodes[n])) {
            can_complete[n] = 1;
            q.push_back(n);
        }
    while (!q.empty()) {
        size_t cur = q.front();
        q.pop_front();
        for (size_t p : rev[cur])
            if (!can_complete[p]) {
                can_complete[p] = 1;
                q.push_back(p);
            }
    }
    rep.option_to_complete = true;
    for (size_t n = 0; n < g.nodes.size(); ++n)
        if (!can_complete[n]) {
            rep.option_to_complete = false;
            rep.stuck_witness = g.firing_sequence(ctx, n);
            break;
        }

    // Proper completion: the final place is never marked next to other tokens.
    rep.proper_completion = true;
    if (final_index) {
        for (size_t n = 0; n < g.nodes.size(); ++n) {
            const auto& mk = g.nodes[n].marking;
            if (mk[*final_index] == 0) continue;
            std::uint64_t total = 0;
            for (auto v : mk) total += v;
            if (total > 1) {
                rep.proper_completion = false;
                rep.improper_witness = g.firing_sequence(ctx, n);
                break;
            }
        }
    }

    // Dead transitions: never on any edge.
    std::vector<char> fired(ctx.transition_count(), 0);
    for (const auto& e : g.edges) fired[e.transition] = 1;
    for (size_t t = 0; t < ctx.transition_count(); ++t)
        if (!fired[t]) rep.dead_transitions.push_back(ctx.transition_id(t));
    rep.no_dead_transitions = rep.dead_transitions.empty();

    out.report = std::move(rep);
    return out;
}

std::string canonical_graph(const ExecContext& ctx, const ReachabilityGraph& g) {
    auto render = [&](const Configuration& c) {
        std::ostringstream s;
        s << "[";
        for (size_t p = 0; p < c.marking.size(); ++p)
            if (c.marking[p]) s << ctx.place_id(p) << ":" << c.marking[p] << " ";
        s << "|";
        for (const auto& tok : c.info_state)
            s << " " << tok.info << "@" << tok.holder << ":" << tok.tick;
        s << "]";
        return s.str();
    };
    std::vector<std::string> nodes;
    for (const auto& n : g.nodes) nodes.push_back(render(n));
    std::vector<std::string> lines;
    for (const auto& e : g.edges)
        lines.push_back(nodes[e.from] + " --" + ctx.transition_id(e.transition) + "--> " +
                        nodes[e.to]);
    std::sort(nodes.begin(), nodes.end());
    std::sort(lines.begin(), lines.end());
    std::ostringstream out;
    out << "nodes:\n";
    for (const auto& n : nodes) out << "  " << n << "\n";
    out << "edges:\n";
    for (const auto& l : lines) out << "  " << l << "\n";
    return out.str();
}

}  // namespace wfav::engine
