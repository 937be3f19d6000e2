#include <algorithm>
#include <map>
#include <set>

#include "wfav/iq.hpp"

namespace wfav::iq {

const char* to_string(Dimension d) {
    switch (d) {
        case Dimension::Accessibility: return "accessibility";
        case Dimension::Accuracy: return "accuracy";
        case Dimension::Believability: return "believability";
        case Dimension::Trustworthiness: return "trustworthiness";
        case Dimension::Completeness: return "completeness";
        case Dimension::Timeliness: return "timeliness";
        case Dimension::Consistency: return "consistency";
    }
    return "?";
}

namespace {

struct Ctx {
    const GoalModel* m;
    std::map<Id, Id> resp;                 // goal -> responsible actor
    std::set<std::pair<Id, Id>> avail;     // (actor, info)
    std::map<Id, std::set<Id>> producers;  // info -> producing actors
    std::map<Id, Tick> volatility;
    const PermissionClosure* perms;
};

Ctx build_ctx(const GoalModel& m, const PermissionClosure& perms) {
    Ctx c;
    c.m = &m;
    c.perms = &perms;
    for (const auto& g : m.goals) c.resp[g.id] = resolve_responsibility(m, g.id).actor;
    for (const auto& i : m.information) c.volatility[i.id] = i.volatility;
    for (const auto& p : m.produces) {
        c.avail.insert({c.resp[p.goal], p.info});
        c.producers[p.info].insert(c.resp[p.goal]);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& pr : m.provisions)
            if (c.avail.count({pr.source, pr.info}) &&
                c.avail.insert({pr.target, pr.info}).second)
                changed = true;
    }
    return c;
}

bool trusted_producer(const GoalModel& m, const Id& evaluator, const Id& producer,
                      const Id& info) {
    bool trusted = false;
    for (const auto& t : m.trusts) {
        if (t.scope_kind != TrustScopeKind::ProducedInfo || t.scope != info) continue;
        if (t.trustor != evaluator || t.trustee != producer) continue;
        if (t.polarity == TrustPolarity::Distrust) return false;
        trusted = true;
    }
    return trusted;
}

// Source trust for an evaluating actor: every foreign producer is trusted;
// no producer at all is treated as untrustworthy.
bool source_trust(const Ctx& c, const Id& evaluator, const Id& info, std::vector<Id>* witness) {
    auto it = c.producers.find(info);
    if (it == c.producers.end() || it->second.empty()) {
        if (witness) witness->push_back(info);
        return false;
    }
    bool ok = true;
    for (const auto& p : it->second) {
        if (p == evaluator) continue;
        if (!trusted_producer(*c.m, evaluator, p, info)) {
            if (witness) witness->push_back(p);
            ok = false;
        }
    }
    return ok;
}

// Actors from which the reader is reachable through provisions of `info`.
std::set<Id> backward_provision_set(const GoalModel& m, const Id& info, const Id& reader) {
    std::set<Id> back{reader};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& p : m.provisions)
            if (p.info == info && back.count(p.target) && back.insert(p.source).second)
                changed = true;
    }
    return back;
}

struct PairKey {
    Id goal, info;
    bool operator<(const PairKey& o) const { return std::tie(goal, info) < std::tie(o.goal, o.info); }
};

}  // namespace

std::vector<ProvenanceChain> provenance_chains(const GoalModel& m,
                                               std::vector<AnalysisIssue>* issues) {
    std::map<Id, Id> resp;
    for (const auto& g : m.goals) resp[g.id] = resolve_responsibility(m, g.id).actor;

    std::map<Id, Tick> first_prod;
    for (const auto& p : m.produces) {
        auto it = first_prod.find(p.info);
        if (it == first_prod.end() || p.produced_at < it->second)
            first_prod[p.info] = p.produced_at;
    }

    std::map<Id, std::vector<ChainEvent>> events;
    for (const auto& p : m.produces)
        events[p.info].push_back({resp[p.goal], ChainOp::Produce, p.produced_at, InfoOp::Produce});
    for (const auto& md : m.modifies) {
        if (!first_prod.count(md.info)) continue;  // unproduced: no chain
        events[md.info].push_back(
            {resp[md.goal], ChainOp::Modify, first_prod[md.info], InfoOp::Modify});
    }
    for (const auto& s : m.sends) {
        if (!first_prod.count(s.info)) continue;
        events[s.info].push_back({resp[s.goal], ChainOp::Send, s.sent_at, InfoOp::Send});
    }
    for (const auto& pr : m.provisions) {
        if (!first_prod.count(pr.info)) continue;
        events[pr.info].push_back(
            {pr.source, ChainOp::Provide, first_prod[pr.info], InfoOp::Send});
    }

    std::vector<ProvenanceChain> chains;
    for (auto& [info, evs] : events) {
        auto key = [](const ChainEvent& e) {
            return std::make_tuple(e.tick, static_cast<int>(e.op), e.actor);
        };
        std::stable_sort(evs.begin(), evs.end(),
                         [&](const ChainEvent& a, const ChainEvent& b) { return key(a) < key(b); });
        if (issues) {
            for (size_t k = 1; k < evs.size(); ++k)
                if (evs[k - 1].tick == evs[k].tick && evs[k - 1].op != ChainOp::Produce &&
                    evs[k].op != ChainOp::Produce)
                    issues->push_back({"chain-tie",
                                       "provenance events on " + info + " at tick " +
                                           std::to_string(evs[k].tick) +
                                           " ordered lexically (declared tie)",
                                       {info}});
            if (!evs.empty() && evs.front().op != ChainOp::Produce)
                issues->push_back({"inconsistent-timestamps",
                                   "provenance of " + info +
                                       " has an event before its first production",
                                   {info}});
        }
        chains.push_back({info, evs});
    }
    return chains;
}

Analysis analyze_all(const GoalModel& m) {
    Analysis out;
    PermissionClosure perms(m);
    Ctx c = build_ctx(m, perms);

    // Chain authorization per produced info item.
    std::map<Id, std::pair<bool, std::vector<Id>>> chain_ok;  // info -> (ok, offenders)
    for (const auto& chain : provenance_chains(m, &out.issues)) {
        bool ok = true;
        std::vector<Id> offenders;
        for (const auto& ev : chain.events)
            if (!perms.holds(ev.actor, chain.info, ev.required_permission)) {
                ok = false;
                offenders.push_back(ev.actor);
            }
        chain_ok[chain.info] = {ok, offenders};
    }
    auto chain_authorized = [&](const Id& info) {
        auto it = chain_ok.find(info);
        return it != chain_ok.end() && it->second.first;
    };

    // Usage map: which operations each (goal, info) pair performs.
    std::map<PairKey, std::set<InfoOp>> usage;
    for (const auto& r : m.produces) usage[{r.goal, r.info}].insert(InfoOp::Produce);
    for (const auto& r : m.reads) usage[{r.goal, r.info}].insert(InfoOp::Read);
    for (const auto& r : m.modifies) usage[{r.goal, r.info}].insert(InfoOp::Modify);
    for (const auto& r : m.sends) usage[{r.goal, r.info}].insert(InfoOp::Send);

    std::map<PairKey, const ProduceRel*> produce_of;
    for (const auto& r : m.produces) produce_of[{r.goal, r.info}] = &r;
    std::map<PairKey, std::vector<const ReadRel*>> reads_of;
    for (const auto& r : m.reads) reads_of[{r.goal, r.info}].push_back(&r);
    std::map<PairKey, std::vector<const SendRel*>> sends_of;
    for (const auto& r : m.sends) sends_of[{r.goal, r.info}].push_back(&r);

    std::map<Id, std::vector<Tick>> prod_ticks;
    for (const auto& r : m.produces) prod_ticks[r.info].push_back(r.produced_at);

    // Interdependent-reader groups: (info, purpose) -> reads.
    std::map<std::pair<Id, std::string>, std::vector<const ReadRel*>> groups;
    for (const auto& r : m.reads) groups[{r.info, r.purpose}].push_back(&r);
    auto group_inconsistent = [&](const ReadRel& r, std::vector<Id>* witness) {
        const auto& members = groups[{r.info, r.purpose}];
        std::set<Id> actors;
        for (const auto* mr : members) actors.insert(c.resp.at(mr->goal));
        if (actors.size() < 2) return false;  // not interdependent
        std::set<Tick> times;
        for (const auto* mr : members) times.insert(mr->read_at);
        if (times.size() <= 1) return false;
        if (witness)
            for (const auto* mr : members) witness->push_back(mr->goal);
        return true;
    };

    for (const auto& [key, ops] : usage) {
        const Id& goal = key.goal;
        const Id& info = key.info;
        const Id actor = c.resp.at(goal);
        Detail d;
        d.goal = goal;
        d.info = info;

        // Accessibility: availability plus a matching permission per usage.
        d.available = c.avail.count({actor, info}) > 0;
        bool permitted = true;
        for (InfoOp op : ops)
            if (!perms.holds(actor, info, op)) {
                permitted = false;
                d.witness.push_back(std::string("missing-") + wfav::to_string(op) +
                                    "-permission:" + actor);
            }
        d.permitted = permitted;
        if (!*d.available) d.witness.push_back("unavailable:" + info);

        bool prod = ops.count(InfoOp::Produce) > 0;
        bool read = ops.count(InfoOp::Read) > 0;

        if (prod) d.believable_produce = produce_of[{goal, info}]->believability_check;
        if (read) {
            bool all_b = true;
            for (const auto* r : reads_of[{goal, info}]) all_b = all_b && r->believability_check;
            d.believable_read = all_b;
        }

        if (prod || read) {
            std::vector<Id> tw;
            d.source_trustworthy = source_trust(c, actor, info, &tw);
            d.provision_trustworthy = chain_authorized(info);
            if (!*d.source_trustworthy)
                for (const auto& w : tw) d.witness.push_back("untrusted-source:" + w);
            if (!*d.provision_trustworthy)
                for (const auto& w : chain_ok[info].second)
                    d.witness.push_back("unauthorized-chain-op:" + w);
        }

        if (read) {
            // Value completeness: every provision on a path from a producer
            // to this reader must be integrity-preserving.
            bool value_ok = c.avail.count({actor, info}) > 0;
            auto back = backward_provision_set(m, info, actor);
            for (const auto& pr : m.provisions) {
                if (pr.info != info || pr.kind != ProvisionKind::Plain) continue;
                if (c.avail.count({pr.source, info}) && back.count(pr.target)) {
                    value_ok = false;
                    d.witness.push_back("plain-provision:" + pr.source + "->" + pr.target);
                }
            }
            d.value_complete = value_ok;

            bool purpose_ok = true;
            for (const auto* r : reads_of[{goal, info}])
                for (const auto& part : r->required_parts)
                    if (!c.avail.count({actor, part})) {
                        purpose_ok = false;
                        d.witness.push_back("missing-part:" + part);
                    }
            d.purpose_complete = purpose_ok;
        }

        // Timeliness: reads measured against the latest production at or
        // before the read; sends against the first destination read after
        // the send (vacuous when the destination never reads).
        bool read_part_applies = read && prod_ticks.count(info);
        if (read_part_applies) {
            bool all_timely = true;
            for (const auto* r : reads_of[{goal, info}]) {
                std::optional<Tick> latest;
                for (Tick t : prod_ticks[info])
                    if (t <= r->read_at && (!latest || t > *latest)) latest = t;
                if (!latest) {
                    out.issues.push_back({"inconsistent-timestamps",
                                          "read of " + info + " by " + goal + " at tick " +
                                              std::to_string(r->read_at) +
                                              " precedes every production",
                                          {goal, info}});
                    all_timely = false;
                    d.witness.push_back("read-before-production:" + info);
                    continue;
                }
                if (r->read_at - *latest >= c.volatility[info]) {
                    all_timely = false;
                    d.witness.push_back("stale-read:" + info);
                }
            }
            d.read_timely = all_timely;
        }
        if (ops.count(InfoOp::Send)) {
            bool all_timely = true;
            for (const auto* s : sends_of[{goal, info}]) {
                std::optional<Tick> first;
                for (const auto& r : m.reads) {
                    if (r.info != info || c.resp.at(r.goal) != s->destination) continue;
                    if (r.read_at < s->sent_at) continue;
                    if (!first || r.read_at < *first) first = r.read_at;
                }
                if (!first) continue;  // destination never reads: vacuous
                if (*first - s->sent_at >= s->timeliness) {
                    all_timely = false;
                    d.witness.push_back("late-transmission:" + s->destination);
                }
            }
            d.send_timely = all_timely;
        }

        if (read) {
            bool ok = true;
            std::vector<Id> wit;
            for (const auto* r : reads_of[{goal, info}])
                if (group_inconsistent(*r, &wit)) ok = false;
            d.consistent = ok;
            if (!ok) {
                std::sort(wit.begin(), wit.end());
                wit.erase(std::unique(wit.begin(), wit.end()), wit.end());
                for (const auto& w : wit) d.witness.push_back("interdependent-reader:" + w);
            }
        }

        out.details.push_back(std::move(d));
    }

    // Assemble the per-dimension verdicts from the detail rows.
    auto conj = [](std::initializer_list<std::optional<bool>> xs) -> std::optional<bool> {
        std::optional<bool> out;
        for (const auto& x : xs)
            if (x) out = out.value_or(true) && *x;
        return out;
    };
    for (const auto& d : out.details) {
        auto emit = [&](Dimension dim, std::optional<bool> v) {
            if (!v) return;
            Verdict verdict;
            verdict.goal = d.goal;
            verdict.info = d.info;
            verdict.dimension = dim;
            verdict.satisfied = *v;
            if (!*v) verdict.witness = d.witness;
            out.verdicts.push_back(std::move(verdict));
        };
        emit(Dimension::Accessibility, conj({d.available, d.permitted}));
        std::optional<bool> acc_prod = conj({d.believable_produce, d.source_trustworthy});
        std::optional<bool> acc_read =
            d.believable_read
                ? conj({d.believable_read, d.source_trustworthy, d.provision_trustworthy})
                : std::nullopt;
        if (d.believable_produce || d.believable_read)
            emit(Dimension::Accuracy,
                 conj({d.believable_produce ? acc_prod : std::nullopt, acc_read}));
        emit(Dimension::Believability, conj({d.believable_produce, d.believable_read}));
        emit(Dimension::Trustworthiness, conj({d.source_trustworthy, d.provision_trustworthy}));
        emit(Dimension::Completeness, conj({d.value_complete, d.purpose_complete}));
        emit(Dimension::Timeliness, conj({d.read_timely, d.send_timely}));
        emit(Dimension::Consistency, d.consistent);
    }

    auto vkey = [](const Verdict& v) {
        return std::make_tuple(v.goal, v.info, static_cast<int>(v.dimension));
    };
    std::sort(out.verdicts.begin(), out.verdicts.end(),
              [&](const Verdict& a, const Verdict& b) { return vkey(a) < vkey(b); });
    return out;
}

std::vector<Verdict> check_dimension(const GoalModel& m, Dimension dim) {
    std::vector<Verdict> out;
    for (const auto& v : analyze_all(m).verdicts)
        if (v.dimension == dim) out.push_back(v);
    return out;
}

}  // namespace wfav::iq
