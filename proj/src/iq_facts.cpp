#include "wfav/iq.hpp"

namespace wfav::iq {

namespace {

using datalog::Atom;
using datalog::Term;

Term sym(const Id& s) { return Term::sym(s); }
Term num(Tick t) { return Term::num(static_cast<std::int64_t>(t)); }

}  // namespace

// One fact per model element or relation. Ticks are plain integers; the
// per-produce expiry (production tick plus volatility) and per-send deadline
// (send tick plus window) are precomputed here so the axioms need only the
// comparison built-ins.
std::vector<datalog::Atom> extract_facts(const GoalModel& m) {
    std::vector<Atom> facts;
    auto add = [&](const char* pred, std::vector<Term> ts) {
        facts.push_back(Atom{pred, std::move(ts)});
    };

    for (InfoOp op : {InfoOp::Produce, InfoOp::Read, InfoOp::Modify, InfoOp::Send})
        add("op", {sym(to_string(op))});

    for (const auto& a : m.actors) {
        add("actor", {sym(a.id), sym(a.kind == ActorKind::Agent ? "agent" : "role")});
        for (const auto& r : a.plays) add("plays", {sym(a.id), sym(r)});
    }
    for (const auto& g : m.goals) {
        add("goal", {sym(g.id), sym(g.actor)});
        if (g.atomic_no_info) add("atomic_no_info", {sym(g.id)});
    }
    for (const auto& d : m.decompositions) {
        add("decomp", {sym(d.parent), sym(d.kind == DecompKind::And ? "and" : "or")});
        for (size_t i = 0; i < d.children.size(); ++i)
            add("decomp_child", {sym(d.parent), num(i), sym(d.children[i])});
    }
    for (const auto& i : m.information) {
        add("info", {sym(i.id)});
        add("volatility", {sym(i.id), num(i.volatility)});
        add("owner", {sym(i.id), sym(i.owner)});
        for (const auto& p : i.parts) add("partof", {sym(p), sym(i.id)});
    }

    std::map<Id, Tick> vol;
    for (const auto& i : m.information) vol[i.id] = i.volatility;

    for (const auto& r : m.produces) {
        add("produces", {sym(r.goal), sym(r.info), sym(r.believability_check ? "b" : "nb"),
                         num(r.produced_at)});
        add("prod_tick", {sym(r.info), num(r.produced_at)});
        add("expiry", {sym(r.info), num(r.produced_at), num(r.produced_at + vol[r.info])});
    }
    for (size_t k = 0; k < m.reads.size(); ++k) {
        const auto& r = m.reads[k];
        Id rid = "r" + std::to_string(k);
        add("reads", {sym(r.goal), sym(r.info), sym(r.type == ReadType::Required ? "req" : "opt"),
                      sym(r.believability_check ? "b" : "nb"), sym(r.purpose), num(r.read_at),
                      sym(rid)});
        for (const auto& p : r.required_parts) add("required_part", {sym(rid), sym(p)});
    }
    for (const auto& r : m.modifies) add("modifies", {sym(r.goal), sym(r.info)});
    for (size_t k = 0; k < m.sends.size(); ++k) {
        const auto& s = m.sends[k];
        Id sid = "s" + std::to_string(k);
        add("sends", {sym(s.goal), sym(s.info), sym(s.destination), num(s.timeliness),
                      num(s.sent_at)});
        add("send_ev", {sym(sid), sym(s.goal), sym(s.info), sym(s.destination), num(s.sent_at),
                        num(s.sent_at + s.timeliness)});
    }
    for (const auto& p : m.provisions)
        add("provides", {sym(p.source), sym(p.target), sym(p.info),
                         sym(p.kind == ProvisionKind::IntegrityPreserving ? "ip" : "p"),
                         num(p.transmission_time)});
    for (const auto& d : m.delegations)
        add(d.subject_kind == DelegationSubjectKind::Goal ? "delegates_goal" : "delegates_perm",
            {sym(d.delegator), sym(d.delegatee), sym(d.subject)});
    for (const auto& g : m.grants) {
        add("grantor", {sym(g.id), sym(g.grantor)});
        for (InfoOp op : g.ops)
            add("permitted", {sym(g.id), sym(g.grantee), sym(g.info), sym(to_string(op))});
    }
    for (const auto& t : m.trusts) {
        Term pol = sym(t.polarity == TrustPolarity::Trust ? "trust" : "distrust");
        if (t.scope_kind == TrustScopeKind::ProducedInfo)
            add("trusts", {sym(t.trustor), sym(t.trustee), pol, sym(t.scope)});
        else
            add("trusts_ent", {sym(t.trustor), sym(t.trustee), pol, sym(t.scope)});
    }
    return facts;
}

datalog::Program build_iq_program(const GoalModel& m) {
    datalog::ParsedProgram parsed = datalog::parse_program(iq_axioms());
    // The bundled axioms are static; a parse failure is a programming error
    // and surfaces loudly in every test.
    datalog::Program p = std::move(parsed.program);
    p.edb = extract_facts(m);
    return p;
}

}  // namespace wfav::iq
