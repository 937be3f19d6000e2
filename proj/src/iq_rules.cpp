#include <algorithm>
#include <map>
#include <set>

#include "wfav/iq.hpp"

namespace wfav::iq {

// The information-quality axioms. Verdict predicates are defined as single
// negations over violation predicates so the program stays within four
// strata. Evaluating actors are the delegation-resolved responsible actors.
const std::string& iq_axioms() {
    static const std::string text = R"(
% responsibility: end of the goal-delegation chain, starting at the owner
reaches(G, A) :- goal(G, A).
reaches(G, B) :- reaches(G, A), delegates_goal(A, B, G).
delegated_from(G, A) :- delegates_goal(A, B, G).
responsible(G, A) :- reaches(G, A), not delegated_from(G, A).

% permission closure rooted at information owners
holds(A, I, Op) :- owner(I, A), op(Op).
grant_holder(P, A) :- permitted(P, A, I, Op).
grant_holder(P, B) :- delegates_perm(A, B, P), grant_holder(P, A).
holds(A, I, Op) :- grant_holder(P, A), permitted(P, Ge, I, Op), grantor(P, Gr), holds(Gr, I, Op).

% availability: produced locally or received over a provision chain
avail(A, I) :- produces(G, I, C, T), responsible(G, A).
avail(B, I) :- avail(A, I), provides(A, B, I, K, TT).
producer(I, P) :- produces(G, I, C, T), responsible(G, P).
has_producer(I) :- producer(I, P).
info_produced(I) :- prod_tick(I, T).

% usage inventory
uses(G, I, produce) :- produces(G, I, C, T).
uses(G, I, read) :- reads(G, I, Ty, C, Pu, T, R).
uses(G, I, modify) :- modifies(G, I).
uses(G, I, send) :- sends(G, I, D, W, T).
prod_or_read(G, I) :- produces(G, I, C, T).
prod_or_read(G, I) :- reads(G, I, Ty, C, Pu, T, R).
has_read(G, I) :- reads(G, I, Ty, C, Pu, T, R).

% accessibility: availability and a matching permission per usage
access_ok(G, I, Op) :- uses(G, I, Op), responsible(G, A), avail(A, I), holds(A, I, Op).
access_viol(G, I, Op) :- uses(G, I, Op), not access_ok(G, I, Op).
avail_viol(G, I) :- uses(G, I, Op), responsible(G, A), not avail(A, I).
perm_viol(G, I) :- uses(G, I, Op), responsible(G, A), not holds(A, I, Op).
access_bad(G, I) :- access_viol(G, I, Op).
accessible(G, I) :- uses(G, I, Op), not access_bad(G, I).

% believability: the produce/read relation carries a believability check
bel_prod_bad(G, I) :- produces(G, I, nb, T).
bel_read_bad(G, I) :- reads(G, I, Ty, nb, Pu, T, R).
bel_bad(G, I) :- bel_prod_bad(G, I).
bel_bad(G, I) :- bel_read_bad(G, I).
believable(G, I) :- prod_or_read(G, I), not bel_bad(G, I).

% trustworthiness of the source: every foreign producer is trusted
trusted_prod(E, P, I) :- trusts(E, P, trust, I), not trusts(E, P, distrust, I).
src_bad(G, I) :- prod_or_read(G, I), responsible(G, E), producer(I, P), not eq(P, E), not trusted_prod(E, P, I).
src_bad(G, I) :- prod_or_read(G, I), not has_producer(I).

% trustworthiness of the provision: every provenance event is authorized
chain_ev(I, A, produce) :- produces(G, I, C, T), responsible(G, A).
chain_ev(I, A, modify) :- modifies(G, I), responsible(G, A), info_produced(I).
chain_ev(I, A, send) :- sends(G, I, D, W, T), responsible(G, A), info_produced(I).
chain_ev(I, A, send) :- provides(A, B, I, K, TT), info_produced(I).
chain_bad(I) :- chain_ev(I, A, Op), not holds(A, I, Op).
trust_bad(G, I) :- src_bad(G, I).
trust_bad(G, I) :- prod_or_read(G, I), chain_bad(I).
trust_bad(G, I) :- prod_or_read(G, I), not has_producer(I).
trustworthy(G, I) :- prod_or_read(G, I), not trust_bad(G, I).

% accuracy: believability plus source trust for producers, plus chain
% authorization for readers
acc_bad(G, I) :- bel_prod_bad(G, I).
acc_bad(G, I) :- bel_read_bad(G, I).
acc_bad(G, I) :- prod_or_read(G, I), src_bad(G, I).
acc_bad(G, I) :- has_read(G, I), chain_bad(I).
acc_bad(G, I) :- has_read(G, I), not has_producer(I).
accurate(G, I) :- prod_or_read(G, I), not acc_bad(G, I).

% completeness: only integrity-preserving provisions on paths to the
% reader, and every required part available to the reader
reader(I, E) :- reads(G, I, Ty, C, Pu, T, R), responsible(G, E).
reach_to(I, E, E) :- reader(I, E).
reach_to(I, E, A) :- provides(A, B, I, K, TT), reach_to(I, E, B).
bad_prov(I, E) :- provides(A, B, I, p, TT), avail(A, I), reach_to(I, E, B).
val_bad(G, I) :- reads(G, I, Ty, C, Pu, T, R), responsible(G, E), bad_prov(I, E).
val_bad(G, I) :- reads(G, I, Ty, C, Pu, T, R), responsible(G, E), not avail(E, I).
read_resp(R, E) :- reads(G, I, Ty, C, Pu, T, R), responsible(G, E).
purp_bad_read(R) :- required_part(R, P), read_resp(R, E), not avail(E, P).
purp_bad(G, I) :- reads(G, I, Ty, C, Pu, T, R), purp_bad_read(R).
compl_bad(G, I) :- val_bad(G, I).
compl_bad(G, I) :- purp_bad(G, I).
complete(G, I) :- has_read(G, I), not compl_bad(G, I).

% read timeliness: the latest production at or before the read is fresher
% than the volatility window (strict)
rt_candidate(R, Tp) :- reads(G, I, Ty, C, Pu, Tr, R), prod_tick(I, Tp), le(Tp, Tr).
rt_later(R, Tp) :- rt_candidate(R, Tp), rt_candidate(R, Tp2), lt(Tp, Tp2).
rt_latest(R, Tp) :- rt_candidate(R, Tp), not rt_later(R, Tp).
rt_ok(R) :- rt_latest(R, Tp), reads(G, I, Ty, C, Pu, Tr, R), expiry(I, Tp, Te), lt(Tr, Te).
rt_bad(R) :- reads(G, I, Ty, C, Pu, Tr, R), info_produced(I), not rt_ok(R).

% send timeliness: some destination read falls inside the send window;
% vacuous when the destination never reads after the send
dest_read(S, Trd) :- send_ev(S, G, I, D, Ts, Dl), reads(G2, I, Ty, C, Pu, Trd, R), responsible(G2, D), le(Ts, Trd).
send_ok(S) :- send_ev(S, G, I, D, Ts, Dl), dest_read(S, Trd), lt(Trd, Dl).
send_has_read(S) :- dest_read(S, Trd).
send_bad(S) :- send_has_read(S), not send_ok(S).
tl_applies(G, I) :- reads(G, I, Ty, C, Pu, T, R), info_produced(I).
tl_applies(G, I) :- sends(G, I, D, W, T).
tl_bad(G, I) :- reads(G, I, Ty, C, Pu, Tr, R), rt_bad(R).
tl_bad(G, I) :- send_ev(S, G, I, D, Ts, Dl), send_bad(S).
timely(G, I) :- tl_applies(G, I), not tl_bad(G, I).

% consistency: interdependent readers (same info, same purpose, at least
% two distinct actors) must share one read time
grp(I, Pu, R, E, T) :- reads(G, I, Ty, C, Pu, T, R), responsible(G, E).
interdep(I, Pu) :- grp(I, Pu, R1, E1, T1), grp(I, Pu, R2, E2, T2), not eq(E1, E2).
incons(I, Pu) :- interdep(I, Pu), grp(I, Pu, R1, E1, T1), grp(I, Pu, R2, E2, T2), not eq(T1, T2).
cons_bad(G, I) :- reads(G, I, Ty, C, Pu, T, R), incons(I, Pu).
consistent(G, I) :- has_read(G, I), not cons_bad(G, I).
)";
    return text;
}

namespace {

using datalog::Atom;
using datalog::EvalResult;
using datalog::Fact;
using datalog::Term;
using datalog::Value;

bool fact_present(const EvalResult& model, const std::string& pred,
                  std::initializer_list<Id> args) {
    Fact f;
    f.predicate = pred;
    for (const auto& a : args) f.values.push_back(Value{a});
    return model.facts().count(f) > 0;
}

}  // namespace

Analysis analyze_all_rules(const GoalModel& m) {
    Analysis out;
    datalog::Program program = build_iq_program(m);
    EvalResult model = datalog::evaluate(program);

    // Pair inventory mirrors the usage structure of the model.
    struct Pair {
        Id goal, info;
        bool produce = false, read = false, modify = false, send = false;
    };
    std::map<std::pair<Id, Id>, Pair> pairs;
    auto touch = [&](const Id& g, const Id& i) -> Pair& {
        auto& p = pairs[{g, i}];
        p.goal = g;
        p.info = i;
        return p;
    };
    for (const auto& r : m.produces) touch(r.goal, r.info).produce = true;
    for (const auto& r : m.reads) touch(r.goal, r.info).read = true;
    for (const auto& r : m.modifies) touch(r.goal, r.info).modify = true;
    for (const auto& r : m.sends) touch(r.goal, r.info).send = true;

    for (const auto& [key, p] : pairs) {
        Detail d;
        d.goal = p.goal;
        d.info = p.info;
        bool prod_or_read = p.produce || p.read;

        d.available = !fact_present(model, "avail_viol", {p.goal, p.info});
        d.permitted = !fact_present(model, "perm_viol", {p.goal, p.info});
        if (p.produce)
            d.believable_produce = !fact_present(model, "bel_prod_bad", {p.goal, p.info});
        if (p.read) d.believable_read = !fact_present(model, "bel_read_bad", {p.goal, p.info});
        if (prod_or_read) {
            d.source_trustworthy = !fact_present(model, "src_bad", {p.goal, p.info});
            d.provision_trustworthy = !fact_present(model, "chain_bad", {p.info}) &&
                                      fact_present(model, "has_producer", {p.info});
        }
        if (p.read) {
            d.value_complete = !fact_present(model, "val_bad", {p.goal, p.info});
            d.purpose_complete = !fact_present(model, "purp_bad", {p.goal, p.info});
            d.consistent = !fact_present(model, "cons_bad", {p.goal, p.info});
        }
        bool read_tl = p.read && fact_present(model, "info_produced", {p.info});
        if (read_tl) {
            bool bad = false;
            for (size_t k = 0; k < m.reads.size(); ++k)
                if (m.reads[k].goal == p.goal && m.reads[k].info == p.info &&
                    fact_present(model, "rt_bad", {"r" + std::to_string(k)}))
                    bad = true;
            d.read_timely = !bad;
        }
        if (p.send) {
            bool bad = false;
            for (size_t k = 0; k < m.sends.size(); ++k)
                if (m.sends[k].goal == p.goal && m.sends[k].info == p.info &&
                    fact_present(model, "send_bad", {"s" + std::to_string(k)}))
                    bad = true;
            d.send_timely = !bad;
        }

        auto emit = [&](Dimension dim, bool applies, bool satisfied) {
            if (!applies) return;
            out.verdicts.push_back(Verdict{p.goal, p.info, dim, satisfied, {}});
        };
        emit(Dimension::Accessibility, true,
             fact_present(model, "accessible", {p.goal, p.info}));
        emit(Dimension::Accuracy, prod_or_read,
             fact_present(model, "accurate", {p.goal, p.info}));
        emit(Dimension::Believability, prod_or_read,
             fact_present(model, "believable", {p.goal, p.info}));
        emit(Dimension::Trustworthiness, prod_or_read,
             fact_present(model, "trustworthy", {p.goal, p.info}));
        emit(Dimension::Completeness, p.read, fact_present(model, "complete", {p.goal, p.info}));
        emit(Dimension::Timeliness, read_tl || p.send,
             fact_present(model, "timely", {p.goal, p.info}));
        emit(Dimension::Consistency, p.read, fact_present(model, "consistent", {p.goal, p.info}));

        out.details.push_back(std::move(d));
    }

    auto vkey = [](const Verdict& v) {
        return std::make_tuple(v.goal, v.info, static_cast<int>(v.dimension));
    };
    std::sort(out.verdicts.begin(), out.verdicts.end(),
              [&](const Verdict& a, const Verdict& b) { return vkey(a) < vkey(b); });
    return out;
}

}  // namespace wfav::iq
