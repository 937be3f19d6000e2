#include <algorithm>
#include <sstream>

#include "wfav/parse.hpp"

// Canonical printers. Statements are emitted grouped by kind and sorted by
// id so equal models print byte-identically; And-decomposition child order
// and read required-part sets keep their semantics (order preserved for
// children, sets sorted).

namespace wfav {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string idset(std::vector<Id> ids) {
    std::sort(ids.begin(), ids.end());
    std::string out = "{";
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ", ";
        out += ids[i];
    }
    out += "}";
    return out;
}

template <typename T, typename Key>
std::vector<const T*> sorted_by(const std::vector<T>& xs, Key key) {
    std::vector<const T*> ptrs;
    for (const auto& x : xs) ptrs.push_back(&x);
    std::stable_sort(ptrs.begin(), ptrs.end(),
                     [&](const T* a, const T* b) { return key(*a) < key(*b); });
    return ptrs;
}

}  // namespace

std::string print_goal_model(const GoalModel& m) {
    std::ostringstream out;
    out << "# gqm\n";

    for (const Actor* a : sorted_by(m.actors, [](const Actor& x) { return x.id; })) {
        out << "actor " << a->id << " kind=" << (a->kind == ActorKind::Agent ? "agent" : "role");
        if (!a->plays.empty()) out << " plays=" << idset(a->plays);
        out << "\n";
    }
    for (const Information* i : sorted_by(m.information, [](const Information& x) { return x.id; })) {
        out << "info " << i->id << " volatility=" << i->volatility << " owner=" << i->owner
            << "\n";
    }
    for (const Information* i : sorted_by(m.information, [](const Information& x) { return x.id; })) {
        std::vector<Id> parts = i->parts;
        std::sort(parts.begin(), parts.end());
        for (const auto& p : parts) out << "partof " << p << " " << i->id << "\n";
    }
    for (const Goal* g : sorted_by(m.goals, [](const Goal& x) { return x.id; })) {
        out << "goal " << g->id << " " << quote(g->label) << " actor=" << g->actor;
        if (g->atomic_no_info) out << " atomic-no-info";
        if (g->exclude_from_mapping) out << " nomap";
        out << "\n";
    }
    for (const Decomposition* d :
         sorted_by(m.decompositions, [](const Decomposition& x) { return x.parent; })) {
        out << "decompose " << d->parent << " " << (d->kind == DecompKind::And ? "and" : "or")
            << " {";
        for (size_t i = 0; i < d->children.size(); ++i) {
            if (i) out << ", ";
            out << d->children[i];
        }
        out << "}\n";
    }
    for (const ProduceRel* r : sorted_by(m.produces, [](const ProduceRel& x) {
             return std::make_tuple(x.goal, x.info);
         })) {
        out << "produce " << r->goal << " " << r->info
            << " check=" << (r->believability_check ? "B" : "NB") << " at=" << r->produced_at
            << "\n";
    }
    for (const ReadRel* r : sorted_by(m.reads, [](const ReadRel& x) {
             return std::make_tuple(x.goal, x.info, x.read_at, x.purpose,
                                    static_cast<int>(x.type));
         })) {
        out << "read " << r->goal << " " << r->info
            << " type=" << (r->type == ReadType::Required ? "R" : "O")
            << " check=" << (r->believability_check ? "B" : "NB")
            << " purpose=" << quote(r->purpose) << " at=" << r->read_at;
        if (!r->required_parts.empty()) out << " parts=" << idset(r->required_parts);
        out << "\n";
    }
    for (const ModifyRel* r : sorted_by(m.modifies, [](const ModifyRel& x) {
             return std::make_tuple(x.goal, x.info);
         })) {
        out << "modify " << r->goal << " " << r->info << "\n";
    }
    for (const SendRel* r : sorted_by(m.sends, [](const SendRel& x) {
             return std::make_tuple(x.goal, x.info, x.destination, x.sent_at);
         })) {
        out << "send " << r->goal << " " << r->info << " dest=" << r->destination
            << " within=" << r->timeliness << " at=" << r->sent_at << "\n";
    }
    for (const Provision* p : sorted_by(m.provisions, [](const Provision& x) {
             return std::make_tuple(x.source, x.target, x.info,
                                    static_cast<int>(x.kind));
         })) {
        out << "provide " << p->source << " " << p->target << " " << p->info
            << " kind=" << (p->kind == ProvisionKind::IntegrityPreserving ? "IP" : "P")
            << " time=" << p->transmission_time << "\n";
    }
    for (const Delegation* d : sorted_by(m.delegations, [](const Delegation& x) {
             return std::make_tuple(x.delegator, x.delegatee, static_cast<int>(x.subject_kind),
                                    x.subject);
         })) {
        out << "delegate " << d->delegator << " " << d->delegatee << " "
            << (d->subject_kind == DelegationSubjectKind::Goal ? "goal=" : "permission=")
            << d->subject << "\n";
    }
    for (const PermissionGrant* g :
         sorted_by(m.grants, [](const PermissionGrant& x) { return x.id; })) {
        out << "permit " << g->id << " grantor=" << g->grantor << " grantee=" << g->grantee
            << " info=" << g->info << " ops={";
        bool first = true;
        for (InfoOp op : {InfoOp::Produce, InfoOp::Read, InfoOp::Modify, InfoOp::Send}) {
            if (!g->ops.count(op)) continue;
            if (!first) out << ", ";
            out << to_string(op);
            first = false;
        }
        out << "}\n";
    }
    for (const TrustRel* t : sorted_by(m.trusts, [](const TrustRel& x) {
             return std::make_tuple(x.trustor, x.trustee, static_cast<int>(x.scope_kind), x.scope,
                                    static_cast<int>(x.polarity));
         })) {
        out << (t->polarity == TrustPolarity::Trust ? "trust " : "distrust ") << t->trustor << " "
            << t->trustee << " ";
        switch (t->scope_kind) {
            case TrustScopeKind::ProducedInfo: out << "produced="; break;
            case TrustScopeKind::DelegatedGoal: out << "goal="; break;
            case TrustScopeKind::DelegatedPermission: out << "permission="; break;
        }
        out << t->scope << "\n";
    }
    return out.str();
}

std::string print_wfa_net(const WfaNet& net) {
    std::ostringstream out;
    out << "# wfa\n";

    std::vector<Id> places = net.places;
    std::sort(places.begin(), places.end());
    for (const auto& p : places) out << "place " << p << "\n";

    for (const WfaTransition* t :
         sorted_by(net.transitions, [](const WfaTransition& x) { return x.id; })) {
        out << "trans " << t->id << " res=" << t->res;
        auto emit_set = [&](const char* key, std::vector<Id> xs) {
            if (xs.empty()) return;
            std::sort(xs.begin(), xs.end());
            out << " " << key << "=" << "{";
            for (size_t i = 0; i < xs.size(); ++i) {
                if (i) out << ", ";
                out << xs[i];
            }
            out << "}";
        };
        emit_set("pd", t->pd);
        emit_set("rd", t->rd);
        emit_set("md", t->md);
        if (!t->sd.empty()) {
            std::vector<SendAnnotation> sd = t->sd;
            std::sort(sd.begin(), sd.end());
            out << " sd={";
            for (size_t i = 0; i < sd.size(); ++i) {
                if (i) out << ", ";
                out << sd[i].info << "->" << sd[i].destination;
            }
            out << "}";
        }
        out << "\n";
    }

    std::vector<std::pair<Id, Id>> arcs = net.arcs;
    std::sort(arcs.begin(), arcs.end());
    for (const auto& [a, b] : arcs) out << "arc " << a << " " << b << "\n";

    if (!net.initial_place.empty()) out << "initial " << net.initial_place << "\n";
    if (!net.final_place.empty()) out << "final " << net.final_place << "\n";
    return out.str();
}

}  // namespace wfav
