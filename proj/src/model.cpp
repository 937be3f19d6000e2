#include "wfav/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace wfav {

const char* to_string(InfoOp op) {
    switch (op) {
        case InfoOp::Produce: return "produce";
        case InfoOp::Read: return "read";
        case InfoOp::Modify: return "modify";
        case InfoOp::Send: return "send";
    }
    return "?";
}

ModelIndex::ModelIndex(const GoalModel& m) : model_(&m) {
    for (const auto& a : m.actors) actors_.emplace(a.id, &a);
    for (const auto& g : m.goals) goals_.emplace(g.id, &g);
    for (const auto& i : m.information) infos_.emplace(i.id, &i);
    for (const auto& p : m.grants) grants_.emplace(p.id, &p);
    for (const auto& d : m.decompositions) decomps_.emplace(d.parent, &d);
}

const Actor* ModelIndex::actor(const Id& id) const {
    auto it = actors_.find(id);
    return it == actors_.end() ? nullptr : it->second;
}
const Goal* ModelIndex::goal(const Id& id) const {
    auto it = goals_.find(id);
    return it == goals_.end() ? nullptr : it->second;
}
const Information* ModelIndex::info(const Id& id) const {
    auto it = infos_.find(id);
    return it == infos_.end() ? nullptr : it->second;
}
const PermissionGrant* ModelIndex::grant(const Id& id) const {
    auto it = grants_.find(id);
    return it == grants_.end() ? nullptr : it->second;
}
const Decomposition* ModelIndex::decomposition_of(const Id& parent) const {
    auto it = decomps_.find(parent);
    return it == decomps_.end() ? nullptr : it->second;
}

std::set<Id> ModelIndex::info_descendants_or_self(const Id& root) const {
    std::set<Id> out;
    std::vector<Id> stack{root};
    while (!stack.empty()) {
        Id cur = stack.back();
        stack.pop_back();
        if (!out.insert(cur).second) continue;
        if (const Information* i = info(cur))
            for (const auto& p : i->parts) stack.push_back(p);
    }
    return out;
}

namespace {

std::string join(const std::vector<Id>& ids) {
    std::string s;
    for (size_t k = 0; k < ids.size(); ++k) {
        if (k) s += ",";
        s += ids[k];
    }
    return s;
}

void add_error(std::vector<StructuralError>& errs, std::string code, std::string msg,
               std::vector<Id> elems) {
    errs.push_back(StructuralError{std::move(code), std::move(msg), std::move(elems)});
}

// Detects a cycle in the part-of graph; returns one offending cycle if any.
std::optional<std::vector<Id>> find_partof_cycle(const GoalModel& m, const ModelIndex& ix) {
    std::map<Id, int> state;  // 0 unvisited, 1 on stack, 2 done
    std::vector<Id> path;
    std::optional<std::vector<Id>> cycle;
    std::function<void(const Id&)> visit = [&](const Id& id) {
        if (cycle) return;
        int& st = state[id];
        if (st == 2) return;
        if (st == 1) {
            auto it = std::find(path.begin(), path.end(), id);
            cycle = std::vector<Id>(it, path.end());
            return;
        }
        st = 1;
        path.push_back(id);
        if (const Information* i = ix.info(id))
            for (const auto& p : i->parts) visit(p);
        path.pop_back();
        state[id] = 2;
    };
    for (const auto& i : m.information) visit(i.id);
    return cycle;
}

bool goal_has_info_relation(const GoalModel& m, const Id& goal) {
    for (const auto& r : m.produces)
        if (r.goal == goal) return true;
    for (const auto& r : m.reads)
        if (r.goal == goal) return true;
    for (const auto& r : m.modifies)
        if (r.goal == goal) return true;
    for (const auto& r : m.sends)
        if (r.goal == goal) return true;
    return false;
}

}  // namespace

std::vector<StructuralError> validate_model(const GoalModel& m) {
    std::vector<StructuralError> errs;
    ModelIndex ix(m);

    // Global id uniqueness across actors, goals, information and grants.
    {
        std::map<Id, int> seen;
        for (const auto& a : m.actors) seen[a.id]++;
        for (const auto& g : m.goals) seen[g.id]++;
        for (const auto& i : m.information) seen[i.id]++;
        for (const auto& p : m.grants) seen[p.id]++;
        for (const auto& [id, n] : seen)
            if (n > 1) add_error(errs, "duplicate-id", "id declared more than once: " + id, {id});
    }

    // Actors: only agents play roles, and played ids must be roles.
    std::map<Id, std::vector<Id>> players_of_role;
    for (const auto& a : m.actors) {
        if (a.kind == ActorKind::Role && !a.plays.empty())
            add_error(errs, "role-plays", "role cannot play other actors: " + a.id, {a.id});
        for (const auto& r : a.plays) {
            const Actor* target = ix.actor(r);
            if (!target)
                add_error(errs, "dangling-ref", a.id + " plays unknown actor " + r, {a.id, r});
            else if (target->kind != ActorKind::Role)
                add_error(errs, "plays-non-role", a.id + " plays non-role actor " + r, {a.id, r});
            else
                players_of_role[r].push_back(a.id);
        }
    }
    for (const auto& [role, players] : players_of_role)
        if (players.size() > 1)
            add_error(errs, "role-multiply-played",
                      "role " + role + " played by several agents {" + join(players) +
                          "}; flattening is ambiguous",
                      players);

    // Goals.
    for (const auto& g : m.goals)
        if (!ix.has_actor(g.actor))
            add_error(errs, "dangling-ref", "goal " + g.id + " owned by unknown actor " + g.actor,
                      {g.id, g.actor});

    // Decompositions.
    {
        std::map<Id, int> as_parent, as_child;
        for (const auto& d : m.decompositions) {
            if (!ix.has_goal(d.parent))
                add_error(errs, "dangling-ref", "decomposition of unknown goal " + d.parent,
                          {d.parent});
            if (d.children.size() < 2)
                add_error(errs, "decomposition-arity",
                          "decomposition arity < 2 at goal " + d.parent, {d.parent});
            as_parent[d.parent]++;
            for (const auto& c : d.children) {
                if (!ix.has_goal(c))
                    add_error(errs, "dangling-ref",
                              "decomposition child " + c + " of " + d.parent + " is unknown",
                              {d.parent, c});
                as_child[c]++;
                if (c == d.parent)
                    add_error(errs, "decomposition-cycle", "goal " + c + " decomposed into itself",
                              {c});
            }
        }
        for (const auto& [g, n] : as_parent)
            if (n > 1)
                add_error(errs, "multiple-decompositions",
                          "goal " + g + " is the parent of more than one decomposition", {g});
        for (const auto& [g, n] : as_child)
            if (n > 1)
                add_error(errs, "multiple-parents",
                          "goal " + g + " is a child of more than one decomposition", {g});

        // Forest check: walking parent->children must never revisit a goal.
        std::map<Id, int> state;
        std::function<bool(const Id&, std::vector<Id>&)> visit = [&](const Id& g,
                                                                     std::vector<Id>& path) {
            int& st = state[g];
            if (st == 1) {
                add_error(errs, "decomposition-cycle",
                          "decomposition cycle through {" + join(path) + "}", path);
                return false;
            }
            if (st == 2) return true;
            st = 1;
            path.push_back(g);
            if (const Decomposition* d = ix.decomposition_of(g))
                for (const auto& c : d->children)
                    if (!visit(c, path)) break;
            path.pop_back();
            state[g] = 2;
            return true;
        };
        for (const auto& d : m.decompositions) {
            std::vector<Id> path;
            visit(d.parent, path);
        }
    }

    // Information.
    for (const auto& i : m.information) {
        if (!ix.has_actor(i.owner))
            add_error(errs, "dangling-ref", "info " + i.id + " owned by unknown actor " + i.owner,
                      {i.id, i.owner});
        for (const auto& p : i.parts)
            if (!ix.has_info(p))
                add_error(errs, "dangling-ref", "info " + i.id + " has unknown part " + p,
                          {i.id, p});
    }
    if (auto cyc = find_partof_cycle(m, ix))
        add_error(errs, "partof-cycle", "part-of cycle {" + join(*cyc) + "}", *cyc);

    // Relations: referential integrity plus the per-type constraints.
    {
        std::set<std::pair<Id, Id>> produce_pairs;
        for (const auto& r : m.produces) {
            if (!ix.has_goal(r.goal) || !ix.has_info(r.info))
                add_error(errs, "dangling-ref",
                          "produce " + r.goal + " -> " + r.info + " references unknown ids",
                          {r.goal, r.info});
            if (!produce_pairs.insert({r.goal, r.info}).second)
                add_error(errs, "duplicate-produce",
                          "more than one produce relation for (" + r.goal + "," + r.info + ")",
                          {r.goal, r.info});
        }
    }
    for (const auto& r : m.reads) {
        if (!ix.has_goal(r.goal) || !ix.has_info(r.info)) {
            add_error(errs, "dangling-ref",
                      "read " + r.goal + " -> " + r.info + " references unknown ids",
                      {r.goal, r.info});
            continue;
        }
        auto scope = ix.info_descendants_or_self(r.info);
        for (const auto& p : r.required_parts)
            if (!scope.count(p))
                add_error(errs, "required-part-out-of-scope",
                          "read of " + r.info + " by " + r.goal + " requires " + p +
                              " which is not a sub-part of " + r.info,
                          {r.goal, r.info, p});
    }
    for (const auto& r : m.modifies)
        if (!ix.has_goal(r.goal) || !ix.has_info(r.info))
            add_error(errs, "dangling-ref",
                      "modify " + r.goal + " -> " + r.info + " references unknown ids",
                      {r.goal, r.info});
    for (const auto& r : m.sends) {
        if (!ix.has_goal(r.goal) || !ix.has_info(r.info) || !ix.has_actor(r.destination))
            add_error(errs, "dangling-ref",
                      "send " + r.goal + " -> " + r.info + " references unknown ids",
                      {r.goal, r.info, r.destination});
        if (r.timeliness == 0)
            add_error(errs, "nonpositive-window",
                      "send timeliness must be positive on (" + r.goal + "," + r.info + ")",
                      {r.goal, r.info});
    }
    for (const auto& p : m.provisions) {
        if (!ix.has_actor(p.source) || !ix.has_actor(p.target) || !ix.has_info(p.info))
            add_error(errs, "dangling-ref", "provision references unknown ids",
                      {p.source, p.target, p.info});
        if (p.source == p.target)
            add_error(errs, "self-provision", "provision from " + p.source + " to itself",
                      {p.source, p.info});
        if (p.transmission_time == 0)
            add_error(errs, "nonpositive-window",
                      "provision transmission time must be positive (" + p.source + "->" +
                          p.target + ")",
                      {p.source, p.target, p.info});
    }

    // Delegations: referential integrity, one outgoing edge per (actor, subject),
    // acyclic chains per subject.
    {
        std::map<std::pair<Id, std::string>, std::vector<const Delegation*>> by_subject;
        for (const auto& d : m.delegations) {
            if (!ix.has_actor(d.delegator) || !ix.has_actor(d.delegatee))
                add_error(errs, "dangling-ref", "delegation between unknown actors",
                          {d.delegator, d.delegatee});
            bool subject_ok = d.subject_kind == DelegationSubjectKind::Goal
                                  ? ix.has_goal(d.subject)
                                  : ix.grant(d.subject) != nullptr;
            if (!subject_ok)
                add_error(errs, "dangling-ref", "delegation of unknown subject " + d.subject,
                          {d.delegator, d.subject});
            std::string key = (d.subject_kind == DelegationSubjectKind::Goal ? "g:" : "p:") +
                              d.subject;
            by_subject[{d.delegator, key}].push_back(&d);
        }
        for (const auto& [k, ds] : by_subject)
            if (ds.size() > 1)
                add_error(errs, "ambiguous-delegation",
                          "actor " + k.first + " delegates the same subject more than once",
                          {k.first, ds.front()->subject});
        // Cycle detection per subject: follow delegator -> delegatee edges.
        std::map<std::string, std::vector<std::pair<Id, Id>>> edges;
        for (const auto& d : m.delegations) {
            std::string key = (d.subject_kind == DelegationSubjectKind::Goal ? "g:" : "p:") +
                              d.subject;
            edges[key].push_back({d.delegator, d.delegatee});
        }
        for (const auto& [subject, es] : edges) {
            std::map<Id, Id> next;
            for (const auto& [a, b] : es) next[a] = b;  // ambiguity already reported
            for (const auto& [start, unused] : next) {
                (void)unused;
                std::set<Id> seen{start};
                Id cur = start;
                while (next.count(cur)) {
                    cur = next[cur];
                    if (!seen.insert(cur).second) {
                        add_error(errs, "delegation-cycle",
                                  "delegation cycle for subject " + subject.substr(2),
                                  {subject.substr(2), cur});
                        break;
                    }
                }
            }
        }
    }

    // Permission grants: referential integrity and rooting at the owner.
    for (const auto& g : m.grants) {
        if (!ix.has_actor(g.grantor) || !ix.has_actor(g.grantee) || !ix.has_info(g.info))
            add_error(errs, "dangling-ref", "grant " + g.id + " references unknown ids", {g.id});
        if (g.ops.empty())
            add_error(errs, "empty-grant", "grant " + g.id + " grants no operations", {g.id});
    }
    {
        PermissionClosure perms(m);
        for (const auto& g : m.grants) {
            if (!ix.has_info(g.info) || !ix.has_actor(g.grantor)) continue;
            for (InfoOp op : g.ops)
                if (!perms.holds(g.grantor, g.info, op))
                    add_error(errs, "grant-not-rooted",
                              "grantor " + g.grantor + " of " + g.id + " does not hold " +
                                  std::string(to_string(op)) + " on " + g.info +
                                  " (chain not rooted at the owner)",
                              {g.id, g.grantor, g.info});
        }
    }

    // Trust: referential integrity and no contradictory edge pairs.
    {
        std::set<std::tuple<Id, Id, int, Id, int>> seen;  // (trustor,trustee,scopekind,scope,pol)
        for (const auto& t : m.trusts) {
            if (!ix.has_actor(t.trustor) || !ix.has_actor(t.trustee))
                add_error(errs, "dangling-ref", "trust edge between unknown actors",
                          {t.trustor, t.trustee});
            bool scope_ok = t.scope_kind == TrustScopeKind::ProducedInfo ? ix.has_info(t.scope)
                            : t.scope_kind == TrustScopeKind::DelegatedGoal
                                ? ix.has_goal(t.scope)
                                : ix.grant(t.scope) != nullptr;
            if (!scope_ok)
                add_error(errs, "dangling-ref", "trust edge with unknown scope " + t.scope,
                          {t.trustor, t.trustee, t.scope});
            seen.insert({t.trustor, t.trustee, static_cast<int>(t.scope_kind), t.scope,
                         static_cast<int>(t.polarity)});
        }
        for (const auto& t : m.trusts) {
            int other = t.polarity == TrustPolarity::Trust ? 1 : 0;
            if (seen.count({t.trustor, t.trustee, static_cast<int>(t.scope_kind), t.scope, other}) &&
                t.polarity == TrustPolarity::Trust)
                add_error(errs, "contradictory-trust",
                          t.trustor + " both trusts and distrusts " + t.trustee + " on " + t.scope,
                          {t.trustor, t.trustee, t.scope});
        }
    }

    // Leaf goals must carry informational relations or be flagged atomic-no-info;
    // the flag on a goal that does have relations is contradictory.
    {
        auto leaves = leaf_goals(m);
        for (const auto& g : m.goals) {
            bool has_rel = goal_has_info_relation(m, g.id);
            if (leaves.count(g.id) && !has_rel && !g.atomic_no_info)
                add_error(errs, "leaf-without-info",
                          "leaf goal " + g.id +
                              " has no informational relation and is not marked atomic-no-info",
                          {g.id});
            if (g.atomic_no_info && has_rel)
                add_error(errs, "atomic-with-info",
                          "goal " + g.id + " is marked atomic-no-info but has informational "
                                           "relations",
                          {g.id});
        }
    }

    std::sort(errs.begin(), errs.end(), [](const StructuralError& a, const StructuralError& b) {
        return std::tie(a.code, a.message) < std::tie(b.code, b.message);
    });
    return errs;
}

std::set<Id> leaf_goals(const GoalModel& m) {
    std::set<Id> out;
    std::set<Id> parents;
    for (const auto& d : m.decompositions) parents.insert(d.parent);
    for (const auto& g : m.goals)
        if (!parents.count(g.id)) out.insert(g.id);
    return out;
}

ResponsibilityResult resolve_responsibility(const GoalModel& m, const Id& goal) {
    ResponsibilityResult res;
    Id cur;
    for (const auto& g : m.goals)
        if (g.id == goal) cur = g.actor;
    if (cur.empty()) {
        res.error = "unknown goal " + goal;
        return res;
    }
    std::map<Id, Id> next;
    for (const auto& d : m.delegations)
        if (d.subject_kind == DelegationSubjectKind::Goal && d.subject == goal)
            next[d.delegator] = d.delegatee;
    std::set<Id> seen;
    res.chain.push_back(cur);
    seen.insert(cur);
    while (next.count(cur)) {
        cur = next[cur];
        if (!seen.insert(cur).second) {
            res.error = "delegation cycle through " + cur + " for goal " + goal;
            return res;
        }
        res.chain.push_back(cur);
    }
    res.actor = cur;
    return res;
}

GoalModel flatten_roles(const GoalModel& m) {
    std::map<Id, Id> subst;  // role -> its single player
    for (const auto& a : m.actors)
        for (const auto& r : a.plays) subst[r] = a.id;
    if (subst.empty()) return m;

    auto rw = [&](const Id& id) {
        auto it = subst.find(id);
        return it == subst.end() ? id : it->second;
    };

    GoalModel out = m;
    out.actors.clear();
    for (const auto& a : m.actors) {
        if (subst.count(a.id)) continue;  // substituted role disappears
        Actor copy = a;
        copy.plays.clear();
        out.actors.push_back(copy);
    }
    for (auto& g : out.goals) g.actor = rw(g.actor);
    for (auto& i : out.information) i.owner = rw(i.owner);
    for (auto& s : out.sends) s.destination = rw(s.destination);
    for (auto& p : out.provisions) {
        p.source = rw(p.source);
        p.target = rw(p.target);
    }
    for (auto& d : out.delegations) {
        d.delegator = rw(d.delegator);
        d.delegatee = rw(d.delegatee);
    }
    for (auto& g : out.grants) {
        g.grantor = rw(g.grantor);
        g.grantee = rw(g.grantee);
    }
    for (auto& t : out.trusts) {
        t.trustor = rw(t.trustor);
        t.trustee = rw(t.trustee);
    }
    // Self-provisions can appear when source and target collapse; drop them.
    std::vector<Provision> kept;
    for (const auto& p : out.provisions)
        if (p.source != p.target) kept.push_back(p);
    out.provisions = std::move(kept);
    // Same for delegations and trust edges that collapse onto one actor.
    {
        std::vector<Delegation> kd;
        for (const auto& d : out.delegations)
            if (d.delegator != d.delegatee) kd.push_back(d);
        out.delegations = std::move(kd);
        std::vector<TrustRel> kt;
        for (const auto& t : out.trusts)
            if (t.trustor != t.trustee) kt.push_back(t);
        out.trusts = std::move(kt);
    }
    return out;
}

PermissionClosure::PermissionClosure(const GoalModel& m) {
    static const InfoOp kOps[] = {InfoOp::Produce, InfoOp::Read, InfoOp::Modify, InfoOp::Send};
    // Owners hold everything on their information.
    for (const auto& i : m.information)
        for (InfoOp op : kOps) holds_.insert({i.owner, i.id, op});

    // Holders of a grant: the grantee plus transitive permission delegatees.
    std::map<Id, std::set<Id>> grant_holders;
    for (const auto& g : m.grants) grant_holders[g.id].insert(g.grantee);
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& d : m.delegations) {
            if (d.subject_kind != DelegationSubjectKind::Permission) continue;
            auto it = grant_holders.find(d.subject);
            if (it == grant_holders.end()) continue;
            if (it->second.count(d.delegator) && it->second.insert(d.delegatee).second)
                changed = true;
        }
        // Grants take effect only once their grantor holds the operation.
        for (const auto& g : m.grants) {
            for (InfoOp op : g.ops) {
                if (!holds_.count({g.grantor, g.info, op})) continue;
                for (const auto& holder : grant_holders[g.id])
                    if (holds_.insert({holder, g.info, op}).second) changed = true;
            }
        }
    }
}

bool PermissionClosure::holds(const Id& actor, const Id& info, InfoOp op) const {
    return holds_.count({actor, info, op}) > 0;
}

}  // namespace wfav
