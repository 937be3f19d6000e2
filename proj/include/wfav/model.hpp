#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

// Goal-model domain types: actors, goals, information and the social
// relations (produce/read/modify/send, provision, delegation, permission,
// trust) that the analyses run over. A GoalModel is immutable once
// validated; everything downstream treats it as read-only.

namespace wfav {

using Id = std::string;
using Tick = std::uint64_t;

enum class ActorKind { Agent, Role };

struct Actor {
    Id id;
    ActorKind kind = ActorKind::Agent;
    std::vector<Id> plays;  // roles; only meaningful for agents
};

struct Goal {
    Id id;
    std::string label;
    Id actor;                        // the actor whose model contains the goal
    bool atomic_no_info = false;     // explicit "no informational relations" marker
    bool exclude_from_mapping = false;
};

enum class DecompKind { And, Or };

struct Decomposition {
    Id parent;
    DecompKind kind = DecompKind::And;
    std::vector<Id> children;  // order is significant for And
};

struct Information {
    Id id;
    Tick volatility = 0;  // value-change period in ticks
    Id owner;
    std::vector<Id> parts;  // direct sub-parts
};

struct ProduceRel {
    Id goal;
    Id info;
    bool believability_check = false;  // B / NB
    Tick produced_at = 0;
};

enum class ReadType { Optional, Required };

struct ReadRel {
    Id goal;
    Id info;
    ReadType type = ReadType::Required;
    bool believability_check = false;
    std::string purpose;
    std::vector<Id> required_parts;  // subset of descendants-or-self of `info`
    Tick read_at = 0;
};

struct ModifyRel {
    Id goal;
    Id info;
};

struct SendRel {
    Id goal;
    Id info;
    Id destination;
    Tick timeliness = 1;  // max acceptable transmission window, > 0
    Tick sent_at = 0;
};

enum class ProvisionKind { Plain, IntegrityPreserving };  // P / IP

struct Provision {
    Id source;
    Id target;
    Id info;
    ProvisionKind kind = ProvisionKind::Plain;
    Tick transmission_time = 1;  // > 0
};

enum class DelegationSubjectKind { Goal, Permission };

struct Delegation {
    Id delegator;
    Id delegatee;
    DelegationSubjectKind subject_kind = DelegationSubjectKind::Goal;
    Id subject;  // goal id or permission-grant id
};

enum class InfoOp { Produce, Read, Modify, Send };

const char* to_string(InfoOp op);

struct PermissionGrant {
    Id id;
    Id grantor;  // must hold the granted ops itself (rooted at the owner)
    Id grantee;
    Id info;
    std::set<InfoOp> ops;
};

enum class TrustPolarity { Trust, Distrust };
enum class TrustScopeKind { DelegatedGoal, DelegatedPermission, ProducedInfo };

struct TrustRel {
    Id trustor;
    Id trustee;
    TrustPolarity polarity = TrustPolarity::Trust;
    TrustScopeKind scope_kind = TrustScopeKind::ProducedInfo;
    Id scope;
};

struct GoalModel {
    std::vector<Actor> actors;
    std::vector<Goal> goals;
    std::vector<Decomposition> decompositions;
    std::vector<Information> information;
    std::vector<ProduceRel> produces;
    std::vector<ReadRel> reads;
    std::vector<ModifyRel> modifies;
    std::vector<SendRel> sends;
    std::vector<Provision> provisions;
    std::vector<Delegation> delegations;
    std::vector<PermissionGrant> grants;
    std::vector<TrustRel> trusts;
};

struct StructuralError {
    std::string code;     // stable machine-readable tag, e.g. "decomposition-arity"
    std::string message;
    std::vector<Id> elements;
};

// Index over a model for id lookups. Built once, read-only.
class ModelIndex {
public:
    explicit ModelIndex(const GoalModel& m);

    const Actor* actor(const Id& id) const;
    const Goal* goal(const Id& id) const;
    const Information* info(const Id& id) const;
    const PermissionGrant* grant(const Id& id) const;
    const Decomposition* decomposition_of(const Id& parent) const;

    bool has_actor(const Id& id) const { return actor(id) != nullptr; }
    bool has_goal(const Id& id) const { return goal(id) != nullptr; }
    bool has_info(const Id& id) const { return info(id) != nullptr; }

    // Descendants of an information item under part-of, including itself.
    std::set<Id> info_descendants_or_self(const Id& info) const;

    const GoalModel& model() const { return *model_; }

private:
    const GoalModel* model_;
    std::map<Id, const Actor*> actors_;
    std::map<Id, const Goal*> goals_;
    std::map<Id, const Information*> infos_;
    std::map<Id, const PermissionGrant*> grants_;
    std::map<Id, const Decomposition*> decomps_;
};

// Returns the empty list iff every structural invariant holds. Pure; two
// calls on the same model return identical error lists.
std::vector<StructuralError> validate_model(const GoalModel& model);

// Goals that are not the parent of any decomposition.
std::set<Id> leaf_goals(const GoalModel& model);

struct ResponsibilityResult {
    Id actor;                         // end of the delegation chain
    std::vector<Id> chain;            // actors visited, starting at the owner
    std::optional<std::string> error; // set on a delegation cycle
};

// Walks the goal-delegation chain from the goal's owning actor to the final
// delegatee. A revisited actor is reported as a cycle.
ResponsibilityResult resolve_responsibility(const GoalModel& model, const Id& goal);

// Substitutes every role played by exactly one agent with that agent across
// all references and drops the role. Roles played by nobody are kept (they
// act for themselves); roles played by more than one agent are rejected by
// validate_model beforehand.
GoalModel flatten_roles(const GoalModel& model);

// Least-fixpoint permission closure rooted at information owners: an actor
// holds an operation on an item iff it owns the item, or it holds a grant
// (directly or via permission delegation) whose grantor holds the operation.
class PermissionClosure {
public:
    explicit PermissionClosure(const GoalModel& m);
    bool holds(const Id& actor, const Id& info, InfoOp op) const;

private:
    std::set<std::tuple<Id, Id, InfoOp>> holds_;
};

}  // namespace wfav
