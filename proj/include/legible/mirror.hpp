#pragma once

#include "legible/mdp.hpp"

#include <span>
#include <vector>

namespace legible {

/// Ordered set of policies over a shared state/action space, with one
/// designated as currently pursued.
class PolicyEnsemble {
public:
    PolicyEnsemble(std::vector<QTable> tables, std::size_t pursued_index);

    std::size_t size() const { return tables_.size(); }
    std::size_t state_count() const { return tables_[0].state_count(); }
    std::size_t action_count() const { return tables_[0].action_count(); }
    std::size_t pursued_index() const { return pursued_index_; }
    void set_pursued_index(std::size_t index);

    const QTable& table(std::size_t policy) const;
    const QTable& pursued() const { return tables_[pursued_index_]; }

private:
    std::vector<QTable> tables_;
    std::size_t pursued_index_;
};

/// How the agent believes the observer predicts its actions: the
/// observer-side Q-tables, a strictly positive prior over policies, and
/// the transform turning Q-rows into action probabilities.
struct ObserverModel {
    PolicyEnsemble ensemble;
    std::vector<double> prior;
    DistributionModel transform_g;

    ObserverModel(PolicyEnsemble ensemble_, std::vector<double> prior_, DistributionModel g);

    /// Uniform prior over the ensemble.
    static ObserverModel uniform(PolicyEnsemble ensemble_, DistributionModel g);
};

struct AgentModel {
    PolicyEnsemble ensemble;
    DistributionModel transform_f;

    AgentModel(PolicyEnsemble ensemble_, DistributionModel f);
};

struct LegibilityConfig {
    double alpha = 1.0;
    double log_floor = -1e6;

    void validate() const;
};

struct PosteriorResult {
    std::vector<double> probabilities;
    bool degenerate = false; // all likelihoods were zero; prior returned
};

/// Posterior over policies from per-policy likelihoods of one observed
/// action. A zero normalizer returns the prior, flagged.
PosteriorResult posterior_from_likelihoods(std::span<const double> likelihoods,
                                           std::span<const double> prior);

/// Probability the observer model assigns to action a under policy
/// `policy_index` at state s.
double observer_likelihood(const ObserverModel& obs, std::size_t policy_index, StateId s,
                           ActionId a);

/// Posterior over policies after observing (s, a), all policies evaluated
/// at the same state.
PosteriorResult observer_posterior(const ObserverModel& obs, StateId s, ActionId a);

/// Same, with each policy evaluated at its own state. Used when policies
/// perceive a shared world through different observation encodings.
PosteriorResult observer_posterior(const ObserverModel& obs, std::span<const StateId> policy_states,
                                   ActionId a);

struct CrossEntropyTerms {
    double direct = 0.0;           // -log posterior of the pursued policy
    double pursued_log_likelihood = 0.0;
    double log_evidence = 0.0;     // log of the prior-weighted mean likelihood
    double log_prior = 0.0;
    bool degenerate = false;

    /// -log p(a|pursued,s) + log E[p(a|.,s)] - log p(pursued).
    double expansion() const { return -pursued_log_likelihood + log_evidence - log_prior; }
};

/// Distance between the agent's policy point mass and the observer's
/// inferred policy distribution for one observation, with its expanded
/// form for verification. Logs are clamped at cfg.log_floor.
CrossEntropyTerms cross_entropy_terms(const AgentModel& agent, const ObserverModel& obs, StateId s,
                                      ActionId a, const LegibilityConfig& cfg);

double legibility_cross_entropy(const AgentModel& agent, const ObserverModel& obs, StateId s,
                                ActionId a, const LegibilityConfig& cfg);

/// Q-row of the pursued policy with the legibility term added:
/// Q(s,a) + alpha * log posterior(pursued | s, a). At alpha = 0 the row is
/// returned untouched.
std::vector<double> legible_q(const AgentModel& agent, const ObserverModel& obs, StateId s,
                              const LegibilityConfig& cfg);

/// Per-policy-state variant; policy_states[i] is policy i's view of the
/// current world state.
std::vector<double> legible_q(const AgentModel& agent, const ObserverModel& obs,
                              std::span<const StateId> policy_states, const LegibilityConfig& cfg);

/// Selects an action from the regularized row via the given selection
/// model. Deterministic given the generator state.
ActionId legible_action(const AgentModel& agent, const ObserverModel& obs, StateId s,
                        const LegibilityConfig& cfg, const DistributionModel& selection, Rng& rng);

ActionId legible_action(const AgentModel& agent, const ObserverModel& obs,
                        std::span<const StateId> policy_states, const LegibilityConfig& cfg,
                        const DistributionModel& selection, Rng& rng);

} // namespace legible
