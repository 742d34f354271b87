#include "legible/mirror.hpp"

#include <cmath>
#include <stdexcept>

namespace legible {

PolicyEnsemble::PolicyEnsemble(std::vector<QTable> tables, std::size_t pursued_index)
    : tables_(std::move(tables)), pursued_index_(pursued_index) {
    if (tables_.empty()) throw std::invalid_argument("PolicyEnsemble: no policies");
    for (const QTable& t : tables_) {
        if (t.state_count() != tables_[0].state_count() ||
            t.action_count() != tables_[0].action_count())
            throw std::invalid_argument("PolicyEnsemble: member dimensions disagree");
    }
    if (pursued_index_ >= tables_.size())
        throw std::invalid_argument("PolicyEnsemble: pursued index out of range");
}

void PolicyEnsemble::set_pursued_index(std::size_t index) {
    if (index >= tables_.size())
        throw std::invalid_argument("PolicyEnsemble: pursued index out of range");
    pursued_index_ = index;
}

const QTable& PolicyEnsemble::table(std::size_t policy) const {
    if (policy >= tables_.size())
        throw std::out_of_range("PolicyEnsemble: policy index out of range");
    return tables_[policy];
}

ObserverModel::ObserverModel(PolicyEnsemble ensemble_, std::vector<double> prior_,
                             DistributionModel g)
    : ensemble(std::move(ensemble_)), prior(std::move(prior_)), transform_g(g) {
    if (prior.size() != ensemble.size())
        throw std::invalid_argument("ObserverModel: prior size does not match ensemble");
    double sum = 0.0;
    for (double p : prior) {
        if (!(p > 0.0)) throw std::invalid_argument("ObserverModel: prior must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ObserverModel: prior does not sum to 1");
    validate(transform_g);
}

ObserverModel ObserverModel::uniform(PolicyEnsemble ensemble_, DistributionModel g) {
    const std::size_t n = ensemble_.size();
    return ObserverModel(std::move(ensemble_), std::vector<double>(n, 1.0 / static_cast<double>(n)),
                         g);
}

AgentModel::AgentModel(PolicyEnsemble ensemble_, DistributionModel f)
    : ensemble(std::move(ensemble_)), transform_f(f) {
    validate(transform_f);
}

void LegibilityConfig::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("LegibilityConfig: alpha must be >= 0");
    if (!(std::isfinite(log_floor) && log_floor < 0.0))
        throw std::invalid_argument("LegibilityConfig: log_floor must be finite and negative");
}

PosteriorResult posterior_from_likelihoods(std::span<const double> likelihoods,
                                           std::span<const double> prior) {
    if (likelihoods.size() != prior.size() || likelihoods.empty())
        throw std::invalid_argument("posterior_from_likelihoods: size mismatch");
    PosteriorResult result;
    result.probabilities.resize(likelihoods.size());
    double normalizer = 0.0;
    for (std::size_t i = 0; i < likelihoods.size(); ++i) {
        result.probabilities[i] = likelihoods[i] * prior[i];
        normalizer += result.probabilities[i];
    }
    if (normalizer <= 0.0) {
        result.probabilities.assign(prior.begin(), prior.end());
        result.degenerate = true;
        return result;
    }
    for (double& p : result.probabilities) p /= normalizer;
    return result;
}

double observer_likelihood(const ObserverModel& obs, std::size_t policy_index, StateId s,
                           ActionId a) {
    const ActionDistribution dist =
        action_distribution(obs.transform_g, obs.ensemble.table(policy_index), s);
    return dist.at(a);
}

namespace {

std::vector<double> likelihood_vector(const ObserverModel& obs, std::span<const StateId> states,
                                      ActionId a) {
    if (states.size() != obs.ensemble.size())
        throw std::invalid_argument("observer_posterior: one state per policy required");
    std::vector<double> likelihoods(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        likelihoods[i] = observer_likelihood(obs, i, states[i], a);
    return likelihoods;
}

double clamped_log(double p, double floor) {
    if (p <= 0.0) return floor;
    return std::max(std::log(p), floor);
}

} // namespace

PosteriorResult observer_posterior(const ObserverModel& obs, StateId s, ActionId a) {
    const std::vector<StateId> states(obs.ensemble.size(), s);
    return observer_posterior(obs, states, a);
}

PosteriorResult observer_posterior(const ObserverModel& obs, std::span<const StateId> policy_states,
                                   ActionId a) {
    return posterior_from_likelihoods(likelihood_vector(obs, policy_states, a), obs.prior);
}

CrossEntropyTerms cross_entropy_terms(const AgentModel& agent, const ObserverModel& obs, StateId s,
                                      ActionId a, const LegibilityConfig& cfg) {
    cfg.validate();
    const std::size_t pursued = agent.ensemble.pursued_index();
    if (pursued >= obs.ensemble.size())
        throw std::invalid_argument("cross_entropy_terms: pursued index outside observer ensemble");

    const std::vector<StateId> states(obs.ensemble.size(), s);
    const std::vector<double> likelihoods = likelihood_vector(obs, states, a);
    const PosteriorResult posterior = posterior_from_likelihoods(likelihoods, obs.prior);

    CrossEntropyTerms terms;
    terms.degenerate = posterior.degenerate;
    terms.direct = -clamped_log(posterior.probabilities[pursued], cfg.log_floor);
    terms.pursued_log_likelihood = clamped_log(likelihoods[pursued], cfg.log_floor);
    double evidence = 0.0;
    for (std::size_t i = 0; i < likelihoods.size(); ++i)
        evidence += obs.prior[i] * likelihoods[i];
    terms.log_evidence = clamped_log(evidence, cfg.log_floor);
    terms.log_prior = clamped_log(obs.prior[pursued], cfg.log_floor);
    return terms;
}

double legibility_cross_entropy(const AgentModel& agent, const ObserverModel& obs, StateId s,
                                ActionId a, const LegibilityConfig& cfg) {
    return cross_entropy_terms(agent, obs, s, a, cfg).direct;
}

namespace {

std::vector<double> legible_q_impl(const AgentModel& agent, const ObserverModel& obs,
                                   std::span<const StateId> policy_states,
                                   const LegibilityConfig& cfg) {
    cfg.validate();
    const std::size_t pursued = agent.ensemble.pursued_index();
    if (pursued >= obs.ensemble.size())
        throw std::invalid_argument("legible_q: pursued index outside observer ensemble");
    const auto q_row = agent.ensemble.pursued().row(policy_states[pursued]);
    std::vector<double> out(q_row.begin(), q_row.end());
    if (cfg.alpha == 0.0) return out; // identity, no penalty arithmetic at all

    for (ActionId a = 0; a < out.size(); ++a) {
        const PosteriorResult posterior = observer_posterior(obs, policy_states, a);
        out[a] += cfg.alpha * clamped_log(posterior.probabilities[pursued], cfg.log_floor);
    }
    return out;
}

} // namespace

std::vector<double> legible_q(const AgentModel& agent, const ObserverModel& obs, StateId s,
                              const LegibilityConfig& cfg) {
    const std::vector<StateId> states(obs.ensemble.size(), s);
    return legible_q_impl(agent, obs, states, cfg);
}

std::vector<double> legible_q(const AgentModel& agent, const ObserverModel& obs,
                              std::span<const StateId> policy_states,
                              const LegibilityConfig& cfg) {
    if (policy_states.size() != obs.ensemble.size())
        throw std::invalid_argument("legible_q: one state per policy required");
    return legible_q_impl(agent, obs, policy_states, cfg);
}

ActionId legible_action(const AgentModel& agent, const ObserverModel& obs, StateId s,
                        const LegibilityConfig& cfg, const DistributionModel& selection, Rng& rng) {
    const std::vector<StateId> states(obs.ensemble.size(), s);
    return legible_action(agent, obs, states, cfg, selection, rng);
}

ActionId legible_action(const AgentModel& agent, const ObserverModel& obs,
                        std::span<const StateId> policy_states, const LegibilityConfig& cfg,
                        const DistributionModel& selection, Rng& rng) {
    validate(selection);
    const std::vector<double> row = legible_q(agent, obs, policy_states, cfg);
    if (std::holds_alternative<Greedy>(selection)) return argmax_row(row);
    return sample_action(transform_row(selection, row), rng);
}

} // namespace legible
