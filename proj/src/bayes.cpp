#include "uidforge/bayes.hpp"

#include "uidforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fmt/format.h>
#include <random>

namespace uidforge {

void validate(const DemandObservation &obs) {
    if (obs.count < 0) {
        throw DomainError(fmt::format("observation {}: count {} must be >= 0", obs.year, obs.count));
    }
    if (!(obs.exposure > 0.0) || !std::isfinite(obs.exposure)) {
        throw DomainError(
            fmt::format("observation {}: exposure {} must be finite and > 0", obs.year, obs.exposure));
    }
}

void validate(const PriorSpec &prior) {
    if (!(prior.shape > 0.0) || !(prior.rate > 0.0) || !std::isfinite(prior.shape) ||
        !std::isfinite(prior.rate)) {
        throw DomainError(fmt::format("Gamma prior needs shape > 0 and rate > 0 (got {}, {})",
                                      prior.shape, prior.rate));
    }
}

double log_posterior_unnormalized(double beta, std::span<const DemandObservation> data,
                                  const PriorSpec &prior) {
    if (!(beta > 0.0)) {
        throw DomainError(fmt::format("beta must be > 0, got {}", beta));
    }
    validate(prior);
    const double log_beta = std::log(beta);
    double value = (prior.shape - 1.0) * log_beta - prior.rate * beta;
    for (const auto &obs : data) {
        validate(obs);
        // log Poisson(k | beta e) = k log beta + k log e - beta e - log k!;
        // only the beta-dependent terms are kept.
        value += static_cast<double>(obs.count) * log_beta - beta * obs.exposure;
    }
    return value;
}

GammaPosterior conjugate_posterior(std::span<const DemandObservation> data, const PriorSpec &prior) {
    validate(prior);
    GammaPosterior post{prior.shape, prior.rate};
    for (const auto &obs : data) {
        validate(obs);
        post.shape += static_cast<double>(obs.count);
        post.rate += obs.exposure;
    }
    return post;
}

RandomWalkChain random_walk_metropolis(const LogDensity &log_density,
                                       std::span<const double> initial, std::size_t iterations,
                                       std::size_t burn_in, std::uint64_t seed,
                                       double proposal_scale) {
    if (initial.empty()) {
        throw DomainError("sampler needs at least one parameter");
    }
    if (iterations < 1 || burn_in >= iterations) {
        throw DomainError(fmt::format("need iterations >= 1 and burn-in < iterations (got {}, {})",
                                      iterations, burn_in));
    }
    if (!(proposal_scale > 0.0) || !std::isfinite(proposal_scale)) {
        throw DomainError(fmt::format("proposal scale must be finite and > 0, got {}",
                                      proposal_scale));
    }

    std::vector<double> current(initial.begin(), initial.end());
    double current_log = log_density(current);
    if (!std::isfinite(current_log)) {
        throw InitializationError(
            fmt::format("log density is not finite at the initial point ({})", current_log));
    }

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> step(0.0, proposal_scale);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RandomWalkChain chain;
    chain.dimension = current.size();
    chain.burn_in = burn_in;
    chain.iterations = iterations;
    chain.draws.reserve((iterations - burn_in) * chain.dimension);

    std::vector<double> proposal(current.size());
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t j = 0; j < current.size(); ++j) {
            proposal[j] = current[j] + step(engine);
        }
        const double proposal_log = log_density(proposal);
        const double log_u = std::log(unit(engine));
        if (std::isfinite(proposal_log) && log_u < proposal_log - current_log) {
            current.swap(proposal);
            current_log = proposal_log;
            ++chain.accepted;
        }
        if (it >= burn_in) {
            chain.draws.insert(chain.draws.end(), current.begin(), current.end());
        }
    }
    return chain;
}

PosteriorChain metropolis_sample(std::span<const DemandObservation> data, const PriorSpec &prior,
                                 std::size_t n_samples, std::uint64_t seed, double proposal_scale) {
    if (n_samples < 1) {
        throw DomainError("n_samples must be >= 1");
    }
    validate(prior);
    for (const auto &obs : data) {
        validate(obs);
    }

    // Target over theta = log beta picks up the Jacobian d beta / d theta = beta.
    const LogDensity log_target = [&](std::span<const double> theta) {
        const double beta = std::exp(theta[0]);
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            return -std::numeric_limits<double>::infinity();
        }
        return log_posterior_unnormalized(beta, data, prior) + theta[0];
    };

    const double start[] = {std::log(prior.shape / prior.rate)};
    const auto raw = random_walk_metropolis(log_target, start, n_samples, n_samples / 10, seed,
                                            proposal_scale);

    PosteriorChain chain;
    chain.seed = seed;
    chain.burn_in = raw.burn_in;
    chain.acceptance_rate =
        static_cast<double>(raw.accepted) / static_cast<double>(raw.iterations);
    chain.samples.reserve(raw.size());
    for (double theta : raw.draws) {
        chain.samples.push_back(std::exp(theta));
    }
    return chain;
}

namespace {

/// Linear interpolation between order statistics (R type 7).
double quantile_sorted(const std::vector<double> &sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

ChainSummary summarize_chain(const PosteriorChain &chain) {
    const auto n = chain.samples.size();
    if (n < kMinSummarySamples) {
        throw InsufficientDataError(fmt::format(
            "chain has {} post-burn-in samples, at least {} needed", n, kMinSummarySamples));
    }
    ChainSummary summary;
    double sum = 0.0;
    for (double x : chain.samples) {
        sum += x;
    }
    summary.mean = sum / static_cast<double>(n);
    double squares = 0.0;
    for (double x : chain.samples) {
        squares += (x - summary.mean) * (x - summary.mean);
    }
    summary.variance = squares / static_cast<double>(n - 1);

    auto sorted = chain.samples;
    std::sort(sorted.begin(), sorted.end());
    summary.lower_95 = quantile_sorted(sorted, 0.025);
    summary.upper_95 = quantile_sorted(sorted, 0.975);
    return summary;
}

} // namespace uidforge
