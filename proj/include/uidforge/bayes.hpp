#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace uidforge {

/// Events relevant to new-card demand in one year (births plus arrivals,
/// say) and the population base they arose from. Modelled as
/// count ~ Poisson(beta * exposure).
struct DemandObservation {
    int year = 0;
    std::int64_t count = 0;
    double exposure = 1.0;
};

struct PriorSpec {
    enum class Family { Gamma };

    Family family = Family::Gamma;
    double shape = 1.0;
    double rate = 1.0;
};

/// Throw DomainError on count < 0, exposure <= 0, shape/rate <= 0.
void validate(const DemandObservation &obs);
void validate(const PriorSpec &prior);

/// log p(beta) + sum_t log Poisson(count_t | beta * exposure_t), dropping
/// every term that does not depend on beta. With no data this is
/// (a - 1) log beta - b beta.
double log_posterior_unnormalized(double beta, std::span<const DemandObservation> data,
                                  const PriorSpec &prior);

struct GammaPosterior {
    double shape = 0.0;
    double rate = 0.0;

    double mean() const noexcept { return shape / rate; }
    double variance() const noexcept { return shape / (rate * rate); }
};

/// Closed-form posterior of the Gamma-Poisson model:
/// (a + sum counts, b + sum exposures).
GammaPosterior conjugate_posterior(std::span<const DemandObservation> data, const PriorSpec &prior);

/// Log density over unconstrained coordinates, known up to a constant.
using LogDensity = std::function<double(std::span<const double>)>;

struct RandomWalkChain {
    std::size_t dimension = 0;
    /// Row-major, one row of `dimension` values per kept iteration.
    std::vector<double> draws;
    std::size_t burn_in = 0;
    std::size_t accepted = 0;
    std::size_t iterations = 0;

    std::size_t size() const noexcept { return dimension == 0 ? 0 : draws.size() / dimension; }
    std::span<const double> row(std::size_t i) const {
        return {draws.data() + i * dimension, dimension};
    }
};

/// Random-walk Metropolis with isotropic Gaussian proposals of standard
/// deviation `proposal_scale`. Runs `iterations` steps from `initial` and
/// keeps those after the first `burn_in`. Bit-identical for equal arguments.
RandomWalkChain random_walk_metropolis(const LogDensity &log_density,
                                       std::span<const double> initial, std::size_t iterations,
                                       std::size_t burn_in, std::uint64_t seed,
                                       double proposal_scale);

inline constexpr double kDefaultProposalScale = 0.75;

struct PosteriorChain {
    /// Post-burn-in draws of beta.
    std::vector<double> samples;
    std::uint64_t seed = 0;
    double acceptance_rate = 0.0;
    std::size_t burn_in = 0;
};

/// Samples beta from the posterior by random-walk Metropolis on log beta,
/// started at the prior mean. The first 10% of `n_samples` iterations are
/// discarded as burn-in.
PosteriorChain metropolis_sample(std::span<const DemandObservation> data, const PriorSpec &prior,
                                 std::size_t n_samples, std::uint64_t seed,
                                 double proposal_scale = kDefaultProposalScale);

struct ChainSummary {
    double mean = 0.0;
    double variance = 0.0;
    double lower_95 = 0.0;
    double upper_95 = 0.0;
};

inline constexpr std::size_t kMinSummarySamples = 100;

/// Sample mean, unbiased variance and central 95% interval (linearly
/// interpolated quantiles). Needs at least 100 post-burn-in samples.
ChainSummary summarize_chain(const PosteriorChain &chain);

} // namespace uidforge
