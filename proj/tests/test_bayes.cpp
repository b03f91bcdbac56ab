#include "uidforge/bayes.hpp"
#include "uidforge/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <cmath>
#include <vector>

using namespace uidforge;

namespace {

const std::vector<DemandObservation> kFixture{{2011, 4, 1.0}, {2012, 6, 1.0}};
const PriorSpec kUnitPrior{PriorSpec::Family::Gamma, 1.0, 1.0};

/// Full log density of Gamma(shape, rate), normalising constant included.
double gamma_log_density(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

} // namespace

TEST_CASE("inputs are validated") {
    CHECK_THROWS_AS(validate(DemandObservation{2011, -1, 1.0}), DomainError);
    CHECK_THROWS_AS(validate(DemandObservation{2011, 1, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(PriorSpec{PriorSpec::Family::Gamma, 0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(validate(PriorSpec{PriorSpec::Family::Gamma, 1.0, -1.0}), DomainError);
}

TEST_CASE("log posterior without data is the prior kernel") {
    const PriorSpec prior{PriorSpec::Family::Gamma, 2.5, 1.5};
    for (double beta : {0.1, 1.0, 2.0, 7.5}) {
        CHECK(log_posterior_unnormalized(beta, {}, prior) ==
              doctest::Approx(1.5 * std::log(beta) - 1.5 * beta).epsilon(1e-14));
    }
    CHECK_THROWS_AS(log_posterior_unnormalized(0.0, {}, prior), DomainError);
    CHECK_THROWS_AS(log_posterior_unnormalized(-1.0, {}, prior), DomainError);
}

TEST_CASE("log posterior ratio on a two-observation fixture") {
    // Prior Gamma(2, 1); counts 3 and 5 over exposures 1 and 2.
    // Kernel: (2 - 1 + 3 + 5) log b - (1 + 1 + 2) b = 9 log b - 4 b.
    const PriorSpec prior{PriorSpec::Family::Gamma, 2.0, 1.0};
    const std::vector<DemandObservation> data{{1, 3, 1.0}, {2, 5, 2.0}};
    const double b1 = 1.5, b2 = 2.5;
    const double expected = 9.0 * std::log(b1 / b2) - 4.0 * (b1 - b2);
    CHECK(log_posterior_unnormalized(b1, data, prior) - log_posterior_unnormalized(b2, data, prior) ==
          doctest::Approx(expected).epsilon(1e-13));

    // The same ratio from the normalised posterior density Gamma(10, 4).
    CHECK(expected == doctest::Approx(gamma_log_density(b1, 10, 4) - gamma_log_density(b2, 10, 4))
                          .epsilon(1e-13));
}

TEST_CASE("zero counts give a posterior decreasing beyond the prior mode") {
    const PriorSpec prior{PriorSpec::Family::Gamma, 3.0, 2.0};
    const std::vector<DemandObservation> data{{1, 0, 5.0}, {2, 0, 5.0}};
    const double mode = (prior.shape - 1.0) / prior.rate;
    double previous = log_posterior_unnormalized(mode, data, prior);
    for (double beta = mode + 0.1; beta < 20.0; beta += 0.1) {
        const double value = log_posterior_unnormalized(beta, data, prior);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("conjugate_posterior") {
    const auto prior_only = conjugate_posterior({}, PriorSpec{PriorSpec::Family::Gamma, 2.0, 5.0});
    CHECK(prior_only.shape == 2.0);
    CHECK(prior_only.rate == 5.0);
    CHECK(prior_only.mean() == 0.4);

    const auto post = conjugate_posterior(kFixture, kUnitPrior);
    CHECK(post.shape == 11.0);
    CHECK(post.rate == 3.0);
    CHECK(post.mean() == doctest::Approx(3.6667).epsilon(1e-4));
    CHECK(post.variance() == doctest::Approx(11.0 / 9.0));

    const std::vector<DemandObservation> silent{{1, 0, 1e12}};
    CHECK(conjugate_posterior(silent, kUnitPrior).mean() < 1e-11);
}

TEST_CASE("random walk Metropolis is invariant to an additive constant") {
    const LogDensity base = [](std::span<const double> x) {
        return -0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]);
    };
    const LogDensity shifted = [&](std::span<const double> x) { return base(x) + 0.5; };
    const std::vector<double> start{0.0, 0.0};
    const auto a = random_walk_metropolis(base, start, 20000, 1000, 31, 1.0);
    const auto b = random_walk_metropolis(shifted, start, 20000, 1000, 31, 1.0);
    CHECK(a.size() == 19000);
    CHECK(a.dimension == 2);
    CHECK(a.draws == b.draws);
    CHECK(a.accepted == b.accepted);
}

TEST_CASE("random walk Metropolis rejects a non-finite starting point") {
    const LogDensity log_only_positive = [](std::span<const double> x) { return std::log(x[0]); };
    const std::vector<double> start{-1.0};
    CHECK_THROWS_AS(random_walk_metropolis(log_only_positive, start, 10, 0, 1, 1.0),
                    InitializationError);
}

TEST_CASE("metropolis_sample is deterministic in the seed") {
    const auto a = metropolis_sample(kFixture, kUnitPrior, 5000, 99);
    const auto b = metropolis_sample(kFixture, kUnitPrior, 5000, 99);
    const auto c = metropolis_sample(kFixture, kUnitPrior, 5000, 100);
    CHECK(a.samples == b.samples);
    CHECK(a.acceptance_rate == b.acceptance_rate);
    CHECK(a.samples != c.samples);
    CHECK(a.burn_in == 500);
    CHECK(a.samples.size() == 4500);
    CHECK(a.seed == 99);
}

TEST_CASE("metropolis_sample argument checks") {
    CHECK_THROWS_AS(metropolis_sample(kFixture, kUnitPrior, 0, 1), DomainError);
    CHECK_THROWS_AS(metropolis_sample(kFixture, kUnitPrior, 10, 1, 0.0), DomainError);
}

TEST_CASE("extreme proposal scales push acceptance to the bounds") {
    const auto tiny = metropolis_sample(kFixture, kUnitPrior, 20000, 5, 1e-4);
    const auto huge = metropolis_sample(kFixture, kUnitPrior, 20000, 5, 50.0);
    CHECK(tiny.acceptance_rate > 0.99);
    CHECK(huge.acceptance_rate < 0.05);
    CHECK(tiny.acceptance_rate <= 1.0);
    CHECK(huge.acceptance_rate >= 0.0);
}

TEST_CASE("chain moments agree with the conjugate posterior") {
    const auto chain = metropolis_sample(kFixture, kUnitPrior, 100000, 2011);
    const auto summary = summarize_chain(chain);
    const auto exact = conjugate_posterior(kFixture, kUnitPrior);
    CHECK(std::abs(summary.mean - exact.mean()) / exact.mean() < 0.01);
    CHECK(std::abs(summary.variance - exact.variance()) / exact.variance() < 0.05);
    CHECK(summary.lower_95 < exact.mean());
    CHECK(summary.upper_95 > exact.mean());

    // Interval endpoints near the analytic quantiles.
    const double lo = boost::math::gamma_p_inv(exact.shape, 0.025) / exact.rate;
    const double hi = boost::math::gamma_p_inv(exact.shape, 0.975) / exact.rate;
    CHECK(summary.lower_95 == doctest::Approx(lo).epsilon(0.03));
    CHECK(summary.upper_95 == doctest::Approx(hi).epsilon(0.03));
}

TEST_CASE("oracle agreement on additional fixtures") {
    const std::vector<std::pair<std::vector<DemandObservation>, PriorSpec>> fixtures{
        {{{1, 120, 40.0}, {2, 95, 35.0}, {3, 130, 42.0}}, {PriorSpec::Family::Gamma, 2.0, 0.5}},
        {{{1, 0, 2.0}}, {PriorSpec::Family::Gamma, 3.0, 1.0}},
        {{}, {PriorSpec::Family::Gamma, 4.0, 2.0}},
    };
    std::uint64_t seed = 7;
    for (const auto &[data, prior] : fixtures) {
        const auto chain = metropolis_sample(data, prior, 100000, seed++);
        const double exact = conjugate_posterior(data, prior).mean();
        CHECK(std::abs(summarize_chain(chain).mean - exact) / exact < 0.01);
    }
}

TEST_CASE("summarize_chain") {
    PosteriorChain constant;
    constant.samples.assign(100, 2.5);
    const auto s = summarize_chain(constant);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == 0.0);
    CHECK(s.lower_95 == 2.5);
    CHECK(s.upper_95 == 2.5);

    PosteriorChain ramp;
    for (int i = 0; i < 101; ++i) {
        ramp.samples.push_back(i);
    }
    const auto r = summarize_chain(ramp);
    CHECK(r.mean == 50.0);
    CHECK(r.lower_95 == doctest::Approx(2.5));
    CHECK(r.upper_95 == doctest::Approx(97.5));

    PosteriorChain short_chain;
    short_chain.samples.assign(99, 1.0);
    CHECK_THROWS_AS(summarize_chain(short_chain), InsufficientDataError);
}

TEST_CASE("stationary distribution matches the analytic posterior on a grid") {
    const auto exact = conjugate_posterior(kFixture, kUnitPrior);
    const auto chain = metropolis_sample(kFixture, kUnitPrior, 1000000, 424242);

    constexpr int bins = 200;
    constexpr double upper = 12.0;
    const double width = upper / bins;
    std::vector<double> observed(bins, 0.0);
    for (double beta : chain.samples) {
        const int bin = std::min(static_cast<int>(beta / width), bins - 1);
        observed[bin] += 1.0;
    }
    double tv = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double a = i * width * exact.rate;
        const double b = i == bins - 1 ? INFINITY : (i + 1) * width * exact.rate;
        const double expected = (std::isinf(b) ? 1.0 : boost::math::gamma_p(exact.shape, b)) -
                                boost::math::gamma_p(exact.shape, a);
        tv += std::abs(observed[i] / chain.samples.size() - expected);
    }
    CHECK(0.5 * tv < 0.02);
}
