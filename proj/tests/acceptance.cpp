// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"

#include "uidforge/bayes.hpp"
#include "uidforge/card_ledger.hpp"
#include "uidforge/chart.hpp"
#include "uidforge/coverage.hpp"
#include "uidforge/csv_io.hpp"
#include "uidforge/projection.hpp"
#include "uidforge/run_config.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace uidforge;
namespace fs = std::filesystem;

namespace {

const fs::path kData = UIDFORGE_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct National {
    AgePyramid population;
    SurvivalSchedule survival;
    FertilityConfig fertility;
    std::vector<StateFlows> flows;
};

National load_national() {
    const auto dir = kData / "national";
    const auto params = load_key_value_file(dir / "params.conf");
    return National{
        load_population_csv(dir / "population.csv").at("IN"),
        load_survival_csv(dir / "survival.csv").at("IN"),
        FertilityConfig(load_fertility_rates_csv(dir / "fertility.csv"),
                        std::stod(params.at("eligible-proportion")),
                        std::stod(params.at("sex-ratio")), std::stod(params.at("infant-mortality"))),
        load_flows_csv(dir / "flows.csv"),
    };
}

Outcome decadal_growth() {
    const auto start = Clock::now();
    const auto nat = load_national();
    const auto series = project_population(nat.population, nat.survival, nat.fertility, 10);
    const auto &last = series.frames.back();
    const double elapsed = seconds_since(start);

    const double target = 1210.0e6 * 1.123;
    const double error = std::abs(last.total() - target) / target;
    return {last.year() == 2021 && error < 1e-3 && elapsed < 1.0,
            fmt::format("2021 total {:.3f}M vs {:.3f}M, rel. error {:.2e}, {:.3f}s",
                        last.total() / 1e6, target / 1e6, error, elapsed)};
}

Outcome infant_survival_ratio() {
    const auto toy = kData / "toy";
    auto pop = load_population_csv(toy / "population.csv").at("TOY");
    // No one turning 15 and no migration: first-year demand is births alone.
    pop.set(Sex::Male, 14, 0.0);
    pop.set(Sex::Female, 14, 0.0);
    const auto survival = load_survival_csv(toy / "survival.csv").at("TOY");
    const FertilityConfig fert(load_fertility_rates_csv(toy / "fertility.csv"), 0.8, 1.05, 60.0);

    const auto at_birth = annual_card_requirement_series(pop, survival, fert, {}, 1);
    const auto at_one =
        annual_card_requirement_series(pop, survival, fert, {}, 1, IssuancePolicy::AtAgeOne);
    const auto &b = at_birth.rows.front();
    const auto &a = at_one.rows.front();
    const bool exact = b.new_cards_male > 0.0 && a.new_cards_male == 0.94 * b.new_cards_male &&
                       a.new_cards_female == 0.94 * b.new_cards_female;
    return {exact, fmt::format("male {} = 0.94 x {}, female {} = 0.94 x {}", a.new_cards_male,
                               b.new_cards_male, a.new_cards_female, b.new_cards_female)};
}

Outcome conservation() {
    const AgeAxis axis;
    auto pop = AgePyramid::filled(RegionId{"C"}, 2011, axis);
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> count(0.0, 1e6);
    for (auto sex : kSexes) {
        for (int age = 0; age <= 49; ++age) {
            pop.set(sex, age, count(rng));
        }
    }
    const auto ones = SurvivalSchedule::constant(RegionId{"C"}, axis, 1.0);
    const FertilityConfig barren({}, 0.5, 1.05, 60.0);
    const auto series = project_population(pop, ones, barren, 50);
    double worst = 0.0;
    for (const auto &frame : series.frames) {
        worst = std::max(worst, std::abs(frame.total() - pop.total()) / pop.total());
    }
    return {worst <= 1e-9 && series.frames.size() == 51,
            fmt::format("max relative drift {:.2e} over 50 years", worst)};
}

Outcome microsimulation() {
    const auto start = Clock::now();
    const AgeAxis axis;
    const auto s = SurvivalSchedule::constant(RegionId{"C"}, axis, 0.95);
    auto pop = AgePyramid::filled(RegionId{"C"}, 2011, axis);
    pop.set(Sex::Female, 30, 1e4);
    const double model = survive_cohorts(pop, s, 10).at(Sex::Female, 40);
    const auto stats = oracle::bernoulli_cohort(s, Sex::Female, 30, 10000, 10, 200, 2024);
    const double elapsed = seconds_since(start);
    const double z = std::abs(stats.mean - model) / stats.standard_error;
    return {z < 3.0 && elapsed < 5.0,
            fmt::format("model {:.3f}, simulated {:.3f} (SE {:.3f}, z {:.2f}), {:.3f}s", model,
                        stats.mean, stats.standard_error, z, elapsed)};
}

Outcome macro_micro() {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pop(1e5, 3e8), birth(0.0, 0.04), death(0.0, 0.02),
        move(0.0, 0.005), share(0.0, 0.03);
    double worst = 0.0;
    for (int scenario = 0; scenario < 100; ++scenario) {
        std::vector<StateFlows> rates;
        const int states = 2 + scenario % 35;
        for (int i = 0; i < states; ++i) {
            rates.emplace_back(RegionId{fmt::format("S{}", i)},
                               RateFlows{pop(rng), birth(rng), death(rng), move(rng), move(rng)});
        }
        auto counts = counts_from_rates(rates);

        // Add interstate traffic that balances nationally: a ring of moves.
        std::vector<double> moved(states);
        for (int i = 0; i < states; ++i) {
            moved[i] = share(rng) * rates[i].rates().population;
        }
        std::vector<StateFlows> with_moves;
        for (int i = 0; i < states; ++i) {
            auto c = counts[i].counts();
            c.interstate_out = moved[i];
            c.interstate_in = moved[(i + states - 1) % states];
            with_moves.emplace_back(counts[i].state(), c);
        }

        const double macro = macro_net_card_change(rates);
        const double micro = micro_net_card_change(with_moves);
        worst = std::max(worst, std::abs(micro - macro) / std::max(1.0, std::abs(macro)));
    }
    return {worst <= 1e-9, fmt::format("max relative difference {:.2e} over 100 scenarios", worst)};
}

Outcome dual_system() {
    const double estimate = dual_system_estimate({900, 800, 720});
    auto pyramid = AgePyramid::filled(RegionId{"Z"}, 2001, AgeAxis{});
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> count(1.0, 1e7);
    for (auto sex : kSexes) {
        for (int age = 0; age <= 100; ++age) {
            pyramid.set(sex, age, count(rng));
        }
    }
    double worst = 0.0;
    for (int rate = 1; rate <= 999; ++rate) {
        CoverageConfig cfg;
        cfg.omission_per_1000 = rate;
        const auto adjusted = apply_omission_adjustment(pyramid, cfg);
        for (const auto &[cell, value] : adjusted.cells()) {
            const double original = pyramid.at(cell.sex, cell.age);
            worst = std::max(worst,
                             std::abs(value * (1.0 - rate / 1000.0) - original) / original);
        }
    }
    return {estimate == 1000.0 && worst < 1e-9,
            fmt::format("estimate {}, worst round-trip error {:.2e}", estimate, worst)};
}

Outcome mcmc() {
    const std::vector<DemandObservation> data{{2011, 4, 1.0}, {2012, 6, 1.0}};
    const PriorSpec prior{PriorSpec::Family::Gamma, 1.0, 1.0};
    const auto start = Clock::now();
    const auto chain = metropolis_sample(data, prior, 100000, 20110301);
    const double elapsed = seconds_since(start);
    const auto again = metropolis_sample(data, prior, 100000, 20110301);
    const double mean = summarize_chain(chain).mean;
    const double error = std::abs(mean - 11.0 / 3.0) / (11.0 / 3.0);
    const bool identical = chain.samples == again.samples;
    return {error < 0.01 && elapsed < 10.0 && identical,
            fmt::format("mean {:.5f}, rel. error {:.2e}, {:.3f}s, rerun {}", mean, error, elapsed,
                        identical ? "bit-identical" : "DIFFERS")};
}

Outcome national_series() {
    const auto nat = load_national();
    const auto series = annual_card_requirement_series(nat.population, nat.survival,
                                                       nat.fertility, nat.flows, 10);
    bool positive = true;
    bool ratio = true;
    for (const auto &row : series.rows) {
        positive = positive && row.new_cards_male > 0.0 && row.new_cards_female > 0.0 &&
                   row.returned_cards > 0.0;
        const auto male = round_count(row.components.births[0]);
        const auto expected = round_count(nat.fertility.sex_ratio_at_birth() * row.components.births[1]);
        ratio = ratio && std::abs(male - expected) <= 1;
    }
    const bool deterministic = format_series_chart(series) == format_series_chart(series);
    return {positive && ratio && deterministic && series.rows.size() == 10,
            fmt::format("{} years: positive {}, sex ratio {}, chart deterministic {}",
                        series.rows.size(), positive, ratio, deterministic)};
}

Outcome ledger_identity() {
    const auto nat = load_national();
    bool holds = true;
    std::size_t years = 0;
    for (auto policy : {IssuancePolicy::AtBirth, IssuancePolicy::AtAgeOne,
                        IssuancePolicy::NumberAndCardAtBirth}) {
        const auto history =
            simulate_card_ledger(nat.population, nat.survival, nat.fertility, nat.flows, 20, policy,
                                 initial_ledger(nat.population, policy));
        for (std::size_t y = 1; y < history.size(); ++y) {
            const auto &prev = history[y - 1];
            const auto &cur = history[y];
            holds = holds &&
                    cur.active_cards ==
                        prev.active_cards + cur.issued_this_year - cur.returned_this_year &&
                    cur.child_links >= 0;
            ++years;
        }
    }
    return {holds && years == 60, fmt::format("{} simulated years across 3 policies", years)};
}

Outcome golden_file() {
    const auto toy = kData / "toy";
    const auto pop = load_population_csv(toy / "population.csv").at("TOY");
    const auto survival = load_survival_csv(toy / "survival.csv").at("TOY");
    const FertilityConfig fert(load_fertility_rates_csv(toy / "fertility.csv"), 0.8, 1.05, 60.0);
    const auto flows = load_flows_csv(toy / "flows.csv");
    const auto series = annual_card_requirement_series(pop, survival, fert, flows, 3);

    const auto path = fs::temp_directory_path() / fmt::format("uidforge_golden_{}.csv", ::getpid());
    emit_demand_csv(series, path);
    const bool equal = slurp(path) == slurp(toy / "demand_golden.csv");
    fs::remove(path);
    return {equal, equal ? "byte-equal" : "output differs from demand_golden.csv"};
}

} // namespace

int main() {
    const std::pair<const char *, std::function<Outcome()>> criteria[] = {
        {"decadal growth reproduction", decadal_growth},
        {"infant-survival policy ratio", infant_survival_ratio},
        {"conservation over 50 years", conservation},
        {"microsimulation oracle", microsimulation},
        {"macro-micro agreement", macro_micro},
        {"dual-system estimator and omission inversion", dual_system},
        {"MCMC vs conjugate posterior", mcmc},
        {"national demand series properties", national_series},
        {"ledger identity", ledger_identity},
        {"golden demand file", golden_file},
    };
    int failures = 0;
    int index = 0;
    for (const auto &[name, check] : criteria) {
        ++index;
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception &e) {
            outcome = {false, fmt::format("threw: {}", e.what())};
        }
        failures += outcome.pass ? 0 : 1;
        fmt::print("[{}] {:2d}. {} - {}\n", outcome.pass ? "PASS" : "FAIL", index, name,
                   outcome.detail);
    }
    fmt::print("{} of {} criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
