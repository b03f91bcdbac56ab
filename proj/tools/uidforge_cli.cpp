// uidforge command-line driver: project, demand, coverage, estimate.

#include "uidforge/bayes.hpp"
#include "uidforge/card_ledger.hpp"
#include "uidforge/chart.hpp"
#include "uidforge/coverage.hpp"
#include "uidforge/csv_io.hpp"
#include "uidforge/errors.hpp"
#include "uidforge/projection.hpp"
#include "uidforge/run_config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <optional>

namespace fs = std::filesystem;
using namespace uidforge;

namespace {

struct Options {
    std::string population, survival, fertility, flows, unknown_age, segment_profile,
        observations, out, region, policy = "at-birth", config;
    int horizon = 0;
    int base_year = kDefaultBaseYear;
    int max_age = kDefaultMaxAge;
    std::optional<double> eligible_proportion, sex_ratio;
    double infant_mortality = 60.0;
    double omission = 0.0;
    double houseless_rural = 0.0, houseless_urban = 0.0;
    double prior_shape = 1.0, prior_rate = 1.0, proposal_scale = kDefaultProposalScale;
    std::size_t samples = 100000;
    std::optional<std::uint64_t> seed;
};

/// Options left unset on the command line take their value from the
/// --config key=value file.
void apply_config_file(CLI::App &sub, const std::string &config_path) {
    if (config_path.empty()) {
        return;
    }
    const auto values = load_key_value_file(config_path);
    for (const auto &[key, value] : values) {
        CLI::Option *opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound &) {
            throw DomainError(fmt::format("{}: unknown key '{}' for {}", config_path, key,
                                          sub.get_name()));
        }
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

FertilityConfig fertility_from(const Options &o) {
    if (!o.eligible_proportion || !o.sex_ratio) {
        throw DomainError("--eligible-proportion and --sex-ratio are required");
    }
    return FertilityConfig(load_fertility_rates_csv(o.fertility), *o.eligible_proportion,
                           *o.sex_ratio, o.infant_mortality);
}

const SurvivalSchedule &schedule_for(const std::map<std::string, SurvivalSchedule> &schedules,
                                     const std::string &region) {
    auto it = schedules.find(region);
    if (it == schedules.end()) {
        throw DomainError(fmt::format("no survival schedule for region {}", region));
    }
    return it->second;
}

/// All regions, or only --region when given.
PopulationDataset select_regions(PopulationDataset data, const std::string &region) {
    if (region.empty()) {
        return data;
    }
    auto it = data.find(region);
    if (it == data.end()) {
        throw DomainError(fmt::format("region {} not present in population file", region));
    }
    PopulationDataset one;
    one.insert(*it);
    return one;
}

const AgePyramid &single_region(const PopulationDataset &data, std::string_view command) {
    if (data.size() != 1) {
        throw DomainError(fmt::format("{} needs exactly one region (got {}); use --region",
                                      command, data.size()));
    }
    return data.begin()->second;
}

void run_project(const Options &o) {
    const AgeAxis axis{o.max_age};
    const auto population = select_regions(load_population_csv(o.population, o.base_year, axis),
                                           o.region);
    const auto schedules = load_survival_csv(o.survival, axis);
    const auto fert = fertility_from(o);
    std::vector<ProjectionSeries> results;
    for (const auto &[code, pyramid] : population) {
        results.push_back(project_population(pyramid, schedule_for(schedules, code), fert, o.horizon));
    }
    emit_projection_csv(results, fs::path(o.out) / "projection.csv");
}

void run_demand(const Options &o) {
    const AgeAxis axis{o.max_age};
    const auto population = select_regions(load_population_csv(o.population, o.base_year, axis),
                                           o.region);
    const auto &pyramid = single_region(population, "demand");
    const auto schedules = load_survival_csv(o.survival, axis);
    const auto &survival = schedule_for(schedules, pyramid.region().code);
    const auto fert = fertility_from(o);
    const auto flows = load_flows_csv(o.flows);
    const auto policy = parse_policy(o.policy);

    const auto series =
        annual_card_requirement_series(pyramid, survival, fert, flows, o.horizon, policy);
    emit_demand_csv(series, fs::path(o.out) / "demand.csv");
    if (series.rows.size() >= 2) {
        render_series_chart(series, fs::path(o.out) / "demand.svg");
    }

    const auto ledger = simulate_card_ledger(pyramid, survival, fert, flows, o.horizon, policy,
                                             initial_ledger(pyramid, policy));
    std::string text = "year,active_cards,issued,returned,child_links\n";
    for (const auto &entry : ledger) {
        text += fmt::format("{},{},{},{},{}\n", entry.year, entry.active_cards,
                            entry.issued_this_year, entry.returned_this_year, entry.child_links);
    }
    write_text_file(fs::path(o.out) / "ledger.csv", text);
}

void run_coverage(const Options &o) {
    const AgeAxis axis{o.max_age};
    auto population = select_regions(load_population_csv(o.population, o.base_year, axis),
                                      o.region);
    std::map<std::string, std::array<double, 2>> unknown;
    if (!o.unknown_age.empty()) {
        unknown = load_unknown_age_csv(o.unknown_age);
    }
    const bool has_segments = o.houseless_rural > 0.0 || o.houseless_urban > 0.0;
    SegmentProfile profile;
    if (has_segments) {
        if (o.segment_profile.empty()) {
            throw DomainError("houseless counts need --segment-profile");
        }
        single_region(population, "coverage with houseless segments");
        profile = load_segment_profile_csv(o.segment_profile);
    }

    PopulationDataset adjusted;
    for (auto &[code, pyramid] : population) {
        CoverageConfig cfg;
        cfg.omission_per_1000 = o.omission;
        cfg.houseless_rural = o.houseless_rural;
        cfg.houseless_urban = o.houseless_urban;
        if (auto it = unknown.find(code); it != unknown.end()) {
            cfg.unknown_age = it->second;
        }
        auto step = allocate_unknown_age(pyramid, cfg);
        step = add_enumeration_segments(step, cfg, profile);
        step = apply_omission_adjustment(step, cfg);
        require_valid(step, axis);
        adjusted.emplace(code, std::move(step));
    }
    emit_population_csv(adjusted, fs::path(o.out) / "adjusted_population.csv");
}

void run_estimate(const Options &o) {
    const auto data = load_observations_csv(o.observations);
    const PriorSpec prior{PriorSpec::Family::Gamma, o.prior_shape, o.prior_rate};
    const auto seed = resolve_seed(o.seed);
    const auto chain = metropolis_sample(data, prior, o.samples, seed, o.proposal_scale);
    const auto summary = summarize_chain(chain);
    const auto exact = conjugate_posterior(data, prior);

    std::string text = "statistic,value\n";
    const auto line = [&](std::string_view name, double value) {
        text += fmt::format("{},{}\n", name, format_real(value));
    };
    line("mean", summary.mean);
    line("variance", summary.variance);
    line("lower_95", summary.lower_95);
    line("upper_95", summary.upper_95);
    line("acceptance_rate", chain.acceptance_rate);
    line("conjugate_shape", exact.shape);
    line("conjugate_rate", exact.rate);
    line("conjugate_mean", exact.mean());
    text += fmt::format("seed,{}\nburn_in,{}\n", seed, chain.burn_in);
    write_text_file(fs::path(o.out) / "posterior_summary.csv", text);
    emit_chain_csv(chain, fs::path(o.out) / "chain.csv");
}

void add_common(CLI::App &sub, Options &o) {
    sub.add_option("--out", o.out, "Output directory");
    sub.add_option("--config", o.config, "key=value file; command-line flags take precedence");
    sub.add_option("--base-year", o.base_year, "Census year of the population file");
    sub.add_option("--max-age", o.max_age, "Last age of life (open top age group)");
    sub.add_option("--region", o.region, "Restrict to one region code");
}

void add_projection_inputs(CLI::App &sub, Options &o) {
    sub.add_option("--population", o.population, "region,sex,age,count CSV");
    sub.add_option("--survival", o.survival, "region,sex,age,survival CSV");
    sub.add_option("--fertility", o.fertility, "age,rate CSV");
    sub.add_option("--horizon", o.horizon, "Years to project");
    sub.add_option("--eligible-proportion", o.eligible_proportion,
                   "Share of reproductive-age women exposed to childbearing");
    sub.add_option("--sex-ratio", o.sex_ratio, "Male births per female birth");
    sub.add_option("--infant-mortality", o.infant_mortality, "Infant deaths per 1000 live births");
}

RunConfig to_run_config(Command command, const Options &o) {
    RunConfig config;
    config.command = command;
    config.horizon = o.horizon;
    config.output = o.out;
    config.issuance_policy = parse_policy(o.policy);
    const std::pair<const char *, const std::string *> roles[] = {
        {"population", &o.population}, {"survival", &o.survival},
        {"fertility", &o.fertility},   {"flows", &o.flows},
        {"observations", &o.observations}};
    for (const auto &[role, path] : roles) {
        if (!path->empty()) {
            config.inputs[role] = *path;
        }
    }
    return config;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Population projection and identity-card demand forecasting"};
    app.require_subcommand(1);
    Options o;

    auto *project = app.add_subcommand("project", "Cohort-component population projection");
    add_common(*project, o);
    add_projection_inputs(*project, o);

    auto *demand = app.add_subcommand("demand", "Annual new-card requirement series");
    add_common(*demand, o);
    add_projection_inputs(*demand, o);
    demand->add_option("--flows", o.flows, "State flows CSV (rate or count schema)");
    demand->add_option("--policy", o.policy, "at-birth|at-age-one|full")
        ->check(CLI::IsMember({"at-birth", "at-age-one", "full"}));

    auto *coverage = app.add_subcommand("coverage", "Correct census counts for under-coverage");
    add_common(*coverage, o);
    coverage->add_option("--population", o.population, "region,sex,age,count CSV");
    coverage->add_option("--omission", o.omission, "Net omission per 1000");
    coverage->add_option("--unknown-age", o.unknown_age, "region,sex,count CSV");
    coverage->add_option("--houseless-rural", o.houseless_rural, "Rural houseless persons");
    coverage->add_option("--houseless-urban", o.houseless_urban, "Urban houseless persons");
    coverage->add_option("--segment-profile", o.segment_profile, "sex,age,weight CSV");

    auto *estimate = app.add_subcommand("estimate", "Posterior of the annual demand rate");
    add_common(*estimate, o);
    estimate->add_option("--observations", o.observations, "year,count,exposure CSV");
    estimate->add_option("--prior-shape", o.prior_shape, "Gamma prior shape");
    estimate->add_option("--prior-rate", o.prior_rate, "Gamma prior rate");
    estimate->add_option("--samples", o.samples, "Metropolis iterations (10% burn-in)");
    estimate->add_option("--seed", o.seed, "RNG seed (falls back to UIDFORGE_SEED)");
    estimate->add_option("--proposal-scale", o.proposal_scale, "Random-walk step on log rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        // Help is requested output, not a diagnostic.
        std::fputs(app.help().c_str(), stdout);
        return 0;
    } catch (const CLI::ParseError &e) {
        return app.exit(e, std::cerr, std::cerr);
    }

    try {
        const std::pair<CLI::App *, Command> dispatch[] = {{project, Command::Project},
                                                            {demand, Command::Demand},
                                                            {coverage, Command::Coverage},
                                                            {estimate, Command::Estimate}};
        for (const auto &[sub, command] : dispatch) {
            if (!sub->parsed()) {
                continue;
            }
            apply_config_file(*sub, o.config);
            validate(to_run_config(command, o));
            fs::create_directories(o.out);
            switch (command) {
            case Command::Project:
                run_project(o);
                break;
            case Command::Demand:
                run_demand(o);
                break;
            case Command::Coverage:
                run_coverage(o);
                break;
            case Command::Estimate:
                run_estimate(o);
                break;
            }
        }
    } catch (const std::exception &e) {
        fmt::print(stderr, "uidforge: error: {}\n", e.what());
        return 1;
    }
    return 0;
}
