#include "uidforge/card_ledger.hpp"

#include "uidforge/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace uidforge {

namespace {

inline constexpr int kCardAge = 15;

void check_non_negative(double value, std::string_view what, const RegionId &state) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw DomainError(fmt::format("state {}: {} must be finite and >= 0, got {}", state.code,
                                      what, value));
    }
}

const RateFlows &require_rates(const StateFlows &flows) {
    if (!flows.is_rate_based()) {
        throw DomainError(
            fmt::format("state {}: macro model needs rate-based flows", flows.state().code));
    }
    return flows.rates();
}

const CountFlows &require_counts(const StateFlows &flows) {
    if (!flows.is_count_based()) {
        throw DomainError(
            fmt::format("state {}: micro model needs count-based flows", flows.state().code));
    }
    return flows.counts();
}

std::int64_t checked_count(double expected) {
    if (!(expected >= 0.0) || !std::isfinite(expected)) {
        throw DomainError(fmt::format("expected count {} must be finite and >= 0", expected));
    }
    return round_count(expected);
}

} // namespace

StateFlows::StateFlows(RegionId state, RateFlows rates)
    : state_{std::move(state)}, flows_{rates} {
    check_non_negative(rates.population, "population", state_);
    check_non_negative(rates.birth_rate, "birth rate", state_);
    check_non_negative(rates.death_rate, "death rate", state_);
    check_non_negative(rates.immigration_rate, "in rate", state_);
    check_non_negative(rates.emigration_rate, "out rate", state_);
}

StateFlows::StateFlows(RegionId state, CountFlows counts)
    : state_{std::move(state)}, flows_{counts} {
    check_non_negative(counts.births, "births", state_);
    check_non_negative(counts.deaths, "deaths", state_);
    check_non_negative(counts.interstate_in, "interstate in", state_);
    check_non_negative(counts.interstate_out, "interstate out", state_);
    check_non_negative(counts.immigration, "immigration", state_);
    check_non_negative(counts.emigration, "emigration", state_);
}

const RateFlows &StateFlows::rates() const {
    if (const auto *rates = std::get_if<RateFlows>(&flows_)) {
        return *rates;
    }
    throw DomainError(fmt::format("state {} holds count-based flows", state_.code));
}

const CountFlows &StateFlows::counts() const {
    if (const auto *counts = std::get_if<CountFlows>(&flows_)) {
        return *counts;
    }
    throw DomainError(fmt::format("state {} holds rate-based flows", state_.code));
}

double StateFlows::immigration() const noexcept {
    if (const auto *rates = std::get_if<RateFlows>(&flows_)) {
        return rates->immigration_rate * rates->population;
    }
    return std::get<CountFlows>(flows_).immigration;
}

double StateFlows::emigration() const noexcept {
    if (const auto *rates = std::get_if<RateFlows>(&flows_)) {
        return rates->emigration_rate * rates->population;
    }
    return std::get<CountFlows>(flows_).emigration;
}

double macro_net_card_change(std::span<const StateFlows> flows) {
    double change = 0.0;
    for (const auto &state : flows) {
        const auto &r = require_rates(state);
        change += (r.birth_rate - r.death_rate + r.immigration_rate - r.emigration_rate) *
                  r.population;
    }
    return change;
}

double macro_new_card_demand(std::span<const StateFlows> flows) {
    double demand = 0.0;
    for (const auto &state : flows) {
        const auto &r = require_rates(state);
        demand += (r.birth_rate + r.immigration_rate) * r.population;
    }
    return demand;
}

void check_interstate_closure(std::span<const StateFlows> flows) {
    double arrivals = 0.0;
    double departures = 0.0;
    for (const auto &state : flows) {
        const auto &c = require_counts(state);
        arrivals += c.interstate_in;
        departures += c.interstate_out;
    }
    // Whole-number counts sum exactly; the slack only absorbs rounding in
    // generated real-valued scenarios.
    const double slack = 1e-12 * std::max(arrivals, departures);
    if (std::abs(arrivals - departures) > slack) {
        throw ConsistencyError(
            fmt::format("interstate flows do not close: total out = {}, total in = {}",
                        departures, arrivals));
    }
}

double micro_state_net_change(const StateFlows &flows) {
    const auto &c = require_counts(flows);
    return c.births - c.deaths + c.interstate_in - c.interstate_out + c.immigration -
           c.emigration;
}

std::vector<double> micro_net_card_change_by_state(std::span<const StateFlows> flows) {
    check_interstate_closure(flows);
    std::vector<double> out;
    out.reserve(flows.size());
    for (const auto &state : flows) {
        out.push_back(micro_state_net_change(state));
    }
    return out;
}

double micro_net_card_change(std::span<const StateFlows> flows) {
    check_interstate_closure(flows);
    double births = 0.0, deaths = 0.0, in = 0.0, out = 0.0, immig = 0.0, emig = 0.0;
    for (const auto &state : flows) {
        const auto &c = state.counts();
        births += c.births;
        deaths += c.deaths;
        in += c.interstate_in;
        out += c.interstate_out;
        immig += c.immigration;
        emig += c.emigration;
    }
    return births - deaths + in - out + immig - emig;
}

double micro_new_card_demand(std::span<const StateFlows> flows) {
    double demand = 0.0;
    for (const auto &state : flows) {
        const auto &c = require_counts(state);
        demand += c.births + c.interstate_in + c.immigration;
    }
    return demand;
}

std::vector<StateFlows> counts_from_rates(std::span<const StateFlows> flows) {
    std::vector<StateFlows> out;
    out.reserve(flows.size());
    for (const auto &state : flows) {
        const auto &r = require_rates(state);
        CountFlows c;
        c.births = r.birth_rate * r.population;
        c.deaths = r.death_rate * r.population;
        c.immigration = r.immigration_rate * r.population;
        c.emigration = r.emigration_rate * r.population;
        out.emplace_back(state.state(), c);
    }
    return out;
}

std::string_view to_string(IssuancePolicy policy) noexcept {
    switch (policy) {
    case IssuancePolicy::AtBirth:
        return "at-birth";
    case IssuancePolicy::AtAgeOne:
        return "at-age-one";
    case IssuancePolicy::NumberAndCardAtBirth:
        return "full";
    }
    return "unknown";
}

IssuancePolicy parse_policy(std::string_view text) {
    if (text == "at-birth") {
        return IssuancePolicy::AtBirth;
    }
    if (text == "at-age-one") {
        return IssuancePolicy::AtAgeOne;
    }
    if (text == "full") {
        return IssuancePolicy::NumberAndCardAtBirth;
    }
    throw DomainError(
        fmt::format("unknown issuance policy '{}' (expected at-birth|at-age-one|full)", text));
}

std::int64_t round_count(double value) {
    return static_cast<std::int64_t>(std::nearbyint(value));
}

Age15Transition age15_transition(const AgePyramid &pop, const SurvivalSchedule &survival,
                                 const CardLedger &ledger) {
    double new_cards = 0.0;
    for (auto sex : kSexes) {
        new_cards += pop.at(sex, kCardAge - 1) * survival.one_year(sex, kCardAge - 1);
    }
    const auto issued = checked_count(new_cards);
    if (issued > ledger.child_links) {
        throw ConsistencyError(
            fmt::format("state {}: {} age-15 transitions exceed {} parent-linked numbers",
                        ledger.state.code, issued, ledger.child_links));
    }
    Age15Transition result{new_cards, ledger};
    result.ledger.child_links -= issued;
    result.ledger.issued_this_year += issued;
    result.ledger.active_cards += issued;
    return result;
}

CardLedger process_card_returns(const DeathsByAge &deaths, std::int64_t emigrants,
                                const CardLedger &ledger, IssuancePolicy policy) {
    if (emigrants < 0) {
        throw DomainError(fmt::format("emigrant count {} must be >= 0", emigrants));
    }
    std::int64_t card_returns = emigrants;
    std::int64_t released_links = 0;
    for (const auto &[cell, count] : deaths) {
        if (count < 0) {
            throw DomainError(fmt::format("death count {} at {} age {} must be >= 0", count,
                                          to_string(cell.sex), cell.age));
        }
        if (cell.age >= kCardAge || children_hold_cards(policy)) {
            card_returns += count;
        } else {
            released_links += count;
        }
    }
    if (card_returns > ledger.active_cards) {
        throw ConsistencyError(fmt::format("state {}: {} card returns exceed {} active cards",
                                           ledger.state.code, card_returns,
                                           ledger.active_cards));
    }
    if (released_links > ledger.child_links) {
        throw ConsistencyError(
            fmt::format("state {}: {} child deaths exceed {} parent-linked numbers",
                        ledger.state.code, released_links, ledger.child_links));
    }
    CardLedger out = ledger;
    out.active_cards -= card_returns;
    out.returned_this_year += card_returns;
    out.child_links -= released_links;
    return out;
}

namespace {

DemandComponents year_components(const AgePyramid &frame, const SurvivalSchedule &survival,
                                 const FertilityConfig &fert, std::span<const StateFlows> flows,
                                 IssuancePolicy policy) {
    DemandComponents c;
    auto births = project_births(frame, survival, fert);
    if (policy == IssuancePolicy::AtAgeOne) {
        births = apply_infant_survival(births, fert);
    }
    c.births = births.by_sex;

    const int max_age = survival.axis().max_age();
    for (auto sex : kSexes) {
        const auto i = index_of(sex);
        if (!children_hold_cards(policy)) {
            c.age15[i] = frame.at(sex, kCardAge - 1) * survival.one_year(sex, kCardAge - 1);
        }
        const int first_holder_age = children_hold_cards(policy) ? 0 : kCardAge;
        for (int age = first_holder_age; age <= max_age; ++age) {
            c.card_holder_deaths += frame.at(sex, age) * (1.0 - survival.one_year(sex, age));
        }
    }

    double immigration = 0.0;
    for (const auto &state : flows) {
        immigration += state.immigration();
        c.emigration += state.emigration();
    }
    const double total = frame.total();
    const double male_share = total > 0.0 ? frame.total(Sex::Male) / total : 0.5;
    c.immigration[index_of(Sex::Male)] = immigration * male_share;
    c.immigration[index_of(Sex::Female)] = immigration - immigration * male_share;
    return c;
}

} // namespace

DemandSeries annual_card_requirement_series(const AgePyramid &pop, const SurvivalSchedule &survival,
                                            const FertilityConfig &fert,
                                            std::span<const StateFlows> flows, int horizon,
                                            IssuancePolicy policy) {
    if (horizon < 1) {
        throw DomainError(fmt::format("demand horizon must be >= 1, got {}", horizon));
    }
    const auto projection = project_population(pop, survival, fert, horizon - 1);

    DemandSeries series;
    series.start_year = pop.year() + 1;
    series.rows.reserve(static_cast<std::size_t>(horizon));
    for (const auto &frame : projection.frames) {
        DemandRow row;
        row.year = frame.year() + 1;
        row.components = year_components(frame, survival, fert, flows, policy);
        const auto &c = row.components;
        const auto m = index_of(Sex::Male);
        const auto f = index_of(Sex::Female);
        row.new_cards_male = c.births[m] + c.age15[m] + c.immigration[m];
        row.new_cards_female = c.births[f] + c.age15[f] + c.immigration[f];
        row.returned_cards = c.card_holder_deaths + c.emigration;
        series.rows.push_back(row);
    }
    return series;
}

CardLedger initial_ledger(const AgePyramid &pop, IssuancePolicy policy) {
    double adults = 0.0;
    double children = 0.0;
    for (const auto &[cell, count] : pop.cells()) {
        (cell.age >= kCardAge ? adults : children) += count;
    }
    CardLedger ledger;
    ledger.state = pop.region();
    ledger.year = pop.year();
    if (children_hold_cards(policy)) {
        ledger.active_cards = checked_count(adults + children);
    } else {
        ledger.active_cards = checked_count(adults);
        ledger.child_links = checked_count(children);
    }
    return ledger;
}

std::vector<CardLedger> simulate_card_ledger(const AgePyramid &pop,
                                             const SurvivalSchedule &survival,
                                             const FertilityConfig &fert,
                                             std::span<const StateFlows> flows, int horizon,
                                             IssuancePolicy policy, const CardLedger &opening) {
    if (horizon < 0) {
        throw DomainError(fmt::format("horizon must be >= 0, got {}", horizon));
    }
    const auto projection = project_population(pop, survival, fert, std::max(horizon - 1, 0));

    double immigration = 0.0;
    double emigration = 0.0;
    for (const auto &state : flows) {
        immigration += state.immigration();
        emigration += state.emigration();
    }

    std::vector<CardLedger> history{opening};
    for (int k = 0; k < horizon; ++k) {
        const auto &frame = projection.frames[static_cast<std::size_t>(k)];
        CardLedger ledger = history.back();
        ledger.year += 1;
        ledger.issued_this_year = 0;
        ledger.returned_this_year = 0;

        auto births = project_births(frame, survival, fert);
        if (policy == IssuancePolicy::AtAgeOne) {
            births = apply_infant_survival(births, fert);
        }
        std::int64_t newborn = 0;
        for (auto sex : kSexes) {
            newborn += checked_count(births.of(sex));
        }
        if (children_hold_cards(policy)) {
            ledger.issued_this_year += newborn;
            ledger.active_cards += newborn;
        } else {
            ledger.child_links += newborn;
            ledger = age15_transition(frame, survival, ledger).ledger;
        }

        const auto arrivals = checked_count(immigration);
        ledger.issued_this_year += arrivals;
        ledger.active_cards += arrivals;

        DeathsByAge deaths;
        for (const auto &[cell, count] : frame.cells()) {
            deaths[cell] = checked_count(count * (1.0 - survival.one_year(cell.sex, cell.age)));
        }
        ledger = process_card_returns(deaths, checked_count(emigration), ledger, policy);
        history.push_back(ledger);
    }
    return history;
}

} // namespace uidforge
