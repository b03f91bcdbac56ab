#pragma once

#include "uidforge/demography.hpp"
#include "uidforge/projection.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace uidforge {

/// Per-person annual rates for the macro model. `immigration_rate` is m(i),
/// people entering state i from outside the country; `emigration_rate` is
/// e(i), people leaving the country.
struct RateFlows {
    double population = 0.0;
    double birth_rate = 0.0;
    double death_rate = 0.0;
    double immigration_rate = 0.0;
    double emigration_rate = 0.0;
};

/// Annual event counts for the micro model. Interstate moves are tracked
/// separately from international migration. Counts are whole numbers when
/// read from data; generated scenarios may carry expected (real) counts.
struct CountFlows {
    double births = 0.0;
    double deaths = 0.0;
    double interstate_in = 0.0;
    double interstate_out = 0.0;
    double immigration = 0.0;
    double emigration = 0.0;
};

/// Annual flows for one state, either rate-based or count-based, never mixed.
class StateFlows {
public:
    StateFlows(RegionId state, RateFlows rates);
    StateFlows(RegionId state, CountFlows counts);

    const RegionId &state() const noexcept { return state_; }
    bool is_rate_based() const noexcept { return std::holds_alternative<RateFlows>(flows_); }
    bool is_count_based() const noexcept { return std::holds_alternative<CountFlows>(flows_); }
    /// Throw DomainError on the wrong schema.
    const RateFlows &rates() const;
    const CountFlows &counts() const;

    /// International arrivals/departures per year, whatever the schema.
    double immigration() const noexcept;
    double emigration() const noexcept;

private:
    RegionId state_;
    std::variant<RateFlows, CountFlows> flows_;
};

/// Sum over states of (b - d + m - e) * S.
double macro_net_card_change(std::span<const StateFlows> flows);
/// Sum over states of (b + m) * S.
double macro_new_card_demand(std::span<const StateFlows> flows);

/// Throws ConsistencyError unless total interstate departures equal total
/// interstate arrivals across the state set.
void check_interstate_closure(std::span<const StateFlows> flows);

/// n - d + m - e + g - f for a single state.
double micro_state_net_change(const StateFlows &flows);
/// Per-state contributions, same order as the input.
std::vector<double> micro_net_card_change_by_state(std::span<const StateFlows> flows);
/// National signed sum of the six flow totals. Checks interstate closure.
double micro_net_card_change(std::span<const StateFlows> flows);
/// Births + interstate arrivals + immigration. Arrivals from another state
/// count as new demand in the receiving state.
double micro_new_card_demand(std::span<const StateFlows> flows);

/// Count-based flows carrying the expected counts rate * population, with no
/// interstate movement. Macro and micro models agree exactly on the result.
std::vector<StateFlows> counts_from_rates(std::span<const StateFlows> flows);

enum class IssuancePolicy : std::uint8_t {
    /// Number at birth linked to a parent; physical card at age 15.
    AtBirth,
    /// Number to children who complete their first year; card at age 15.
    AtAgeOne,
    /// Number and card both at birth; no re-issuance at 15.
    NumberAndCardAtBirth,
};

std::string_view to_string(IssuancePolicy policy) noexcept;
/// at-birth | at-age-one | full
IssuancePolicy parse_policy(std::string_view text);

/// Whether children under 15 hold their own physical card under `policy`.
constexpr bool children_hold_cards(IssuancePolicy policy) noexcept {
    return policy == IssuancePolicy::NumberAndCardAtBirth;
}

struct CardLedger {
    RegionId state;
    int year = 0;
    std::int64_t active_cards = 0;
    std::int64_t issued_this_year = 0;
    std::int64_t returned_this_year = 0;
    /// Persons under 15 whose number is linked to a parent or guardian.
    std::int64_t child_links = 0;

    friend bool operator==(const CardLedger &, const CardLedger &) = default;
};

/// Round half to even.
std::int64_t round_count(double value);

struct Age15Transition {
    double new_cards = 0.0;
    CardLedger ledger;
};

/// Moves surviving 14-year-olds from parent linkage onto their own card:
/// new_cards = sum over sexes of P(sex,14) * s(14,15). The rounded amount
/// leaves child_links and is issued as new cards.
Age15Transition age15_transition(const AgePyramid &pop, const SurvivalSchedule &survival,
                                 const CardLedger &ledger);

using DeathsByAge = std::map<PyramidCell, std::int64_t>;

/// Deaths at 15+ and emigrants return cards. Deaths under 15 release a
/// parent linkage instead, unless `policy` gives children their own card.
CardLedger process_card_returns(const DeathsByAge &deaths, std::int64_t emigrants,
                                const CardLedger &ledger,
                                IssuancePolicy policy = IssuancePolicy::AtBirth);

/// Expected-value breakdown of one projected year.
struct DemandComponents {
    std::array<double, 2> births{0.0, 0.0};
    std::array<double, 2> age15{0.0, 0.0};
    std::array<double, 2> immigration{0.0, 0.0};
    double card_holder_deaths = 0.0;
    double emigration = 0.0;
};

struct DemandRow {
    int year = 0;
    double new_cards_male = 0.0;
    double new_cards_female = 0.0;
    double returned_cards = 0.0;
    DemandComponents components;
};

struct DemandSeries {
    int start_year = 0;
    std::vector<DemandRow> rows;
};

/// Cards newly required and returned in each of the next `horizon` years.
/// Row k covers the year starting at pop.year() + k and is labelled
/// pop.year() + k + 1. New cards = births under `policy` + age-15 issues
/// (unless children already hold cards) + immigration; returned = deaths of
/// card holders (15+, or every age under the full policy) + emigration.
/// Immigrants are split by the population's sex shares.
DemandSeries annual_card_requirement_series(const AgePyramid &pop, const SurvivalSchedule &survival,
                                            const FertilityConfig &fert,
                                            std::span<const StateFlows> flows, int horizon,
                                            IssuancePolicy policy = IssuancePolicy::AtBirth);

/// Opening ledger for a fully enrolled population: persons 15+ hold cards,
/// younger persons are parent links (or card holders under the full policy).
CardLedger initial_ledger(const AgePyramid &pop, IssuancePolicy policy);

/// Integer ledger over `horizon` projected years; element 0 is `opening`,
/// element k+1 the ledger after year k.
std::vector<CardLedger> simulate_card_ledger(const AgePyramid &pop,
                                             const SurvivalSchedule &survival,
                                             const FertilityConfig &fert,
                                             std::span<const StateFlows> flows, int horizon,
                                             IssuancePolicy policy, const CardLedger &opening);

} // namespace uidforge
