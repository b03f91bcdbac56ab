#pragma once

#include "uidforge/demography.hpp"

#include <array>
#include <optional>
#include <vector>

namespace uidforge {

struct BirthCount {
    double total = 0.0;
    std::array<double, 2> by_sex{0.0, 0.0};

    double of(Sex sex) const noexcept { return by_sex[index_of(sex)]; }
};

struct ProjectionSeries {
    int horizon = 0;
    /// frames[0] is the input; frames[k] is the population k years later.
    std::vector<AgePyramid> frames;
};

/// Annual births to mothers aged 15..49:
///   sum_x s(x, x+1) * P_female(x) * F(x) * K
/// split by sex with male share r / (1 + r).
BirthCount project_births(const AgePyramid &pop, const SurvivalSchedule &survival,
                          const FertilityConfig &fert);

/// Scales each sex by (1 - infant_mortality / 1000). Only used when numbers
/// are issued to children who complete their first year.
BirthCount apply_infant_survival(const BirthCount &births, const FertilityConfig &fert);

/// Ages every cohort by `span` years. Output age x+span holds input age x
/// times the span-year survival from x; ages below span are zero.
AgePyramid survive_cohorts(const AgePyramid &pop, const SurvivalSchedule &survival, int span);

/// Survivors after `span` years of the age group [start_age, start_age+width),
/// rectangle rule over single-year cells. Restricted to one sex when given,
/// otherwise both sexes are summed.
double age_group_survivors(const AgePyramid &pop, const SurvivalSchedule &survival, int start_age,
                           int width, int span, std::optional<Sex> sex = std::nullopt);

/// Yearly cohort-component loop: survive one year, then fill age 0 with the
/// births computed on the start-of-year population.
ProjectionSeries project_population(const AgePyramid &pop, const SurvivalSchedule &survival,
                                    const FertilityConfig &fert, int horizon);

} // namespace uidforge
