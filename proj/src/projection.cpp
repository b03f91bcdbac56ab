#include "uidforge/projection.hpp"

#include "uidforge/errors.hpp"

#include <fmt/format.h>

namespace uidforge {

BirthCount project_births(const AgePyramid &pop, const SurvivalSchedule &survival,
                          const FertilityConfig &fert) {
    const auto &axis = survival.axis();
    if (axis.max_age() < kLastReproductiveAge) {
        throw DomainError(fmt::format("age axis 0..{} does not cover reproductive ages {}..{}",
                                      axis.max_age(), kFirstReproductiveAge,
                                      kLastReproductiveAge));
    }
    const double eligible = fert.eligible_proportion();
    double total = 0.0;
    for (int age = kFirstReproductiveAge; age <= kLastReproductiveAge; ++age) {
        const double mothers = pop.at(Sex::Female, age);
        if (mothers < 0.0) {
            throw DomainError(fmt::format("negative female count at age {}", age));
        }
        total += survival.one_year(Sex::Female, age) * mothers * fert.rate(age) * eligible;
    }

    BirthCount births;
    births.total = total;
    births.by_sex[index_of(Sex::Male)] = total * fert.male_birth_share();
    births.by_sex[index_of(Sex::Female)] = total - births.by_sex[index_of(Sex::Male)];
    return births;
}

BirthCount apply_infant_survival(const BirthCount &births, const FertilityConfig &fert) {
    const double survive = (1000.0 - fert.infant_mortality()) / 1000.0;
    BirthCount out;
    out.by_sex[0] = births.by_sex[0] * survive;
    out.by_sex[1] = births.by_sex[1] * survive;
    out.total = out.by_sex[0] + out.by_sex[1];
    return out;
}

AgePyramid survive_cohorts(const AgePyramid &pop, const SurvivalSchedule &survival, int span) {
    const auto &axis = survival.axis();
    if (span < 1) {
        throw DomainError(fmt::format("survival span must be >= 1, got {}", span));
    }
    if (span > axis.max_age()) {
        throw DomainError(
            fmt::format("survival span {} exceeds last age of life {}", span, axis.max_age()));
    }
    require_valid(pop, axis);

    AgePyramid out = AgePyramid::filled(pop.region(), pop.year() + span, axis);
    for (auto sex : kSexes) {
        for (int age = 0; age + span <= axis.max_age(); ++age) {
            out.set(sex, age + span,
                    pop.at(sex, age) * multi_year_survival(survival, sex, age, span));
        }
    }
    return out;
}

double age_group_survivors(const AgePyramid &pop, const SurvivalSchedule &survival, int start_age,
                           int width, int span, std::optional<Sex> sex) {
    const auto &axis = survival.axis();
    if (start_age < 0 || width < 1 || span < 0) {
        throw DomainError(fmt::format("invalid age group start={} width={} span={}", start_age,
                                      width, span));
    }
    if (start_age + width + span > axis.max_age() + 1) {
        throw DomainError(fmt::format("age group {}..{} survived {} years runs past age {}",
                                      start_age, start_age + width - 1, span, axis.max_age()));
    }
    double survivors = 0.0;
    for (auto s : kSexes) {
        if (sex && *sex != s) {
            continue;
        }
        for (int t = 0; t < width; ++t) {
            survivors +=
                pop.at(s, start_age + t) * multi_year_survival(survival, s, start_age + t, span);
        }
    }
    return survivors;
}

ProjectionSeries project_population(const AgePyramid &pop, const SurvivalSchedule &survival,
                                    const FertilityConfig &fert, int horizon) {
    if (horizon < 0) {
        throw DomainError(fmt::format("horizon must be >= 0, got {}", horizon));
    }
    require_valid(pop, survival.axis());

    ProjectionSeries series;
    series.horizon = horizon;
    series.frames.reserve(static_cast<std::size_t>(horizon) + 1);
    series.frames.push_back(pop);
    for (int k = 0; k < horizon; ++k) {
        const auto &current = series.frames.back();
        const auto births = project_births(current, survival, fert);
        auto next = survive_cohorts(current, survival, 1);
        for (auto sex : kSexes) {
            next.set(sex, 0, births.of(sex));
        }
        series.frames.push_back(std::move(next));
    }
    return series;
}

} // namespace uidforge
