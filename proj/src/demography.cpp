#include "uidforge/demography.hpp"

#include "uidforge/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

namespace uidforge {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

void check_probability_vector(const std::vector<double> &values, const AgeAxis &axis, Sex sex) {
    if (static_cast<int>(values.size()) != axis.size()) {
        throw DomainError(fmt::format("survival schedule for {} has {} entries, axis needs {}",
                                      to_string(sex), values.size(), axis.size()));
    }
    for (int age = 0; age < axis.size(); ++age) {
        const double p = values[age];
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError(fmt::format("survival probability {} at {} age {} is outside [0,1]",
                                          p, to_string(sex), age));
        }
    }
    if (values.back() != 0.0) {
        throw DomainError(fmt::format("survival at the last age of life ({}) must be 0 for {}",
                                      axis.max_age(), to_string(sex)));
    }
}

} // namespace

AgeAxis::AgeAxis(int max_age) : max_age_{max_age} {
    if (max_age < 1) {
        throw DomainError(fmt::format("max_age must be >= 1, got {}", max_age));
    }
}

std::string_view to_string(Sex sex) noexcept {
    return sex == Sex::Male ? "M" : "F";
}

Sex parse_sex(std::string_view text) {
    if (iequals(text, "M") || iequals(text, "male")) {
        return Sex::Male;
    }
    if (iequals(text, "F") || iequals(text, "female")) {
        return Sex::Female;
    }
    throw DomainError(fmt::format("unknown sex '{}'", text));
}

RegionId::RegionId(std::string code_, RegionLevel level_) : code{std::move(code_)}, level{level_} {
    if (code.empty()) {
        throw DomainError("region code must be non-empty");
    }
}

AgePyramid::AgePyramid(RegionId region, int year) : region_{std::move(region)}, year_{year} {}

AgePyramid AgePyramid::filled(RegionId region, int year, const AgeAxis &axis, double value) {
    AgePyramid pyramid(std::move(region), year);
    for (auto sex : kSexes) {
        for (int age = 0; age < axis.size(); ++age) {
            pyramid.cells_.emplace_hint(pyramid.cells_.end(), PyramidCell{sex, age}, value);
        }
    }
    return pyramid;
}

bool AgePyramid::contains(Sex sex, int age) const {
    return cells_.contains(PyramidCell{sex, age});
}

double AgePyramid::at(Sex sex, int age) const {
    auto it = cells_.find(PyramidCell{sex, age});
    if (it == cells_.end()) {
        throw DomainError(fmt::format("pyramid {} ({}) has no cell for {} age {}", region_.code,
                                      year_, to_string(sex), age));
    }
    return it->second;
}

double AgePyramid::value_or_zero(Sex sex, int age) const {
    auto it = cells_.find(PyramidCell{sex, age});
    return it == cells_.end() ? 0.0 : it->second;
}

void AgePyramid::set(Sex sex, int age, double count) {
    cells_[PyramidCell{sex, age}] = count;
}

void AgePyramid::add(Sex sex, int age, double count) {
    cells_[PyramidCell{sex, age}] += count;
}

double AgePyramid::total() const {
    return std::accumulate(cells_.begin(), cells_.end(), 0.0,
                           [](double acc, const auto &cell) { return acc + cell.second; });
}

double AgePyramid::total(Sex sex) const {
    double sum = 0.0;
    for (const auto &[cell, count] : cells_) {
        if (cell.sex == sex) {
            sum += count;
        }
    }
    return sum;
}

SurvivalSchedule::SurvivalSchedule(RegionId region, AgeAxis axis, std::vector<double> male,
                                   std::vector<double> female)
    : region_{std::move(region)}, axis_{axis}, one_year_{std::move(male), std::move(female)} {
    for (auto sex : kSexes) {
        check_probability_vector(one_year_[index_of(sex)], axis_, sex);
    }
}

SurvivalSchedule SurvivalSchedule::constant(RegionId region, const AgeAxis &axis,
                                            double probability) {
    std::vector<double> values(axis.size(), probability);
    values.back() = 0.0;
    return SurvivalSchedule(std::move(region), axis, values, values);
}

double SurvivalSchedule::one_year(Sex sex, int age) const {
    if (!axis_.contains(age)) {
        throw DomainError(fmt::format("age {} outside axis 0..{}", age, axis_.max_age()));
    }
    return one_year_[index_of(sex)][age];
}

FertilityConfig::FertilityConfig(std::map<int, double> rates, double eligible_proportion,
                                 double sex_ratio_at_birth, double infant_mortality)
    : rates_{std::move(rates)},
      eligible_proportion_{eligible_proportion},
      sex_ratio_at_birth_{sex_ratio_at_birth},
      infant_mortality_{infant_mortality} {
    for (const auto &[age, rate] : rates_) {
        if (!(rate >= 0.0) || !std::isfinite(rate)) {
            throw DomainError(fmt::format("fertility rate {} at age {} must be finite and >= 0",
                                          rate, age));
        }
        if ((age < kFirstReproductiveAge || age > kLastReproductiveAge) && rate != 0.0) {
            throw DomainError(
                fmt::format("fertility rate at age {} must be 0 outside {}..{}", age,
                            kFirstReproductiveAge, kLastReproductiveAge));
        }
    }
    if (!(eligible_proportion >= 0.0 && eligible_proportion <= 1.0)) {
        throw DomainError(fmt::format("eligible proportion {} outside [0,1]", eligible_proportion));
    }
    if (!(sex_ratio_at_birth > 0.0) || !std::isfinite(sex_ratio_at_birth)) {
        throw DomainError(fmt::format("sex ratio at birth {} must be > 0", sex_ratio_at_birth));
    }
    if (!(infant_mortality >= 0.0 && infant_mortality <= 1000.0)) {
        throw DomainError(
            fmt::format("infant mortality {} per 1000 outside [0,1000]", infant_mortality));
    }
}

double FertilityConfig::rate(int age) const {
    auto it = rates_.find(age);
    return it == rates_.end() ? 0.0 : it->second;
}

double FertilityConfig::male_birth_share() const noexcept {
    return sex_ratio_at_birth_ / (1.0 + sex_ratio_at_birth_);
}

double multi_year_survival(const SurvivalSchedule &schedule, Sex sex, int age, int span) {
    const auto &axis = schedule.axis();
    if (!axis.contains(age)) {
        throw DomainError(fmt::format("age {} outside axis 0..{}", age, axis.max_age()));
    }
    if (span < 0) {
        throw DomainError(fmt::format("survival span must be >= 0, got {}", span));
    }
    if (age + span > axis.max_age() + 1) {
        throw DomainError(fmt::format("age {} + span {} runs past the last age of life {}", age,
                                      span, axis.max_age()));
    }
    const auto &values = schedule.values(sex);
    double product = 1.0;
    for (int x = age; x < age + span; ++x) {
        product *= values[x];
    }
    return product;
}

ValidationReport validate_pyramid(const AgePyramid &pyramid, const AgeAxis &axis) {
    ValidationReport report;
    for (const auto &[cell, count] : pyramid.cells()) {
        if (!axis.contains(cell.age)) {
            report.push_back({ViolationKind::AgeBeyondAxis, cell.sex, cell.age,
                              fmt::format("{} age {} outside axis 0..{}", to_string(cell.sex),
                                          cell.age, axis.max_age())});
        }
        if (!std::isfinite(count)) {
            report.push_back({ViolationKind::NonFiniteCount, cell.sex, cell.age,
                              fmt::format("non-finite count at {} age {}", to_string(cell.sex),
                                          cell.age)});
        } else if (count < 0.0) {
            report.push_back({ViolationKind::NegativeCount, cell.sex, cell.age,
                              fmt::format("negative count {} at {} age {}", count,
                                          to_string(cell.sex), cell.age)});
        }
    }
    for (auto sex : kSexes) {
        for (int age = 0; age < axis.size(); ++age) {
            if (!pyramid.contains(sex, age)) {
                report.push_back({ViolationKind::MissingCell, sex, age,
                                  fmt::format("missing cell {} age {}", to_string(sex), age)});
            }
        }
    }
    return report;
}

void require_valid(const AgePyramid &pyramid, const AgeAxis &axis) {
    const auto report = validate_pyramid(pyramid, axis);
    if (report.empty()) {
        return;
    }
    std::string message = fmt::format("pyramid {} ({}) is invalid: {}", pyramid.region().code,
                                       pyramid.year(), report.front().message);
    if (report.size() > 1) {
        message += fmt::format(" (and {} more)", report.size() - 1);
    }
    throw DomainError(message);
}

} // namespace uidforge
