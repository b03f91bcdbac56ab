#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uidforge {

inline constexpr int kDefaultMaxAge = 100;

/// Single-year ages 0..max_age inclusive. max_age is the last age of life;
/// the top cell is an open "max_age and over" group at ingestion time.
class AgeAxis {
public:
    explicit AgeAxis(int max_age = kDefaultMaxAge);

    int max_age() const noexcept { return max_age_; }
    int size() const noexcept { return max_age_ + 1; }
    bool contains(int age) const noexcept { return age >= 0 && age <= max_age_; }

    friend bool operator==(const AgeAxis &, const AgeAxis &) = default;

private:
    int max_age_;
};

enum class Sex : std::uint8_t { Male = 0, Female = 1 };

inline constexpr std::array<Sex, 2> kSexes{Sex::Male, Sex::Female};

constexpr std::size_t index_of(Sex sex) noexcept { return static_cast<std::size_t>(sex); }
std::string_view to_string(Sex sex) noexcept;
/// Accepts M/F/Male/Female (case-insensitive). Throws DomainError otherwise.
Sex parse_sex(std::string_view text);

enum class RegionLevel : std::uint8_t { Country, State, Region, Block, Ward };

struct RegionId {
    std::string code;
    RegionLevel level = RegionLevel::Region;

    RegionId() = default;
    RegionId(std::string code_, RegionLevel level_ = RegionLevel::Region);

    friend bool operator==(const RegionId &, const RegionId &) = default;
};

struct PyramidCell {
    Sex sex;
    int age;

    friend auto operator<=>(const PyramidCell &, const PyramidCell &) = default;
};

/// Population counts by sex and single-year age for one region at one point
/// in time. Counts are expected values (reals). The container may be sparse
/// and may hold invalid values; validate_pyramid reports what is wrong and
/// every model operation checks it before use.
class AgePyramid {
public:
    AgePyramid() = default;
    AgePyramid(RegionId region, int year);

    /// Every cell of the axis present and set to `value`.
    static AgePyramid filled(RegionId region, int year, const AgeAxis &axis, double value = 0.0);

    const RegionId &region() const noexcept { return region_; }
    int year() const noexcept { return year_; }
    void set_year(int year) noexcept { year_ = year; }

    bool contains(Sex sex, int age) const;
    /// Throws DomainError if the cell is absent.
    double at(Sex sex, int age) const;
    /// Zero for absent cells.
    double value_or_zero(Sex sex, int age) const;

    void set(Sex sex, int age, double count);
    void add(Sex sex, int age, double count);

    double total() const;
    double total(Sex sex) const;

    const std::map<PyramidCell, double> &cells() const noexcept { return cells_; }
    std::size_t cell_count() const noexcept { return cells_.size(); }
    bool empty() const noexcept { return cells_.empty(); }

    friend bool operator==(const AgePyramid &, const AgePyramid &) = default;

private:
    RegionId region_;
    int year_ = 0;
    std::map<PyramidCell, double> cells_;
};

/// One-year survival probabilities s(x, x+1) by sex. Immutable.
class SurvivalSchedule {
public:
    /// `male` and `female` must each have axis.size() entries in [0,1] and
    /// end in 0 (nobody survives past the last age of life).
    SurvivalSchedule(RegionId region, AgeAxis axis, std::vector<double> male,
                     std::vector<double> female);

    /// `probability` at every age below max_age, 0 at max_age.
    static SurvivalSchedule constant(RegionId region, const AgeAxis &axis, double probability);

    const RegionId &region() const noexcept { return region_; }
    const AgeAxis &axis() const noexcept { return axis_; }
    double one_year(Sex sex, int age) const;
    const std::vector<double> &values(Sex sex) const noexcept { return one_year_[index_of(sex)]; }

private:
    RegionId region_;
    AgeAxis axis_;
    std::array<std::vector<double>, 2> one_year_;
};

inline constexpr int kFirstReproductiveAge = 15;
inline constexpr int kLastReproductiveAge = 49;

/// Age-specific fertility F(x), eligible proportion K, sex ratio at birth and
/// infant mortality per 1000 live births.
class FertilityConfig {
public:
    /// `rates` maps age to births per woman per year. Ages outside 15..49
    /// must carry zero (or be absent).
    FertilityConfig(std::map<int, double> rates, double eligible_proportion,
                    double sex_ratio_at_birth, double infant_mortality);

    double rate(int age) const;
    const std::map<int, double> &rates() const noexcept { return rates_; }
    double eligible_proportion() const noexcept { return eligible_proportion_; }
    double sex_ratio_at_birth() const noexcept { return sex_ratio_at_birth_; }
    double infant_mortality() const noexcept { return infant_mortality_; }

    /// r / (1 + r)
    double male_birth_share() const noexcept;

private:
    std::map<int, double> rates_;
    double eligible_proportion_;
    double sex_ratio_at_birth_;
    double infant_mortality_;
};

/// Probability that a person aged `age` survives `span` more years: the
/// product of one-year factors over ages age..age+span-1.
double multi_year_survival(const SurvivalSchedule &schedule, Sex sex, int age, int span);

enum class ViolationKind : std::uint8_t { NegativeCount, NonFiniteCount, MissingCell, AgeBeyondAxis };

struct PyramidViolation {
    ViolationKind kind;
    Sex sex;
    int age;
    std::string message;
};

using ValidationReport = std::vector<PyramidViolation>;

/// Every violated invariant of `pyramid` against `axis`; empty iff valid.
ValidationReport validate_pyramid(const AgePyramid &pyramid, const AgeAxis &axis);

/// Throws DomainError carrying the first violations if the report is non-empty.
void require_valid(const AgePyramid &pyramid, const AgeAxis &axis);

} // namespace uidforge
