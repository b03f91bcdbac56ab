#pragma once

#include "uidforge/demography.hpp"

#include <array>
#include <cstdint>
#include <map>

namespace uidforge {

/// Two overlapping enumerations of the same population.
struct DualSystemCounts {
    std::int64_t first_list = 0;
    std::int64_t second_list = 0;
    std::int64_t matched = 0;
};

enum class DualSystemEstimator : std::uint8_t {
    LincolnPetersen,
    /// (n1 + 1)(n2 + 1) / (m + 1) - 1, less biased for small samples.
    Chapman,
};

/// Lincoln-Petersen n1 * n2 / m by default.
/// Throws UndefinedEstimateError when m = 0 (Lincoln-Petersen only) and
/// DomainError when m > min(n1, n2) or a list is empty.
double dual_system_estimate(const DualSystemCounts &counts,
                            DualSystemEstimator estimator = DualSystemEstimator::LincolnPetersen);

struct CoverageConfig {
    /// Fraction of the true population missed by enumeration, per 1000.
    double omission_per_1000 = 0.0;
    double houseless_rural = 0.0;
    double houseless_urban = 0.0;
    /// Persons whose age was not stated, by sex.
    std::array<double, 2> unknown_age{0.0, 0.0};
};

/// true = enumerated / (1 - rate / 1000), cell by cell.
AgePyramid apply_omission_adjustment(const AgePyramid &pyramid, const CoverageConfig &cfg);

/// Prorates each sex's unknown-age count over ages in proportion to that
/// sex's known age distribution.
AgePyramid allocate_unknown_age(const AgePyramid &pyramid, const CoverageConfig &cfg);

/// Weight of each (sex, age) cell within an enumeration segment; sums to 1.
using SegmentProfile = std::map<PyramidCell, double>;

/// Distributes the rural and urban houseless counts over `profile` and adds
/// them cell-wise.
AgePyramid add_enumeration_segments(const AgePyramid &pyramid, const CoverageConfig &cfg,
                                    const SegmentProfile &profile);

} // namespace uidforge
