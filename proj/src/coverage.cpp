#include "uidforge/coverage.hpp"

#include "uidforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace uidforge {

double dual_system_estimate(const DualSystemCounts &counts, DualSystemEstimator estimator) {
    const auto [n1, n2, m] = counts;
    if (n1 < 1 || n2 < 1) {
        throw DomainError(fmt::format("both lists must be non-empty (n1={}, n2={})", n1, n2));
    }
    if (m < 0 || m > std::min(n1, n2)) {
        throw DomainError(
            fmt::format("matched count {} must lie in 0..min(n1, n2) = {}", m, std::min(n1, n2)));
    }
    const auto a = static_cast<double>(n1);
    const auto b = static_cast<double>(n2);
    const auto matched = static_cast<double>(m);
    if (estimator == DualSystemEstimator::Chapman) {
        return (a + 1.0) * (b + 1.0) / (matched + 1.0) - 1.0;
    }
    if (m == 0) {
        throw UndefinedEstimateError("no records matched between the two lists; "
                                     "Lincoln-Petersen estimate is undefined");
    }
    // Exact integer product, so identical lists give back their size even
    // when n1 * n2 exceeds 2^53.
    __extension__ using wide = __int128;
    const auto product = static_cast<wide>(n1) * n2;
    const auto quotient = static_cast<std::int64_t>(product / m);
    const auto remainder = static_cast<std::int64_t>(product % m);
    return static_cast<double>(quotient) + static_cast<double>(remainder) / matched;
}

AgePyramid apply_omission_adjustment(const AgePyramid &pyramid, const CoverageConfig &cfg) {
    const double rate = cfg.omission_per_1000;
    if (!(rate >= 0.0 && rate < 1000.0)) {
        throw DomainError(fmt::format("omission rate {} per 1000 must lie in [0, 1000)", rate));
    }
    const double enumerated_share = 1.0 - rate / 1000.0;
    AgePyramid out(pyramid.region(), pyramid.year());
    for (const auto &[cell, count] : pyramid.cells()) {
        out.set(cell.sex, cell.age, count / enumerated_share);
    }
    return out;
}

AgePyramid allocate_unknown_age(const AgePyramid &pyramid, const CoverageConfig &cfg) {
    AgePyramid out = pyramid;
    for (auto sex : kSexes) {
        const double unknown = cfg.unknown_age[index_of(sex)];
        if (!(unknown >= 0.0) || !std::isfinite(unknown)) {
            throw DomainError(fmt::format("unknown-age count {} for {} must be finite and >= 0",
                                          unknown, to_string(sex)));
        }
        if (unknown == 0.0) {
            continue;
        }
        const double known = pyramid.total(sex);
        if (!(known > 0.0)) {
            throw AllocationError(fmt::format(
                "cannot prorate {} unknown-age {} persons: no known-age {} population", unknown,
                to_string(sex), to_string(sex)));
        }
        for (const auto &[cell, count] : pyramid.cells()) {
            if (cell.sex == sex) {
                out.set(sex, cell.age, count + unknown * (count / known));
            }
        }
    }
    return out;
}

AgePyramid add_enumeration_segments(const AgePyramid &pyramid, const CoverageConfig &cfg,
                                    const SegmentProfile &profile) {
    const double segment_total = cfg.houseless_rural + cfg.houseless_urban;
    if (!(cfg.houseless_rural >= 0.0) || !(cfg.houseless_urban >= 0.0) ||
        !std::isfinite(segment_total)) {
        throw DomainError(fmt::format("houseless counts must be finite and >= 0 (rural={}, urban={})",
                                      cfg.houseless_rural, cfg.houseless_urban));
    }
    if (segment_total == 0.0) {
        return pyramid;
    }
    double weight_sum = 0.0;
    for (const auto &[cell, weight] : profile) {
        if (!(weight >= 0.0)) {
            throw DomainError(fmt::format("segment weight {} at {} age {} must be >= 0", weight,
                                          to_string(cell.sex), cell.age));
        }
        weight_sum += weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw DomainError(fmt::format("segment profile weights sum to {}, expected 1", weight_sum));
    }
    AgePyramid out = pyramid;
    for (const auto &[cell, weight] : profile) {
        out.add(cell.sex, cell.age, weight * cfg.houseless_rural + weight * cfg.houseless_urban);
    }
    return out;
}

} // namespace uidforge
