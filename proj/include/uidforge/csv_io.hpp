#pragma once

#include "uidforge/bayes.hpp"
#include "uidforge/card_ledger.hpp"
#include "uidforge/coverage.hpp"
#include "uidforge/demography.hpp"
#include "uidforge/projection.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace uidforge {

/// Census year stamped on loaded pyramids when the caller does not say.
inline constexpr int kDefaultBaseYear = 2011;

/// Pyramids keyed by region code.
using PopulationDataset = std::map<std::string, AgePyramid>;

/// `region,sex,age,count`. Header required. Rejects negative or non-finite
/// counts, duplicate (region, sex, age) keys and ages beyond the axis. A
/// header-only file gives an empty dataset.
PopulationDataset load_population_csv(const std::filesystem::path &path,
                                      int year = kDefaultBaseYear,
                                      const AgeAxis &axis = AgeAxis{});
std::string format_population_csv(const PopulationDataset &data);
void emit_population_csv(const PopulationDataset &data, const std::filesystem::path &path);

/// `region,sex,age,survival`; every region must list both sexes at every age.
std::map<std::string, SurvivalSchedule> load_survival_csv(const std::filesystem::path &path,
                                                          const AgeAxis &axis = AgeAxis{});

/// `age,rate`. Returned map feeds FertilityConfig.
std::map<int, double> load_fertility_rates_csv(const std::filesystem::path &path);

/// Rate schema `state,population,b,d,m,e` or count schema
/// `state,births,deaths,in,out,immig,emig`, picked by header. Count files
/// must hold whole numbers and pass the interstate closure check.
std::vector<StateFlows> load_flows_csv(const std::filesystem::path &path);
std::string format_flows_csv(std::span<const StateFlows> flows);
void emit_flows_csv(std::span<const StateFlows> flows, const std::filesystem::path &path);

/// `region,sex,count`
std::map<std::string, std::array<double, 2>> load_unknown_age_csv(
    const std::filesystem::path &path);

/// `sex,age,weight`
SegmentProfile load_segment_profile_csv(const std::filesystem::path &path);

/// `year,count,exposure`
std::vector<DemandObservation> load_observations_csv(const std::filesystem::path &path);

/// `year,new_cards_male,new_cards_female,returned_cards`, values rounded half
/// to even, `\n` line endings.
std::string format_demand_csv(const DemandSeries &series);
void emit_demand_csv(const DemandSeries &series, const std::filesystem::path &path);

/// `region,year,sex,age,count`, one block per frame.
void emit_projection_csv(const std::vector<ProjectionSeries> &series,
                         const std::filesystem::path &path);

void emit_chain_csv(const PosteriorChain &chain, const std::filesystem::path &path);

/// Writes `content` to `path`, replacing it. Throws IoError on failure.
void write_text_file(const std::filesystem::path &path, const std::string &content);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

} // namespace uidforge
