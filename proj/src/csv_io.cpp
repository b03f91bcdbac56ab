#include "uidforge/csv_io.hpp"

#include "uidforge/errors.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace uidforge {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::string join(const std::vector<std::string_view> &fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += fields[i];
    }
    return out;
}

/// Line-oriented reader for comma-separated files with a required header.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path &path) : path_{path.string()}, in_{path} {
        if (!in_) {
            throw IoError(fmt::format("{}: cannot open for reading", path_));
        }
    }

    /// Reads the header and returns its trimmed fields.
    std::vector<std::string> header() {
        if (!next_line()) {
            throw ParseError(path_, 1, "missing header row");
        }
        std::vector<std::string> names;
        for (auto field : split_fields(line_)) {
            names.emplace_back(field);
        }
        return names;
    }

    void expect_header(const std::vector<std::string_view> &expected) {
        const auto names = header();
        if (names.size() != expected.size() ||
            !std::equal(names.begin(), names.end(), expected.begin())) {
            throw ParseError(path_, line_number_,
                             fmt::format("expected header '{}'", join(expected)));
        }
    }

    /// Next non-blank data row, split into fields.
    bool next(std::vector<std::string_view> &fields) {
        while (next_line()) {
            if (!trim(line_).empty()) {
                fields = split_fields(line_);
                return true;
            }
        }
        return false;
    }

    void require_fields(const std::vector<std::string_view> &fields, std::size_t n) const {
        if (fields.size() != n) {
            fail(fmt::format("expected {} fields, found {}", n, fields.size()));
        }
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw ParseError(path_, line_number_, what);
    }

    [[noreturn]] void data_fail(const std::string &what) const {
        throw DataError(path_, line_number_, what);
    }

    double real(std::string_view field, std::string_view column) const {
        double value = 0.0;
        const auto *end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, value);
        if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
            fail(fmt::format("column {}: '{}' is not a finite number", column, field));
        }
        return value;
    }

    double non_negative(std::string_view field, std::string_view column) const {
        const double value = real(field, column);
        if (value < 0.0) {
            fail(fmt::format("column {}: value {} must be >= 0", column, field));
        }
        return value;
    }

    std::int64_t integer(std::string_view field, std::string_view column) const {
        std::int64_t value = 0;
        const auto *end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, value);
        if (field.empty() || ec != std::errc{} || ptr != end) {
            fail(fmt::format("column {}: '{}' is not an integer", column, field));
        }
        return value;
    }

    /// Whole-number count written either as an integer or a real like 12.0.
    double whole_count(std::string_view field, std::string_view column) const {
        const double value = non_negative(field, column);
        if (std::floor(value) != value) {
            fail(fmt::format("column {}: count '{}' must be a whole number", column, field));
        }
        return value;
    }

    Sex sex(std::string_view field) const {
        try {
            return parse_sex(field);
        } catch (const DomainError &e) {
            fail(e.what());
        }
    }

    int age(std::string_view field, const AgeAxis &axis) const {
        const auto value = integer(field, "age");
        if (value < 0) {
            fail(fmt::format("age {} must be >= 0", value));
        }
        if (value > axis.max_age()) {
            fail(fmt::format("age {} beyond last age of life {}", value, axis.max_age()));
        }
        return static_cast<int>(value);
    }

    std::string_view code(std::string_view field, std::string_view column) const {
        if (field.empty()) {
            fail(fmt::format("column {} must be non-empty", column));
        }
        return field;
    }

    const std::string &path() const noexcept { return path_; }
    std::size_t line_number() const noexcept { return line_number_; }

private:
    bool next_line() {
        if (!std::getline(in_, line_)) {
            return false;
        }
        ++line_number_;
        if (line_number_ == 1 && line_.starts_with("\xEF\xBB\xBF")) {
            line_.erase(0, 3);
        }
        return true;
    }

    std::string path_;
    std::ifstream in_;
    std::string line_;
    std::size_t line_number_ = 0;
};

void append_real(std::string &out, double value) {
    out += format_real(value);
}

} // namespace

std::string format_real(double value) {
    // Fixed notation keeps counts like 623000000 readable; a double needs at
    // most ~330 characters this way.
    char buffer[512];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed);
    if (!std::isfinite(value) || ec != std::errc{}) {
        throw DomainError(fmt::format("cannot format {}", value));
    }
    return std::string(buffer, ptr);
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(fmt::format("{}: cannot open for writing", path.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw IoError(fmt::format("{}: write failed", path.string()));
    }
}

PopulationDataset load_population_csv(const std::filesystem::path &path, int year,
                                      const AgeAxis &axis) {
    CsvReader reader(path);
    reader.expect_header({"region", "sex", "age", "count"});
    PopulationDataset data;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        reader.require_fields(fields, 4);
        const std::string region{reader.code(fields[0], "region")};
        const auto sex = reader.sex(fields[1]);
        const int age = reader.age(fields[2], axis);
        const double count = reader.non_negative(fields[3], "count");
        auto [it, inserted] = data.try_emplace(region, RegionId{region}, year);
        if (!inserted && it->second.contains(sex, age)) {
            reader.data_fail(fmt::format("duplicate key ({}, {}, {})", region, to_string(sex), age));
        }
        it->second.set(sex, age, count);
    }
    return data;
}

std::string format_population_csv(const PopulationDataset &data) {
    std::string out = "region,sex,age,count\n";
    for (const auto &[code, pyramid] : data) {
        for (const auto &[cell, count] : pyramid.cells()) {
            out += fmt::format("{},{},{},", code, to_string(cell.sex), cell.age);
            append_real(out, count);
            out += '\n';
        }
    }
    return out;
}

void emit_population_csv(const PopulationDataset &data, const std::filesystem::path &path) {
    write_text_file(path, format_population_csv(data));
}

std::map<std::string, SurvivalSchedule> load_survival_csv(const std::filesystem::path &path,
                                                          const AgeAxis &axis) {
    CsvReader reader(path);
    reader.expect_header({"region", "sex", "age", "survival"});

    constexpr double kUnset = -1.0;
    std::map<std::string, std::array<std::vector<double>, 2>> columns;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        reader.require_fields(fields, 4);
        const std::string region{reader.code(fields[0], "region")};
        const auto sex = reader.sex(fields[1]);
        const int age = reader.age(fields[2], axis);
        const double p = reader.real(fields[3], "survival");
        if (p < 0.0 || p > 1.0) {
            reader.fail(fmt::format("survival probability {} outside [0,1]", fields[3]));
        }
        auto &values = columns[region];
        for (auto &v : values) {
            if (v.empty()) {
                v.assign(static_cast<std::size_t>(axis.size()), kUnset);
            }
        }
        auto &slot = values[index_of(sex)][static_cast<std::size_t>(age)];
        if (slot != kUnset) {
            reader.data_fail(fmt::format("duplicate key ({}, {}, {})", region, to_string(sex), age));
        }
        slot = p;
    }

    std::map<std::string, SurvivalSchedule> schedules;
    for (auto &[region, values] : columns) {
        for (auto sex : kSexes) {
            const auto &v = values[index_of(sex)];
            for (int age = 0; age < axis.size(); ++age) {
                if (v[static_cast<std::size_t>(age)] == kUnset) {
                    throw DataError(reader.path(), reader.line_number(),
                                    fmt::format("region {} has no survival for {} age {}", region,
                                                to_string(sex), age));
                }
            }
        }
        try {
            schedules.emplace(region, SurvivalSchedule(RegionId{region}, axis,
                                                       std::move(values[0]), std::move(values[1])));
        } catch (const DomainError &e) {
            throw DataError(reader.path(), reader.line_number(),
                            fmt::format("region {}: {}", region, e.what()));
        }
    }
    return schedules;
}

std::map<int, double> load_fertility_rates_csv(const std::filesystem::path &path) {
    CsvReader reader(path);
    reader.expect_header({"age", "rate"});
    std::map<int, double> rates;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        reader.require_fields(fields, 2);
        const auto age = reader.integer(fields[0], "age");
        const double rate = reader.non_negative(fields[1], "rate");
        if (age < 0 || age > 1000) {
            reader.fail(fmt::format("age {} out of range", age));
        }
        if ((age < kFirstReproductiveAge || age > kLastReproductiveAge) && rate != 0.0) {
            reader.fail(fmt::format("fertility at age {} must be 0 outside {}..{}", age,
                                    kFirstReproductiveAge, kLastReproductiveAge));
        }
        if (!rates.emplace(static_cast<int>(age), rate).second) {
            reader.data_fail(fmt::format("duplicate age {}", age));
        }
    }
    return rates;
}

namespace {

const std::vector<std::string_view> kRateHeader{"state", "population", "b", "d", "m", "e"};
const std::vector<std::string_view> kCountHeader{"state", "births", "deaths", "in",
                                                 "out",   "immig",  "emig"};

} // namespace

std::vector<StateFlows> load_flows_csv(const std::filesystem::path &path) {
    CsvReader reader(path);
    const auto names = reader.header();
    const auto matches = [&](const std::vector<std::string_view> &expected) {
        return names.size() == expected.size() &&
               std::equal(names.begin(), names.end(), expected.begin());
    };
    const bool rate_based = matches(kRateHeader);
    if (!rate_based && !matches(kCountHeader)) {
        reader.fail(fmt::format("expected header '{}' or '{}'", join(kRateHeader),
                                join(kCountHeader)));
    }
    const auto &header = rate_based ? kRateHeader : kCountHeader;

    std::vector<StateFlows> flows;
    std::set<std::string, std::less<>> seen;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        if (fields.size() != header.size()) {
            const auto &other = rate_based ? kCountHeader : kRateHeader;
            if (fields.size() == other.size()) {
                reader.data_fail(fmt::format("row has {} fields: rate and count schemas cannot be "
                                             "mixed in one file",
                                             fields.size()));
            }
            reader.require_fields(fields, header.size());
        }
        const std::string state{reader.code(fields[0], "state")};
        if (!seen.insert(state).second) {
            reader.data_fail(fmt::format("duplicate state {}", state));
        }
        if (rate_based) {
            RateFlows r;
            r.population = reader.non_negative(fields[1], "population");
            r.birth_rate = reader.non_negative(fields[2], "b");
            r.death_rate = reader.non_negative(fields[3], "d");
            r.immigration_rate = reader.non_negative(fields[4], "m");
            r.emigration_rate = reader.non_negative(fields[5], "e");
            flows.emplace_back(RegionId{state, RegionLevel::State}, r);
        } else {
            CountFlows c;
            c.births = reader.whole_count(fields[1], "births");
            c.deaths = reader.whole_count(fields[2], "deaths");
            c.interstate_in = reader.whole_count(fields[3], "in");
            c.interstate_out = reader.whole_count(fields[4], "out");
            c.immigration = reader.whole_count(fields[5], "immig");
            c.emigration = reader.whole_count(fields[6], "emig");
            flows.emplace_back(RegionId{state, RegionLevel::State}, c);
        }
    }
    if (!rate_based) {
        try {
            check_interstate_closure(flows);
        } catch (const ConsistencyError &e) {
            throw ConsistencyError(fmt::format("{}: {}", reader.path(), e.what()));
        }
    }
    return flows;
}

std::string format_flows_csv(std::span<const StateFlows> flows) {
    if (flows.empty()) {
        return join(kRateHeader) + "\n";
    }
    const bool rate_based = flows.front().is_rate_based();
    std::string out = join(rate_based ? kRateHeader : kCountHeader) + "\n";
    for (const auto &state : flows) {
        if (state.is_rate_based() != rate_based) {
            throw DomainError("cannot write mixed rate- and count-based flows to one file");
        }
        out += state.state().code;
        const auto values =
            rate_based ? std::vector<double>{state.rates().population, state.rates().birth_rate,
                                             state.rates().death_rate,
                                             state.rates().immigration_rate,
                                             state.rates().emigration_rate}
                       : std::vector<double>{state.counts().births,        state.counts().deaths,
                                             state.counts().interstate_in,
                                             state.counts().interstate_out,
                                             state.counts().immigration,   state.counts().emigration};
        for (double v : values) {
            out += ',';
            append_real(out, v);
        }
        out += '\n';
    }
    return out;
}

void emit_flows_csv(std::span<const StateFlows> flows, const std::filesystem::path &path) {
    write_text_file(path, format_flows_csv(flows));
}

std::map<std::string, std::array<double, 2>> load_unknown_age_csv(
    const std::filesystem::path &path) {
    CsvReader reader(path);
    reader.expect_header({"region", "sex", "count"});
    std::map<std::string, std::array<double, 2>> unknown;
    std::set<std::pair<std::string, Sex>> seen;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        reader.require_fields(fields, 3);
        const std::string region{reader.code(fields[0], "region")};
        const auto sex = reader.sex(fields[1]);
        if (!seen.emplace(region, sex).second) {
            reader.data_fail(fmt::format("duplicate key ({}, {})", region, to_string(sex)));
        }
        unknown[region][index_of(sex)] = reader.non_negative(fields[2], "count");
    }
    return unknown;
}

SegmentProfile load_segment_profile_csv(const std::filesystem::path &path) {
    CsvReader reader(path);
    reader.expect_header({"sex", "age", "weight"});
    SegmentProfile profile;
    std::vector<std::string_view> fields;
    const AgeAxis any_age{1000};
    while (reader.next(fields)) {
        reader.require_fields(fields, 3);
        const auto sex = reader.sex(fields[0]);
        const int age = reader.age(fields[1], any_age);
        if (!profile.emplace(PyramidCell{sex, age}, reader.non_negative(fields[2], "weight"))
                 .second) {
            reader.data_fail(fmt::format("duplicate key ({}, {})", to_string(sex), age));
        }
    }
    return profile;
}

std::vector<DemandObservation> load_observations_csv(const std::filesystem::path &path) {
    CsvReader reader(path);
    reader.expect_header({"year", "count", "exposure"});
    std::vector<DemandObservation> data;
    std::vector<std::string_view> fields;
    while (reader.next(fields)) {
        reader.require_fields(fields, 3);
        DemandObservation obs;
        obs.year = static_cast<int>(reader.integer(fields[0], "year"));
        obs.count = reader.integer(fields[1], "count");
        if (obs.count < 0) {
            reader.fail(fmt::format("count {} must be >= 0", obs.count));
        }
        obs.exposure = reader.real(fields[2], "exposure");
        if (!(obs.exposure > 0.0)) {
            reader.fail(fmt::format("exposure {} must be > 0", fields[2]));
        }
        data.push_back(obs);
    }
    return data;
}

std::string format_demand_csv(const DemandSeries &series) {
    std::string out = "year,new_cards_male,new_cards_female,returned_cards\n";
    for (const auto &row : series.rows) {
        out += fmt::format("{},{},{},{}\n", row.year, round_count(row.new_cards_male),
                           round_count(row.new_cards_female), round_count(row.returned_cards));
    }
    return out;
}

void emit_demand_csv(const DemandSeries &series, const std::filesystem::path &path) {
    write_text_file(path, format_demand_csv(series));
}

void emit_projection_csv(const std::vector<ProjectionSeries> &series,
                         const std::filesystem::path &path) {
    std::string out = "region,year,sex,age,count\n";
    for (const auto &projection : series) {
        for (const auto &frame : projection.frames) {
            for (const auto &[cell, count] : frame.cells()) {
                out += fmt::format("{},{},{},{},", frame.region().code, frame.year(),
                                   to_string(cell.sex), cell.age);
                append_real(out, count);
                out += '\n';
            }
        }
    }
    write_text_file(path, out);
}

void emit_chain_csv(const PosteriorChain &chain, const std::filesystem::path &path) {
    std::string out = "iteration,beta\n";
    for (std::size_t i = 0; i < chain.samples.size(); ++i) {
        out += fmt::format("{},", chain.burn_in + i);
        append_real(out, chain.samples[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace uidforge
