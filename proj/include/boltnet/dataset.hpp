#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "boltnet/errors.hpp"
#include "boltnet/rng.hpp"
#include "boltnet/text.hpp"

namespace boltnet {

inline constexpr std::size_t kNumInputs = 6;
inline constexpr std::size_t kNumOutputs = 3;

using InputRow = std::array<double, kNumInputs>;
using TargetRow = std::array<double, kNumOutputs>;

inline constexpr std::array<std::string_view, kNumInputs> kInputNames{
    "bolt_size", "strength_grade", "tightening_torque", "head_torque", "thread_torque", "preload"};
inline constexpr std::array<std::string_view, kNumOutputs> kOutputNames{"load_capacity", "mu_head", "mu_thread"};

// ---------------------------------------------------------------------------
// Units

enum class ForceUnit { N, kN, MN };

[[nodiscard]] inline std::string_view to_string(ForceUnit u) noexcept {
    switch (u) {
        case ForceUnit::N: return "N";
        case ForceUnit::kN: return "kN";
        case ForceUnit::MN: return "MN";
    }
    return "?";
}

[[nodiscard]] inline ForceUnit parse_force_unit(std::string_view token) {
    if (token == "N") return ForceUnit::N;
    if (token == "kN") return ForceUnit::kN;
    if (token == "MN") return ForceUnit::MN;
    throw ConfigError("unknown force unit '" + std::string(token) + "' (expected N, kN or MN)");
}

/// Power of 1000 relative to newtons: N=0, kN=1, MN=2.
[[nodiscard]] constexpr int unit_exponent(ForceUnit u) noexcept {
    switch (u) {
        case ForceUnit::N: return 0;
        case ForceUnit::kN: return 1;
        case ForceUnit::MN: return 2;
    }
    return 0;
}

/// Converts a force value. Uses a single multiplication or division by an
/// exactly representable power of 1000 so the result is correctly rounded.
[[nodiscard]] inline double convert_force(double value, ForceUnit from, ForceUnit to) noexcept {
    const int steps = unit_exponent(from) - unit_exponent(to);
    double factor = 1.0;
    for (int i = 0; i < std::abs(steps); ++i) factor *= 1000.0;
    return steps >= 0 ? value * factor : value / factor;
}

// ---------------------------------------------------------------------------
// Samples

/// One bolted-joint observation. Torques in N·m; forces in the owning
/// dataset's declared units.
struct BoltSample {
    double bolt_size_mm = 0.0;
    double strength_grade = 0.0;
    double tightening_torque_Nm = 0.0;
    double head_torque_Nm = 0.0;
    double thread_torque_Nm = 0.0;
    double preload = 0.0;
    double load_capacity = 0.0;
    double mu_head = 0.0;
    double mu_thread = 0.0;

    [[nodiscard]] InputRow inputs() const noexcept {
        return {bolt_size_mm, strength_grade, tightening_torque_Nm, head_torque_Nm, thread_torque_Nm, preload};
    }
    [[nodiscard]] TargetRow targets() const noexcept { return {load_capacity, mu_head, mu_thread}; }

    friend bool operator==(const BoltSample&, const BoltSample&) = default;
};

/// Returns the first violated invariant, or nullopt for a valid sample.
[[nodiscard]] inline std::optional<std::string> violated_invariant(const BoltSample& s) {
    const auto finite = [](double v) { return std::isfinite(v); };
    for (const double v : {s.bolt_size_mm, s.strength_grade, s.tightening_torque_Nm, s.head_torque_Nm,
                           s.thread_torque_Nm, s.preload, s.load_capacity, s.mu_head, s.mu_thread}) {
        if (!finite(v)) return "all values finite";
    }
    if (!(s.bolt_size_mm > 0)) return "bolt_size > 0";
    if (!(s.strength_grade > 0)) return "strength_grade > 0";
    if (!(s.head_torque_Nm >= 0)) return "head_torque >= 0";
    if (!(s.thread_torque_Nm >= 0)) return "thread_torque >= 0";
    if (!(s.tightening_torque_Nm >= s.head_torque_Nm)) return "tightening_torque >= head_torque";
    if (!(s.tightening_torque_Nm >= s.thread_torque_Nm)) return "tightening_torque >= thread_torque";
    if (!(s.preload > 0)) return "preload_force > 0";
    if (!(s.load_capacity >= 0)) return "load_capacity >= 0";
    if (!(s.mu_head > 0 && s.mu_head < 1)) return "0 < mu_head < 1";
    if (!(s.mu_thread > 0 && s.mu_thread < 1)) return "0 < mu_thread < 1";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
    std::vector<BoltSample> samples;
    ForceUnit preload_unit = ForceUnit::N;
    ForceUnit load_unit = ForceUnit::N;
    std::vector<std::string> group_labels;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }

    void add(const BoltSample& s, std::string group) {
        samples.push_back(s);
        group_labels.push_back(std::move(group));
    }

    /// Rows at the given indices, in the given order, with the same units.
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const {
        Dataset out;
        out.preload_unit = preload_unit;
        out.load_unit = load_unit;
        out.samples.reserve(indices.size());
        out.group_labels.reserve(indices.size());
        for (const auto i : indices) out.add(samples.at(i), group_labels.at(i));
        return out;
    }

    /// First `count` rows in file order.
    [[nodiscard]] Dataset head(std::size_t count) const {
        std::vector<std::size_t> idx(std::min(count, size()));
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return subset(idx);
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Column names for each field. Defaults match the CSV written by write_csv.
struct CsvSchema {
    std::string group = "group";
    std::string bolt_size = "bolt_size_mm";
    std::string strength_grade = "strength_grade";
    std::string tightening_torque = "tightening_torque_Nm";
    std::string head_torque = "head_torque_Nm";
    std::string thread_torque = "thread_torque_Nm";
    std::string preload = "preload";
    std::string load_capacity = "load_capacity";
    std::string mu_head = "mu_head";
    std::string mu_thread = "mu_thread";
    ForceUnit preload_unit = ForceUnit::N;
    ForceUnit load_unit = ForceUnit::N;
};

namespace detail {

inline double BoltSample::*const kSampleFields[] = {
    &BoltSample::bolt_size_mm,   &BoltSample::strength_grade, &BoltSample::tightening_torque_Nm,
    &BoltSample::head_torque_Nm, &BoltSample::thread_torque_Nm, &BoltSample::preload,
    &BoltSample::load_capacity,  &BoltSample::mu_head,        &BoltSample::mu_thread,
};

inline std::array<const std::string*, 9> numeric_columns(const CsvSchema& s) {
    return {&s.bolt_size, &s.strength_grade, &s.tightening_torque, &s.head_torque, &s.thread_torque,
            &s.preload,   &s.load_capacity,  &s.mu_head,           &s.mu_thread};
}

}  // namespace detail

/// Parses delimited text. Row numbers in errors are 1-based file lines.
[[nodiscard]] inline Dataset parse_csv(std::istream& in, const CsvSchema& schema = {}) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("no samples: input is empty");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

    const auto header = split_csv_line(line);
    const auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError("missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t group_col = column_of(schema.group);
    std::array<std::size_t, 9> cols{};
    const auto names = detail::numeric_columns(schema);
    for (std::size_t k = 0; k < cols.size(); ++k) cols[k] = column_of(*names[k]);

    Dataset d;
    d.preload_unit = schema.preload_unit;
    d.load_unit = schema.load_unit;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        BoltSample s;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto value = parse_double(fields[cols[k]]);
            if (!value) {
                throw ParseError("row " + std::to_string(row) + ", column '" + *names[k] + "': '" +
                                 fields[cols[k]] + "' is not a number");
            }
            s.*detail::kSampleFields[k] = *value;
        }
        if (const auto rule = violated_invariant(s)) {
            throw ValidationError("row " + std::to_string(row) + ": violates " + *rule);
        }
        d.add(s, fields[group_col]);
    }
    if (d.empty()) throw ValidationError("no samples");
    return d;
}

[[nodiscard]] inline Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw PersistenceError("file not found: " + path.string());
    return parse_csv(in, schema);
}

/// Writes the default-schema CSV with shortest round-trip decimals.
inline void write_csv(const Dataset& d, std::ostream& out) {
    const CsvSchema schema;
    out << schema.group;
    for (const auto* name : detail::numeric_columns(schema)) out << ',' << *name;
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.group_labels[i];
        for (const auto field : detail::kSampleFields) out << ',' << format_double(d.samples[i].*field);
        out << '\n';
    }
}

inline void save_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PersistenceError("cannot write " + path.string());
    write_csv(d, out);
    if (!out) throw PersistenceError("write failed: " + path.string());
}

[[nodiscard]] inline Dataset convert_units(Dataset d, ForceUnit preload_unit, ForceUnit load_unit) {
    for (auto& s : d.samples) {
        s.preload = convert_force(s.preload, d.preload_unit, preload_unit);
        s.load_capacity = convert_force(s.load_capacity, d.load_unit, load_unit);
    }
    d.preload_unit = preload_unit;
    d.load_unit = load_unit;
    return d;
}

// ---------------------------------------------------------------------------
// Train/test split

struct SplitDataset {
    Dataset train;
    Dataset test;
    std::uint64_t split_seed = 0;
    std::vector<std::size_t> train_indices;  // into the source dataset, ascending
    std::vector<std::size_t> test_indices;
};

/// round-half-up(0.8 * n)
[[nodiscard]] constexpr std::size_t train_size_for(std::size_t n) noexcept { return (8 * n + 5) / 10; }

/// Deterministic 80/20 split. Both halves keep source order. When stratified,
/// the test quota is apportioned across group labels by largest remainder and
/// every group with at least five members gets at least one test row.
[[nodiscard]] inline SplitDataset split(const Dataset& d, std::uint64_t seed, bool stratified = true) {
    const std::size_t n = d.size();
    if (n < 5) throw ValidationError("split needs at least 5 samples, got " + std::to_string(n));
    const std::size_t n_test = n - train_size_for(n);

    Rng rng(derive_seed(seed, 0x73706c6974ULL));
    std::vector<bool> is_test(n, false);

    if (!stratified) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(std::span(order));
        for (std::size_t k = 0; k < n_test; ++k) is_test[order[k]] = true;
    } else {
        // Groups in order of first appearance.
        std::vector<std::string> labels;
        std::vector<std::vector<std::size_t>> members;
        for (std::size_t i = 0; i < n; ++i) {
            const auto it = std::find(labels.begin(), labels.end(), d.group_labels[i]);
            if (it == labels.end()) {
                labels.push_back(d.group_labels[i]);
                members.push_back({i});
            } else {
                members[static_cast<std::size_t>(it - labels.begin())].push_back(i);
            }
        }
        const std::size_t g = labels.size();
        std::vector<std::size_t> quota(g);
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t k = 0; k < g; ++k) {
            const double share = static_cast<double>(members[k].size() * n_test) / static_cast<double>(n);
            quota[k] = static_cast<std::size_t>(share);
            assigned += quota[k];
            remainders.emplace_back(share - static_cast<double>(quota[k]), k);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t r = 0; assigned < n_test; ++r, ++assigned) ++quota[remainders[r % g].second];

        // Guarantee representation of groups with >= 5 members by taking from
        // the group holding the largest quota.
        for (std::size_t k = 0; k < g; ++k) {
            if (members[k].size() < 5 || quota[k] > 0) continue;
            std::size_t donor = g;
            for (std::size_t c = 0; c < g; ++c) {
                const bool can_give = quota[c] > 1 || (quota[c] == 1 && members[c].size() < 5);
                if (can_give && (donor == g || quota[c] > quota[donor])) donor = c;
            }
            if (donor == g) break;  // unreachable: n_test >= number of groups with >= 5 members
            --quota[donor];
            ++quota[k];
        }

        for (std::size_t k = 0; k < g; ++k) {
            rng.shuffle(std::span(members[k]));
            for (std::size_t j = 0; j < quota[k]; ++j) is_test[members[k][j]] = true;
        }
    }

    SplitDataset out;
    out.split_seed = seed;
    for (std::size_t i = 0; i < n; ++i) (is_test[i] ? out.test_indices : out.train_indices).push_back(i);
    out.train = d.subset(out.train_indices);
    out.test = d.subset(out.test_indices);
    return out;
}

}  // namespace boltnet
