#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "safernet/infer.hpp"
#include "safernet/route.hpp"
#include "safernet/schema.hpp"

namespace safernet {

/// Rectangular table of cell strings; an empty cell is a missing value.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

enum class ImputationMode { Reject, ColumnMode, MarginalSample };

struct ImputationPolicy {
    ImputationMode mode = ImputationMode::ColumnMode;
    std::uint64_t seed = 0;
};

/// Per-column imputed-cell counts from a parse_dataset run.
struct ParseReport {
    std::map<std::string, std::int64_t> imputed_per_column;
    std::int64_t total_imputed = 0;
};

/// CSV as consumed by parse_dataset: comma separated, first row is the
/// header, cells are bare or double-quoted, "" inside quotes escapes a
/// quote, empty cell = missing.
RawTable parse_csv(std::istream& in);
RawTable parse_csv_file(const std::string& path);

/// Maps a RawTable onto a schema. Header names must match schema names
/// (order-insensitive); cells are state labels or integer state indices.
/// Missing cells are resolved per policy.
Dataset parse_dataset(const RawTable& table, const Schema& schema, const ImputationPolicy& policy,
                      ParseReport* report = nullptr);

/// Serializes a dataset back to the CSV wire format (integer state codes).
void write_dataset_csv(const Dataset& dataset, std::ostream& out);

/// Partitions a schema's variables into (static, dynamic) index sets by
/// their roles; the collision target belongs to neither. Throws
/// UntaggedVariable for variables without a role.
std::pair<std::vector<int>, std::vector<int>> split_attributes(const Schema& schema);

/// Deterministic shuffled split; |train| = round(fraction * N).
std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset, double fraction, std::uint64_t seed);

/// One timestamped map of per-edge dynamic evidence.
struct Snapshot {
    std::string timestamp;  // RFC 3339
    std::int64_t epoch_seconds = 0;
    std::map<std::string, Evidence> evidence_per_edge;
};

struct SnapshotSeries {
    std::vector<Snapshot> snapshots;
};

/// Parses "YYYY-MM-DDTHH:MM:SS[Z]"; throws ParseError on anything else.
std::int64_t parse_rfc3339(const std::string& timestamp);

/// Week variable state (0 week, 1 weekend) for an epoch timestamp.
int week_state_from_time(std::int64_t epoch_seconds);

/// Part-of-day bucket for an hour of day. Hours not covered by a bucket
/// fall to the bucket of the nearest covered hour below them.
int part_of_day_from_hour(int hour);
int part_of_day_from_time(std::int64_t epoch_seconds);

/// Loads and validates a snapshot series: timestamps strictly increasing,
/// every referenced edge in the graph, every evidence variable dynamic.
SnapshotSeries load_snapshots(const std::string& path, const RoadGraph& graph, const Schema& schema);

/// Parses a road-graph JSON file.
RoadGraph load_graph(const std::string& path);

}  // namespace safernet
