#include "safernet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "safernet/errors.hpp"

namespace safernet {

namespace {

bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

RawTable parse_csv(std::istream& in) {
    RawTable table;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_started = false;
    char c;

    auto end_cell = [&] {
        row.push_back(cell);
        cell.clear();
    };
    auto end_row = [&] {
        end_cell();
        if (table.header.empty()) {
            table.header = std::move(row);
        } else {
            table.rows.push_back(std::move(row));
        }
        row.clear();
        row_started = false;
    };

    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            row_started = true;
        } else if (c == ',') {
            end_cell();
            row_started = true;
        } else if (c == '\n') {
            if (row_started || !cell.empty()) end_row();
        } else if (c == '\r') {
            // swallowed; \r\n handled at \n
        } else {
            cell += c;
            row_started = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quote in CSV input");
    if (row_started || !cell.empty()) end_row();

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != table.header.size()) {
            throw ParseError("CSV row " + std::to_string(r + 2) + " has " + std::to_string(table.rows[r].size()) +
                             " cells, header has " + std::to_string(table.header.size()));
        }
    }
    return table;
}

RawTable parse_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_csv(in);
}

Dataset parse_dataset(const RawTable& table, const Schema& schema, const ImputationPolicy& policy,
                      ParseReport* report) {
    const int n = schema.size();
    if (static_cast<int>(table.header.size()) != n) {
        throw HeaderMismatch("header has " + std::to_string(table.header.size()) + " columns, schema has " +
                             std::to_string(n));
    }
    // column_of[i] is the CSV column holding schema variable i.
    std::vector<int> column_of(n, -1);
    for (int col = 0; col < n; ++col) {
        auto idx = schema.index_of(table.header[col]);
        if (!idx) throw HeaderMismatch("unknown column '" + table.header[col] + "'");
        if (column_of[*idx] >= 0) throw HeaderMismatch("duplicate column '" + table.header[col] + "'");
        column_of[*idx] = col;
    }

    constexpr std::uint8_t kMissing = 0xff;
    Dataset dataset;
    dataset.schema = schema;
    dataset.records.reserve(table.rows.size());

    std::vector<std::vector<std::int64_t>> observed(n);
    for (int i = 0; i < n; ++i) observed[i].assign(schema.variable(i).cardinality(), 0);
    std::vector<std::int64_t> missing_per_var(n, 0);

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Record rec(n, 0);
        for (int i = 0; i < n; ++i) {
            const std::string& cell = table.rows[r][column_of[i]];
            const VariableSpec& var = schema.variable(i);
            if (cell.empty()) {
                if (policy.mode == ImputationMode::Reject) {
                    throw RejectedMissing("missing value in row " + std::to_string(r + 2) + ", variable '" +
                                          var.name + "'");
                }
                rec[i] = kMissing;
                ++missing_per_var[i];
                continue;
            }
            int state;
            if (is_integer(cell)) {
                state = std::stoi(cell);
                if (state >= var.cardinality()) {
                    throw UnknownState("row " + std::to_string(r + 2) + ": state index " + cell +
                                       " out of range for variable '" + var.name + "'");
                }
            } else {
                auto idx = var.state_index(cell);
                if (!idx) {
                    throw UnknownState("row " + std::to_string(r + 2) + ": unknown state '" + cell +
                                       "' for variable '" + var.name + "'");
                }
                state = *idx;
            }
            rec[i] = static_cast<std::uint8_t>(state);
            ++observed[i][state];
        }
        dataset.records.push_back(std::move(rec));
    }

    // Resolve missing cells in row-major order.
    std::mt19937_64 rng(policy.seed);
    std::vector<int> column_mode(n, 0);
    for (int i = 0; i < n; ++i) {
        auto best = std::max_element(observed[i].begin(), observed[i].end());
        column_mode[i] = static_cast<int>(best - observed[i].begin());
    }
    for (Record& rec : dataset.records) {
        for (int i = 0; i < n; ++i) {
            if (rec[i] != kMissing) continue;
            std::int64_t total = std::accumulate(observed[i].begin(), observed[i].end(), std::int64_t{0});
            if (total == 0) {
                throw RejectedMissing("variable '" + schema.variable(i).name +
                                      "' has no observed values to impute from");
            }
            if (policy.mode == ImputationMode::ColumnMode) {
                rec[i] = static_cast<std::uint8_t>(column_mode[i]);
            } else {
                std::discrete_distribution<int> dist(observed[i].begin(), observed[i].end());
                rec[i] = static_cast<std::uint8_t>(dist(rng));
            }
        }
    }

    if (report) {
        report->total_imputed = 0;
        for (int i = 0; i < n; ++i) {
            report->imputed_per_column[schema.variable(i).name] = missing_per_var[i];
            report->total_imputed += missing_per_var[i];
        }
    }
    dataset.validate();
    return dataset;
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
    const Schema& schema = dataset.schema;
    for (int i = 0; i < schema.size(); ++i) {
        out << (i ? "," : "") << schema.variable(i).name;
    }
    out << "\n";
    for (const Record& rec : dataset.records) {
        for (int i = 0; i < schema.size(); ++i) {
            out << (i ? "," : "") << static_cast<int>(rec[i]);
        }
        out << "\n";
    }
}

std::pair<std::vector<int>, std::vector<int>> split_attributes(const Schema& schema) {
    std::vector<int> static_set;
    std::vector<int> dynamic_set;
    for (int i = 0; i < schema.size(); ++i) {
        const VariableSpec& var = schema.variable(i);
        switch (var.role) {
            case VariableRole::Static:
                static_set.push_back(i);
                break;
            case VariableRole::Dynamic:
                dynamic_set.push_back(i);
                break;
            case VariableRole::Target:
                break;
            case VariableRole::Unspecified:
                throw UntaggedVariable("variable '" + var.name + "' has no static/dynamic tag");
        }
    }
    return {static_set, dynamic_set};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidConfig("split fraction must be in (0, 1)");
    const std::size_t n = dataset.records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto train_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    Dataset train{dataset.schema, {}};
    Dataset test{dataset.schema, {}};
    train.records.reserve(train_size);
    test.records.reserve(n - train_size);
    for (std::size_t i = 0; i < n; ++i) {
        (i < train_size ? train : test).records.push_back(dataset.records[order[i]]);
    }
    return {std::move(train), std::move(test)};
}

std::int64_t parse_rfc3339(const std::string& timestamp) {
    int year, month, day, hour, minute, second;
    char tail = '\0';
    int matched = std::sscanf(timestamp.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &year, &month, &day, &hour, &minute,
                              &second, &tail);
    if (matched < 6 || (matched == 7 && tail != 'Z')) {
        throw ParseError("invalid RFC 3339 timestamp '" + timestamp + "'");
    }
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    std::time_t t = timegm(&tm);
    if (t == -1) throw ParseError("unrepresentable timestamp '" + timestamp + "'");
    return static_cast<std::int64_t>(t);
}

int week_state_from_time(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return (tm.tm_wday == 0 || tm.tm_wday == 6) ? 1 : 0;
}

int part_of_day_from_hour(int hour) {
    if (hour < 0 || hour > 23) throw ParseError("hour out of range: " + std::to_string(hour));
    if (hour >= 22 || hour <= 7) return 5;   // night 22-6; 7 falls to the bucket below
    if (hour <= 9) return 0;                 // morning rush 8-9
    if (hour <= 12) return 1;                // morning 10-12; 12 falls to the bucket below
    if (hour <= 15) return 2;                // noon 13-15
    if (hour <= 18) return 3;                // evening rush 16-18
    return 4;                                // evening 19-21
}

int part_of_day_from_time(std::int64_t epoch_seconds) {
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return part_of_day_from_hour(tm.tm_hour);
}

namespace {

Evidence evidence_from_json(const nlohmann::json& j, const Schema& schema, const std::string& context) {
    Evidence ev;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto var = schema.index_of(it.key());
        if (!var) throw UnknownState(context + ": unknown variable '" + it.key() + "'");
        const VariableSpec& spec = schema.variable(*var);
        std::string label = it.value().get<std::string>();
        auto state = spec.state_index(label);
        if (!state) throw UnknownState(context + ": unknown state '" + label + "' for variable '" + spec.name + "'");
        ev.assignments[*var] = *state;
    }
    return ev;
}

Snapshot snapshot_from_json(const nlohmann::json& j, const RoadGraph& graph, const Schema& schema,
                            const std::set<int>& dynamic_vars) {
    Snapshot snap;
    snap.timestamp = j.at("time").get<std::string>();
    snap.epoch_seconds = parse_rfc3339(snap.timestamp);
    for (auto it = j.at("edges").begin(); it != j.at("edges").end(); ++it) {
        if (!graph.find_edge(it.key())) {
            throw UnknownEdge("snapshot " + snap.timestamp + ": unknown edge '" + it.key() + "'");
        }
        Evidence ev = evidence_from_json(it.value(), schema, "snapshot " + snap.timestamp);
        for (auto [var, state] : ev.assignments) {
            if (!dynamic_vars.count(var)) {
                throw StaticInSnapshot("snapshot " + snap.timestamp + ": variable '" +
                                       schema.variable(var).name + "' is not dynamic");
            }
        }
        snap.evidence_per_edge[it.key()] = std::move(ev);
    }
    return snap;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

}  // namespace

SnapshotSeries load_snapshots(const std::string& path, const RoadGraph& graph, const Schema& schema) {
    nlohmann::json j = load_json_file(path);
    auto [static_set, dynamic_set] = split_attributes(schema);
    std::set<int> dynamic_vars(dynamic_set.begin(), dynamic_set.end());

    SnapshotSeries series;
    try {
        if (j.is_array()) {
            for (const auto& entry : j) {
                series.snapshots.push_back(snapshot_from_json(entry, graph, schema, dynamic_vars));
            }
        } else {
            series.snapshots.push_back(snapshot_from_json(j, graph, schema, dynamic_vars));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    for (std::size_t i = 1; i < series.snapshots.size(); ++i) {
        if (series.snapshots[i].epoch_seconds <= series.snapshots[i - 1].epoch_seconds) {
            throw NonMonotoneTimestamps("snapshot timestamps must be strictly increasing at " +
                                        series.snapshots[i].timestamp);
        }
    }
    return series;
}

RoadGraph load_graph(const std::string& path) {
    nlohmann::json j = load_json_file(path);
    RoadGraph graph;
    try {
        for (const auto& n : j.at("nodes")) graph.nodes.push_back(n.get<std::string>());
        for (const auto& e : j.at("edges")) {
            RoadGraph::Edge edge;
            edge.id = e.at("id").get<std::string>();
            edge.tail = e.at("tail").get<std::string>();
            edge.head = e.at("head").get<std::string>();
            if (e.contains("static")) {
                for (auto it = e["static"].begin(); it != e["static"].end(); ++it) {
                    edge.static_attrs[it.key()] = it.value().get<std::string>();
                }
            }
            graph.edges.push_back(std::move(edge));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    graph.validate();
    return graph;
}

}  // namespace safernet
