// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails.

#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common/route_oracle.hpp"
#include "safernet/errors.hpp"
#include "safernet/infer.hpp"
#include "safernet/ingest.hpp"
#include "safernet/json_io.hpp"
#include "safernet/learn.hpp"
#include "safernet/route.hpp"
#include "unit/helpers.hpp"

using namespace safernet;
using namespace safernet::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "[" << number << "] " << name << ": " << (ok ? "PASS" : "FAIL");
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << " [" << seconds << " s]" << std::endl;
    if (!ok) ++failures;
}

// ---- big-rational scoring oracle ------------------------------------------

double log_mpz(const mpz_class& z) {
    signed long exp2;
    double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

// Exact node factor as a ratio of factorial products, then one log at the
// end. No lgamma anywhere.
double oracle_log_score(const SufficientStats& s) {
    mpz_class num = 1;
    mpz_class den = 1;
    mpz_class f;
    const unsigned r = static_cast<unsigned>(s.cardinality);
    for (std::size_t j = 0; j < s.parent_configs; ++j) {
        mpz_fac_ui(f.get_mpz_t(), r - 1);
        num *= f;
        mpz_fac_ui(f.get_mpz_t(), r - 1 + static_cast<unsigned>(s.row_totals[j]));
        den *= f;
        for (int k = 0; k < s.cardinality; ++k) {
            mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned>(s.at(j, k)));
            num *= f;
        }
    }
    return log_mpz(num) - log_mpz(den);
}

// All binary count tables with q rows and total count <= max_total.
void for_each_count_table(std::size_t q, int max_total,
                          const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    std::vector<std::int64_t> cells(q * 2, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t cell, int budget) {
        if (cell == cells.size()) {
            fn(cells);
            return;
        }
        for (int v = 0; v <= budget; ++v) {
            cells[cell] = v;
            rec(cell + 1, budget - v);
        }
        cells[cell] = 0;
    };
    rec(0, max_total);
}

SufficientStats stats_from_cells(std::size_t q, const std::vector<std::int64_t>& cells) {
    SufficientStats s;
    s.variable = 0;
    s.parent_configs = q;
    s.cardinality = 2;
    s.counts = cells;
    s.row_totals.assign(q, 0);
    for (std::size_t j = 0; j < q; ++j) s.row_totals[j] = cells[j * 2] + cells[j * 2 + 1];
    return s;
}

// ---- shared fixtures -------------------------------------------------------

BayesianNetwork diamond_network() {
    Schema schema = binary_schema(4);
    DagStructure truth;
    truth.parents = {{}, {0}, {0}, {1, 2}};
    std::vector<Cpt> cpts;
    cpts.emplace_back(0, std::vector<int>{}, 1, 2, std::vector<double>{0.9, 0.1});
    cpts.emplace_back(1, std::vector<int>{0}, 2, 2, std::vector<double>{0.9, 0.1, 0.1, 0.9});
    cpts.emplace_back(2, std::vector<int>{0}, 2, 2, std::vector<double>{0.1, 0.9, 0.9, 0.1});
    cpts.emplace_back(3, std::vector<int>{1, 2}, 4, 2,
                      std::vector<double>{0.9, 0.1, 0.1, 0.9, 0.1, 0.9, 0.9, 0.1});
    return BayesianNetwork(schema, truth, std::move(cpts));
}

double avg_log_likelihood(const BayesianNetwork& bn, const Dataset& data) {
    double total = 0.0;
    for (const Record& rec : data.records) {
        for (int i = 0; i < bn.schema().size(); ++i) {
            const Cpt& c = bn.cpt(i);
            total += std::log(c.at(parent_config_rank(c.parents(), bn.schema(), rec), rec[i]));
        }
    }
    return total / static_cast<double>(data.records.size());
}

// Storm-replay fixture: two three-edge corridors between D and A. North
// edges sort lexicographically before south edges, so an all-normal tie
// resolves to the north corridor.
RoadGraph corridor_graph() {
    RoadGraph g;
    g.nodes = {"D", "n1", "n2", "s1", "s2", "A"};
    g.edges = {
        {"e-n1", "D", "n1", {}}, {"e-n2", "n1", "n2", {}}, {"e-n3", "n2", "A", {}},
        {"e-s1", "D", "s1", {}}, {"e-s2", "s1", "s2", {}}, {"e-s3", "s2", "A", {}},
    };
    return g;
}

// Network where collision depends only on weather.
BayesianNetwork weather_network() {
    Schema schema = case_study_schema();
    const int n = schema.size();
    const int wc = *schema.index_of("WC");
    const int c = *schema.index_of("C");
    DagStructure structure;
    structure.parents.assign(n, {});
    structure.parents[c] = {wc};
    std::vector<Cpt> cpts;
    for (int i = 0; i < n; ++i) {
        const int r = schema.variable(i).cardinality();
        if (i == c) {
            // P(collision | WC): normal, rain, fog, wind, snow, hail, other.
            std::vector<double> p_col{0.02, 0.10, 0.06, 0.05, 0.25, 0.30, 0.05};
            std::vector<double> table;
            for (double p : p_col) {
                table.push_back(1.0 - p);
                table.push_back(p);
            }
            cpts.emplace_back(i, structure.parents[i], p_col.size(), r, std::move(table));
        } else {
            std::vector<double> table(r, 1.0 / r);
            double acc = 0.0;
            for (int k = 0; k < r - 1; ++k) acc += table[k];
            table[r - 1] = 1.0 - acc;
            cpts.emplace_back(i, structure.parents[i], 1, r, std::move(table));
        }
    }
    return BayesianNetwork(schema, structure, std::move(cpts));
}

std::map<std::string, Evidence> storm_evidence(const Schema& schema, int hour, std::int64_t when,
                                               const RoadGraph& graph) {
    const int wc = *schema.index_of("WC");
    const int w = *schema.index_of("W");
    const int pd = *schema.index_of("PD");
    const int wc_normal = 0;
    const int wc_rain = 1;
    const int wc_snow = 4;
    std::map<std::string, Evidence> per_edge;
    for (const auto& e : graph.edges) {
        Evidence ev;
        bool north = e.id[2] == 'n';
        if (north) {
            ev.assignments[wc] = hour >= 12 ? wc_snow : wc_normal;
        } else {
            ev.assignments[wc] = hour >= 16 ? wc_rain : wc_normal;
        }
        ev.assignments[w] = week_state_from_time(when);
        ev.assignments[pd] = part_of_day_from_time(when);
        per_edge[e.id] = ev;
    }
    return per_edge;
}

// ---- CLI helpers -----------------------------------------------------------

int run_cli(const std::string& args) {
    std::string cmd = std::string(SAFERNET_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void dump(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

int main() {
    criterion(1, "K2 score vs big-rational factorial oracle", [](std::string& detail) {
        double max_err = 0.0;
        long cases = 0;
        for (std::size_t q : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
            for_each_count_table(q, 12, [&](const std::vector<std::int64_t>& cells) {
                SufficientStats s = stats_from_cells(q, cells);
                max_err = std::max(max_err, std::abs(k2_log_score(s) - oracle_log_score(s)));
                ++cases;
            });
        }
        // 500 random datasets routed through count_stats as well.
        std::mt19937_64 rng(20240626);
        for (int trial = 0; trial < 500; ++trial) {
            std::uniform_int_distribution<int> nv(1, 3);
            std::uniform_int_distribution<int> nr(0, 12);
            const int n = nv(rng);
            Schema schema = binary_schema(n);
            Dataset d{schema, {}};
            int records = nr(rng);
            std::uniform_int_distribution<int> bit(0, 1);
            for (int i = 0; i < records; ++i) {
                Record rec(n);
                for (int v = 0; v < n; ++v) rec[v] = static_cast<std::uint8_t>(bit(rng));
                d.records.push_back(rec);
            }
            std::uniform_int_distribution<int> pick(0, n - 1);
            int var = pick(rng);
            std::vector<int> parents;
            for (int v = 0; v < n; ++v) {
                if (v != var && bit(rng)) parents.push_back(v);
            }
            SufficientStats s = count_stats(d, var, parents);
            max_err = std::max(max_err, std::abs(k2_log_score(s) - oracle_log_score(s)));
            ++cases;
        }
        detail = std::to_string(cases) + " cases, max |err| = " + std::to_string(max_err);
        return max_err < 1e-9;
    });

    criterion(2, "hand anchor: counts [2,1] score ln(1/12)", [](std::string& detail) {
        SufficientStats s = stats_from_cells(1, {2, 1});
        double got = k2_log_score(s);
        double want = std::log(1.0 / 12.0);
        detail = "score = " + std::to_string(got);
        return std::abs(got - want) < 1e-9;
    });

    criterion(3, "structure recovery on the seeded 4-node network", [](std::string& detail) {
        BayesianNetwork gen = diamond_network();
        std::mt19937_64 rng(424242);
        Dataset d = sample_dataset(gen, 5000, rng);
        K2Config config;
        config.max_parents = 2;
        DagStructure learned = k2_search(d, config);
        bool ok = learned.parents == gen.structure().parents;
        if (!ok) detail = "learned parent sets differ from the truth";
        return ok;
    });

    criterion(4, "variable elimination vs enumeration on 500 random networks", [](std::string& detail) {
        std::mt19937_64 rng(101);
        double max_err = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            std::uniform_int_distribution<int> n_vars(2, 8);
            std::uniform_int_distribution<int> card(2, 4);
            std::vector<int> cards(n_vars(rng));
            for (auto& c : cards) c = card(rng);
            Schema schema = mixed_schema(cards);
            BayesianNetwork bn = random_network(rng, schema, 3);

            const int n = schema.size();
            std::uniform_int_distribution<int> pick(0, n - 1);
            int query = pick(rng);
            Evidence ev;
            std::uniform_int_distribution<int> n_ev(0, n - 1);
            for (int e = n_ev(rng); e > 0; --e) {
                int v = pick(rng);
                if (v == query) continue;
                std::uniform_int_distribution<int> st(0, schema.variable(v).cardinality() - 1);
                ev.assignments[v] = st(rng);
            }
            MarginalDistribution brute = enumerate_marginal(bn, query, ev);
            MarginalDistribution fast = eliminate_marginal(bn, query, ev);
            for (std::size_t k = 0; k < brute.probabilities.size(); ++k) {
                max_err = std::max(max_err, std::abs(brute.probabilities[k] - fast.probabilities[k]));
            }
        }
        detail = "max component error = " + std::to_string(max_err);
        return max_err < 1e-9;
    });

    criterion(5, "Dijkstra vs exhaustive path enumeration on 200 random graphs", [](std::string& detail) {
        std::mt19937_64 rng(1234);
        int routed = 0;
        for (int trial = 0; trial < 200; ++trial) {
            std::uniform_int_distribution<int> n_nodes_dist(2, 10);
            const int n = n_nodes_dist(rng);
            RoadGraph g;
            for (int i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
            std::uniform_real_distribution<double> p_dist(0.5, 1.0);
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            std::map<std::string, SegmentState> states;
            int edge_counter = 0;
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (a == b || coin(rng) > 0.4) continue;
                    std::string id = "e" + std::to_string(edge_counter++);
                    g.edges.push_back({id, g.nodes[a], g.nodes[b], {}});
                    states[id] = SegmentState{id, p_dist(rng)};
                }
            }
            PathOracle oracle{g, states};
            oracle.run(g.nodes[0], g.nodes[n - 1]);
            if (!oracle.found) {
                try {
                    safest_route(g, states, g.nodes[0], g.nodes[n - 1]);
                    detail = "expected Unreachable on trial " + std::to_string(trial);
                    return false;
                } catch (const Unreachable&) {
                    continue;
                }
            }
            Route r = safest_route(g, states, g.nodes[0], g.nodes[n - 1]);
            ++routed;
            if (r.edge_ids != oracle.best_edges) {
                detail = "path mismatch on trial " + std::to_string(trial);
                return false;
            }
            if (std::abs(r.safety - oracle.best_p) > 1e-12) {
                detail = "p(R) mismatch on trial " + std::to_string(trial);
                return false;
            }
        }
        detail = std::to_string(routed) + " routed graphs agree";
        return true;
    });

    criterion(6, "transform identity over 1000 random probability lists", [](std::string& detail) {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> unit(0.01, 1.0);
        std::uniform_int_distribution<int> len(0, 12);
        double max_err = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> ps(len(rng));
            for (auto& p : ps) p = unit(rng);
            double weight_sum = 0.0;
            for (double p : ps) weight_sum += edge_weight(p);
            max_err = std::max(max_err, std::abs(std::exp(-weight_sum) - route_safety(ps)));
        }
        detail = "max |err| = " + std::to_string(max_err);
        return max_err < 1e-12;
    });

    criterion(7, "route score anchors and strict monotonicity", [](std::string& detail) {
        if (std::abs(route_score(0.81) - (-std::log(0.19))) > 1e-12) {
            detail = "anchor 0.81 failed";
            return false;
        }
        if (std::abs(route_score(1.0 - std::exp(-2.0)) - 2.0) > 1e-12) {
            detail = "anchor 1-e^-2 failed";
            return false;
        }
        double prev = route_score(0.0);
        for (int i = 1; i < 1000; ++i) {
            double cur = route_score(i / 1000.0);
            if (!(cur > prev)) {
                detail = "not strictly increasing at " + std::to_string(i / 1000.0);
                return false;
            }
            prev = cur;
        }
        return true;
    });

    fs::path tmp = fs::path("acceptance_tmp");
    fs::create_directories(tmp);

    criterion(8, "160k-record pipeline: runtime and test log-likelihood", [&](std::string& detail) {
        std::mt19937_64 rng(2024);
        BayesianNetwork gen = random_network(rng, case_study_schema(), 3);
        Dataset full = sample_dataset(gen, 160000, rng);
        fs::path csv = tmp / "records.csv";
        {
            std::ofstream out(csv, std::ios::binary);
            write_dataset_csv(full, out);
        }

        auto start = std::chrono::steady_clock::now();
        Dataset parsed = parse_dataset(parse_csv_file(csv.string()), case_study_schema(), {});
        auto [train, test] = train_test_split(parsed, 0.8, 1);
        K2Config config;
        DagStructure learned_structure = k2_search(train, config);
        BayesianNetwork learned = learn_parameters(train, learned_structure);
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        double ll_gen = avg_log_likelihood(gen, test);
        double ll_learned = avg_log_likelihood(learned, test);
        double rel = std::abs(ll_learned - ll_gen) / std::abs(ll_gen);
        detail = "pipeline " + std::to_string(seconds) + " s, avg ll gen " + std::to_string(ll_gen) +
                 " vs learned " + std::to_string(ll_learned) + " (rel " + std::to_string(rel) + ")";
        return seconds < 60.0 && rel < 0.02;
    });

    criterion(9, "storm replay: route switch and score variation", [](std::string& detail) {
        BayesianNetwork bn = weather_network();
        RoadGraph graph = corridor_graph();
        const Schema& schema = bn.schema();

        std::vector<Route> routes;
        std::vector<int> hours;
        for (int hour = 8; hour <= 19; ++hour) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "2016-06-26T%02d:00:00Z", hour);
            std::int64_t when = parse_rfc3339(buf);
            auto per_edge = storm_evidence(schema, hour, when, graph);
            auto states = assign_safety(graph, bn, per_edge);
            Route r = safest_route(graph, states, "D", "A");

            PathOracle oracle{graph, states};
            oracle.run("D", "A");
            if (r.edge_ids != oracle.best_edges) {
                detail = "route disagrees with exhaustive enumeration at hour " + std::to_string(hour);
                return false;
            }
            routes.push_back(std::move(r));
            hours.push_back(hour);
        }

        bool switched = false;
        for (std::size_t i = 1; i < routes.size(); ++i) {
            if (routes[i].edge_ids != routes[i - 1].edge_ids) switched = true;
        }
        bool same_route_diff_score = false;
        for (std::size_t i = 0; i < routes.size() && !same_route_diff_score; ++i) {
            for (std::size_t j = i + 1; j < routes.size(); ++j) {
                if (routes[i].edge_ids == routes[j].edge_ids &&
                    std::abs(routes[i].score - routes[j].score) > 0.1) {
                    same_route_diff_score = true;
                    break;
                }
            }
        }
        detail = std::string("route switch: ") + (switched ? "yes" : "no") +
                 ", same-route score shift > 0.1: " + (same_route_diff_score ? "yes" : "no");
        return switched && same_route_diff_score;
    });

    criterion(10, "CLI determinism: byte-identical reruns", [&](std::string& detail) {
        // Small dataset over the case-study schema.
        std::mt19937_64 rng(7);
        BayesianNetwork gen = random_network(rng, case_study_schema(), 2);
        Dataset data = sample_dataset(gen, 2000, rng);
        fs::path csv = tmp / "cli_records.csv";
        {
            std::ofstream out(csv, std::ios::binary);
            write_dataset_csv(data, out);
        }
        dump(tmp / "graph.json", R"({
          "nodes": ["D", "n1", "n2", "s1", "s2", "A"],
          "edges": [
            {"id": "e-n1", "tail": "D", "head": "n1"},
            {"id": "e-n2", "tail": "n1", "head": "n2"},
            {"id": "e-n3", "tail": "n2", "head": "A"},
            {"id": "e-s1", "tail": "D", "head": "s1"},
            {"id": "e-s2", "tail": "s1", "head": "s2"},
            {"id": "e-s3", "tail": "s2", "head": "A"}
          ]
        })");
        dump(tmp / "evidence.json", R"({"WC": "rain", "LC": "night"})");
        dump(tmp / "snapshot.json",
             R"({"time": "2016-06-26T08:00:00Z", "edges": {"e-n1": {"WC": "rain"}}})");
        dump(tmp / "series.json", R"([
          {"time": "2016-06-26T08:00:00Z", "edges": {"e-n1": {"WC": "rain"}}},
          {"time": "2016-06-26T09:00:00Z", "edges": {"e-n1": {"WC": "snow"}, "e-n2": {"WC": "snow"}}},
          {"time": "2016-06-26T10:00:00Z", "edges": {}}
        ])");

        auto path = [&](const std::string& name) { return (tmp / name).string(); };
        struct Run {
            std::string args;
            std::vector<std::string> outputs;
        };
        std::vector<Run> runs = {
            {"learn --data " + path("cli_records.csv") + " --seed 7 --out ", {"net.json"}},
            {"infer --network " + path("net_a.json") + " --evidence " + path("evidence.json") + " --out ",
             {"infer.json"}},
            {"route --network " + path("net_a.json") + " --graph " + path("graph.json") + " --snapshot " +
                 path("snapshot.json") + " --from D --to A --out ",
             {"route.json"}},
            {"replay --network " + path("net_a.json") + " --graph " + path("graph.json") + " --snapshots " +
                 path("series.json") + " --from D --to A --plot-csv " + path("plot.csv") + " --out ",
             {"replay.json"}},
        };

        for (const Run& run : runs) {
            std::string primary = run.outputs.front();
            fs::path out_a = tmp / ("a_" + primary);
            fs::path out_b = tmp / ("b_" + primary);
            if (run_cli(run.args + out_a.string()) != 0 || run_cli(run.args + out_b.string()) != 0) {
                detail = "command failed: " + run.args;
                return false;
            }
            if (slurp(out_a) != slurp(out_b)) {
                detail = "outputs differ for: " + run.args;
                return false;
            }
            if (primary == "net.json") {
                fs::copy_file(out_a, tmp / "net_a.json", fs::copy_options::overwrite_existing);
            }
        }
        // Replay reruns must also produce identical plot CSVs; the file is
        // rewritten by both runs above, so rerun once more and compare.
        std::string plot_before = slurp(tmp / "plot.csv");
        if (run_cli(runs.back().args + (tmp / "c_replay.json").string()) != 0) {
            detail = "replay rerun failed";
            return false;
        }
        if (slurp(tmp / "plot.csv") != plot_before) {
            detail = "plot CSV differs between reruns";
            return false;
        }
        return true;
    });

    if (failures == 0) {
        std::cout << "all criteria passed" << std::endl;
        return 0;
    }
    std::cout << failures << " criteria failed" << std::endl;
    return 1;
}
