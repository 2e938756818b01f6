#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "d2dsim/runner.hpp"

using namespace d2dsim;
using nlohmann::json;

namespace {

json minimal_dars() {
  return json::parse(R"({
    "model": "dars",
    "topology": {
      "nodes": 4,
      "links": [
        {"src": 0, "dst": 1}, {"src": 0, "dst": 2},
        {"src": 1, "dst": 3}, {"src": 2, "dst": 3}
      ],
      "profiles": [
        {}, {"compute": 0.1}, {}, {}
      ]
    },
    "flows": [{"source": 0, "dest": 3}],
    "policy": {"name": "dars"},
    "sim": {"slots": 2000, "seed": 3}
  })");
}

json minimal_dcc() {
  return json::parse(R"({
    "model": "dcc",
    "dcc": {
      "devices": 3,
      "arrivals": [
        {"kind": "poisson", "mean": 0.2},
        {"kind": "poisson", "mean": 0.2},
        {"kind": "poisson", "mean": 0.2}
      ]
    },
    "sim": {"slots": 2000, "seed": 3}
  })");
}

}  // namespace

TEST_CASE("defaults are filled and echoed") {
  json resolved = resolve_config(minimal_dars());
  CHECK(resolved["policy"]["M"] == 200.0);
  CHECK(resolved["policy"]["R_max"] == 1.0);
  CHECK(resolved["sim"]["warmup"] == 200);  // slots/10
  CHECK(resolved["sim"]["loss_mode"] == "stochastic");
  CHECK(resolved["sim"]["interference"] == "node_exclusive");
  CHECK(resolved["topology"]["links"][0]["rate"] == 1.0);
  CHECK(resolved["flows"][0]["utility"]["kind"] == "log1p");

  json dcc = resolve_config(minimal_dcc());
  CHECK(dcc["dcc"]["beta"] == 0.05);
  CHECK(dcc["dcc"]["mode"] == "unicast");
  CHECK(dcc["dcc"]["utilities"].size() == 3);
}

TEST_CASE("unknown keys are rejected with the key named") {
  json bad = minimal_dars();
  bad["simulation"] = json::object();
  CHECK_THROWS_WITH_AS(resolve_config(bad), doctest::Contains("simulation"),
                       std::invalid_argument);

  json bad2 = minimal_dars();
  bad2["sim"]["sloots"] = 10;
  CHECK_THROWS_WITH_AS(resolve_config(bad2), doctest::Contains("sloots"),
                       std::invalid_argument);

  json bad3 = minimal_dars();
  bad3["topology"]["links"][0]["loss"] = 0.5;
  CHECK_THROWS_WITH_AS(resolve_config(bad3), doctest::Contains("loss"),
                       std::invalid_argument);
}

TEST_CASE("schema violations carry structured messages") {
  json bad = minimal_dars();
  bad["flows"] = json::array();
  CHECK_THROWS_WITH_AS(resolve_config(bad), doctest::Contains("flows"),
                       std::invalid_argument);

  json bad2 = minimal_dars();
  bad2["sweep"] = {{"param", "sim.seed"}, {"values", json::array()}};
  CHECK_THROWS_WITH_AS(resolve_config(bad2), doctest::Contains("sweep.values"),
                       std::invalid_argument);
}

TEST_CASE("overrides navigate dotted paths and parse JSON scalars") {
  json doc = resolve_config(minimal_dars());  // overrides address the resolved doc
  apply_override(doc, "sim.seed=7");
  CHECK(doc["sim"]["seed"] == 7);
  apply_override(doc, "topology.links.0.loss_p=0.25");
  CHECK(doc["topology"]["links"][0]["loss_p"] == 0.25);
  apply_override(doc, "policy.name=backpressure");
  CHECK(doc["policy"]["name"] == "backpressure");
  CHECK_THROWS_AS(apply_override(doc, "sim.nope=3"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(doc, "no_equals"), std::invalid_argument);

  set_json_path(doc, "topology.links.*.loss_p", 0.5);
  for (const json& l : doc["topology"]["links"]) CHECK(l["loss_p"] == 0.5);
}

TEST_CASE("experiment rows are deterministic and parallel-invariant") {
  json doc = minimal_dars();
  doc["sim"]["reps"] = 3;
  doc["topology"]["links"][0]["loss_p"] = 0.2;
  doc["topology"]["links"][2]["loss_p"] = 0.2;
  ExperimentConfig cfg = parse_config(resolve_config(doc));
  ExperimentResult serial = execute_experiment(cfg, false);
  ExperimentResult parallel = execute_experiment(cfg, true);
  CHECK(rows_to_csv(serial) == rows_to_csv(parallel));
  CHECK(serial.rows.size() == 3);
}

TEST_CASE("sweep: one row per value per rep, ordered") {
  json doc = minimal_dars();
  doc["sim"]["reps"] = 2;
  doc["sweep"] = {{"param", "topology.profiles.1.compute"},
                  {"values", {0.1, 0.5, 1.0}}};
  ExperimentConfig cfg = parse_config(resolve_config(doc));
  ExperimentResult result = execute_experiment(cfg);
  REQUIRE(result.rows.size() == 6);
  CHECK(result.rows[0].sweep_value == 0.1);
  CHECK(result.rows[0].rep == 0);
  CHECK(result.rows[1].rep == 1);
  CHECK(result.rows[4].sweep_value == 1.0);
  // Goodput nondecreasing in the relay capability.
  CHECK(result.rows[0].total_goodput <= result.rows[2].total_goodput + 1e-9);
  CHECK(result.rows[2].total_goodput <= result.rows[4].total_goodput + 1e-9);
}

TEST_CASE("resolved-config echo re-parses to identical digests") {
  json doc = minimal_dars();
  doc["sim"]["reps"] = 2;
  json resolved = resolve_config(doc);
  ExperimentConfig cfg = parse_config(resolved);
  ExperimentResult first = execute_experiment(cfg);

  json echoed = resolve_config(resolved);  // echo must be schema-stable
  CHECK(echoed == resolved);
  ExperimentConfig cfg2 = parse_config(echoed);
  ExperimentResult second = execute_experiment(cfg2);
  CHECK(rows_to_csv(first) == rows_to_csv(second));
  for (size_t i = 0; i < first.rows.size(); ++i)
    CHECK(first.rows[i].trace_digest == second.rows[i].trace_digest);
}

TEST_CASE("csv: header fixed, golden sample") {
  json doc = minimal_dars();
  doc["sim"]["slots"] = 500;
  doc["sim"]["warmup"] = 50;
  ExperimentConfig cfg = parse_config(resolve_config(doc));
  ExperimentResult result = execute_experiment(cfg);
  std::string csv = rows_to_csv(result);
  std::istringstream is(csv);
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "config_digest,policy,sweep_param,sweep_value,rep,total_goodput,"
        "avg_backlog,utility,losses,trace_digest,goodput_flow_0");
  // Golden: lossless deterministic diamond run, 500 slots, warmup 50.
  std::string row;
  std::getline(is, row);
  CHECK(row.find(",dars,-,-,0,") != std::string::npos);
  CHECK(csv == rows_to_csv(execute_experiment(cfg)));  // byte-stable
}

TEST_CASE("dcc experiments run through the same front end") {
  ExperimentConfig cfg = parse_config(resolve_config(minimal_dcc()));
  ExperimentResult result = execute_experiment(cfg);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].policy == "dcc");
  CHECK(result.rows[0].per_flow.size() == 3);
  CHECK(result.per_flow_headers[0] == "admitted_dev_0");
}

TEST_CASE("config digest is stable and content-sensitive") {
  json a = resolve_config(minimal_dars());
  json b = resolve_config(minimal_dars());
  CHECK(config_digest_hex(a) == config_digest_hex(b));
  json c = minimal_dars();
  c["sim"]["seed"] = 99;
  CHECK(config_digest_hex(resolve_config(c)) != config_digest_hex(a));
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string temp_dir(const std::string& tag) {
  std::string dir =
      (std::filesystem::temp_directory_path() / ("d2dsim_test_" + tag)).string();
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli run: bundled diamond config gives one row and echoes config") {
  CliOptions opts;
  opts.config_path = std::string(D2DSIM_CONFIG_DIR) + "/diamond_dars.json";
  opts.out_dir = temp_dir("run");
  REQUIRE(cmd_run(opts) == 0);

  std::string csv = slurp(opts.out_dir + "/results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + 1 row
  json echoed = json::parse(slurp(opts.out_dir + "/resolved_config.json"));
  CHECK(echoed["policy"]["M"] == 200.0);
  CHECK(resolve_config(echoed) == echoed);
}

TEST_CASE("cli run: repeated overridden runs are byte-identical") {
  CliOptions opts;
  opts.config_path = std::string(D2DSIM_CONFIG_DIR) + "/diamond_dars_lossy.json";
  opts.overrides = {"sim.seed=7"};
  opts.out_dir = temp_dir("ov1");
  REQUIRE(cmd_run(opts) == 0);
  std::string first = slurp(opts.out_dir + "/results.csv");

  opts.out_dir = temp_dir("ov2");
  REQUIRE(cmd_run(opts) == 0);
  CHECK(first == slurp(opts.out_dir + "/results.csv"));
}

TEST_CASE("cli run: malformed config exits nonzero") {
  std::string dir = temp_dir("bad");
  {
    std::ofstream out(dir + "/bad.json");
    out << R"({"model": "dars", "topologee": {}})";
  }
  CliOptions opts;
  opts.config_path = dir + "/bad.json";
  opts.out_dir = dir;
  CHECK(cmd_run(opts) == 1);

  opts.config_path = dir + "/missing.json";
  CHECK(cmd_run(opts) == 1);
}

TEST_CASE("cli run: trace files are written per replication") {
  CliOptions opts;
  opts.config_path = std::string(D2DSIM_CONFIG_DIR) + "/diamond_dars.json";
  opts.out_dir = temp_dir("trace");
  opts.overrides = {"sim.slots=100", "sim.warmup=10"};
  opts.trace = true;
  REQUIRE(cmd_run(opts) == 0);
  std::string trace = slurp(opts.out_dir + "/trace_rep0.jsonl");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 100);
  json first = json::parse(trace.substr(0, trace.find('\n')));
  CHECK(first["slot"] == 0);
  CHECK(first.contains("activations"));
}

TEST_CASE("cli sweep: flag-driven sweep over wildcard paths") {
  CliOptions opts;
  opts.config_path = std::string(D2DSIM_CONFIG_DIR) + "/diamond_dars.json";
  opts.out_dir = temp_dir("sweep");
  opts.sweep_param = "topology.links.*.loss_p";
  opts.sweep_values = {0.0, 0.2, 0.4};
  REQUIRE(cmd_sweep(opts) == 0);
  std::string csv = slurp(opts.out_dir + "/results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows

  opts.sweep_values = {};
  CHECK(cmd_sweep(opts) == 1);  // empty value list
}

TEST_CASE("golden csv: pinned sample stays byte-identical") {
  json doc = load_config_file(std::string(D2DSIM_CONFIG_DIR) + "/diamond_dars.json");
  doc["sim"]["slots"] = 500;
  doc["sim"]["warmup"] = 50;
  doc["sim"]["reps"] = 2;
  ExperimentConfig cfg = parse_config(resolve_config(doc));
  std::string csv = rows_to_csv(execute_experiment(cfg));
  CHECK(csv == slurp(std::string(D2DSIM_GOLDEN_DIR) + "/diamond_dars_500.csv"));
}
