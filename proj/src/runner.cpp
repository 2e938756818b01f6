#include "d2dsim/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace d2dsim {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

void set_path_rec(json& node, const std::vector<std::string>& parts, size_t i,
                  const json& value) {
  const std::string& key = parts[i];
  bool last = i + 1 == parts.size();
  if (key == "*") {
    if (!node.is_array())
      throw std::invalid_argument("config path: '*' applied to a non-array");
    for (json& elem : node) {
      if (last) elem = value;
      else set_path_rec(elem, parts, i + 1, value);
    }
    return;
  }
  if (node.is_array()) {
    size_t idx = std::stoul(key);
    if (idx >= node.size())
      throw std::invalid_argument("config path: index " + key + " out of range");
    if (last) node[idx] = value;
    else set_path_rec(node[idx], parts, i + 1, value);
    return;
  }
  if (!node.is_object())
    throw std::invalid_argument("config path: '" + key + "' into a scalar");
  if (!node.contains(key))
    throw std::invalid_argument("config path: unknown key '" + key + "'");
  if (last) node[key] = value;
  else set_path_rec(node[key], parts, i + 1, value);
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + where + "." +
                                  it.key() + "'");
  }
}

double need_number(const json& obj, const std::string& where,
                   const std::string& key) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw std::invalid_argument("config: '" + where + "." + key +
                                "' must be a number");
  return obj[key].get<double>();
}

json utility_defaults(const json& in, const std::string& where) {
  json u = json::object();
  if (!in.is_object())
    throw std::invalid_argument("config: '" + where + "' must be an object");
  check_keys(in, where, {"kind", "weight", "alpha"});
  u["kind"] = in.value("kind", "log1p");
  if (u["kind"] != "log1p" && u["kind"] != "alpha_fair")
    throw std::invalid_argument("config: '" + where + ".kind' must be log1p or alpha_fair");
  u["weight"] = in.value("weight", 1.0);
  u["alpha"] = in.value("alpha", 2.0);
  return u;
}

json arrival_defaults(const json& in, const std::string& where) {
  json a = json::object();
  check_keys(in, where, {"kind", "mean", "batch"});
  a["kind"] = in.value("kind", "deterministic");
  std::string kind = a["kind"];
  if (kind != "deterministic" && kind != "poisson" && kind != "bernoulli_batch")
    throw std::invalid_argument("config: '" + where + ".kind' unknown arrival kind");
  a["mean"] = need_number(in, where, "mean");
  a["batch"] = in.value("batch", 1);
  if (kind == "bernoulli_batch") {
    double mean = a["mean"], batch = a["batch"];
    if (batch < 1 || mean / batch > 1.0)
      throw std::invalid_argument("config: '" + where +
                                  "' bernoulli_batch needs mean/batch <= 1");
  }
  return a;
}

UtilitySpec parse_utility(const json& u) {
  UtilitySpec spec;
  spec.kind = u["kind"] == "log1p" ? UtilityKind::Log1p : UtilityKind::AlphaFair;
  spec.weight = u["weight"];
  spec.alpha = u["alpha"];
  return spec;
}

ArrivalProcess parse_arrival(const json& a) {
  ArrivalProcess p;
  std::string kind = a["kind"];
  p.kind = kind == "poisson" ? ArrivalKind::Poisson
           : kind == "bernoulli_batch" ? ArrivalKind::BernoulliBatch
                                       : ArrivalKind::Deterministic;
  p.mean = a["mean"];
  p.batch = a["batch"].get<std::uint64_t>();
  return p;
}

}  // namespace

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return doc;
}

void apply_override(json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key.path=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // plain string
  }
  set_json_path(doc, path, value);
}

void set_json_path(json& doc, const std::string& path, const json& value) {
  set_path_rec(doc, split_path(path), 0, value);
}

json resolve_config(const json& raw) {
  if (!raw.is_object()) throw std::invalid_argument("config: root must be an object");
  check_keys(raw, "", {"model", "topology", "flows", "policy", "sim", "sweep", "dcc"});
  json out = json::object();
  out["model"] = raw.value("model", "dars");
  if (out["model"] != "dars" && out["model"] != "dcc")
    throw std::invalid_argument("config: 'model' must be dars or dcc");

  // sim section is shared.
  json sim_in = raw.value("sim", json::object());
  check_keys(sim_in, "sim",
             {"slots", "warmup", "seed", "reps", "loss_mode", "interference"});
  json sim = json::object();
  sim["slots"] = sim_in.value("slots", 10000);
  sim["warmup"] = sim_in.contains("warmup")
                      ? sim_in["warmup"]
                      : json(sim["slots"].get<std::uint64_t>() / 10);
  sim["seed"] = sim_in.value("seed", 1);
  sim["reps"] = sim_in.value("reps", 1);
  sim["loss_mode"] = sim_in.value("loss_mode", "stochastic");
  if (sim["loss_mode"] != "stochastic" && sim["loss_mode"] != "fluid_expectation")
    throw std::invalid_argument("config: 'sim.loss_mode' unknown");
  sim["interference"] = sim_in.value("interference", "node_exclusive");
  interference_from_string(sim["interference"]);  // validates
  out["sim"] = sim;

  if (out["model"] == "dars") {
    if (!raw.contains("topology"))
      throw std::invalid_argument("config: missing 'topology' section");
    const json& topo_in = raw["topology"];
    check_keys(topo_in, "topology", {"nodes", "links", "profiles"});
    json topo = json::object();
    topo["nodes"] = static_cast<int>(need_number(topo_in, "topology", "nodes"));
    json links = json::array();
    if (!topo_in.contains("links") || !topo_in["links"].is_array())
      throw std::invalid_argument("config: 'topology.links' must be an array");
    for (size_t i = 0; i < topo_in["links"].size(); ++i) {
      const json& l = topo_in["links"][i];
      std::string where = "topology.links." + std::to_string(i);
      check_keys(l, where, {"src", "dst", "rate", "loss_p"});
      json out_l = json::object();
      out_l["src"] = static_cast<int>(need_number(l, where, "src"));
      out_l["dst"] = static_cast<int>(need_number(l, where, "dst"));
      out_l["rate"] = l.value("rate", 1.0);
      out_l["loss_p"] = l.value("loss_p", 0.0);
      links.push_back(out_l);
    }
    topo["links"] = links;
    json profiles = json::array();
    if (topo_in.contains("profiles")) {
      for (size_t i = 0; i < topo_in["profiles"].size(); ++i) {
        const json& p = topo_in["profiles"][i];
        std::string where = "topology.profiles." + std::to_string(i);
        check_keys(p, where, {"compute", "energy", "incentive"});
        json out_p = json::object();
        out_p["compute"] = p.value("compute", 1.0);
        out_p["energy"] = p.value("energy", 1.0);
        out_p["incentive"] = p.value("incentive", 1.0);
        profiles.push_back(out_p);
      }
    }
    while (profiles.size() < topo["nodes"].get<size_t>()) {
      json p = json::object();
      p["compute"] = 1.0;
      p["energy"] = 1.0;
      p["incentive"] = 1.0;
      profiles.push_back(p);
    }
    topo["profiles"] = profiles;
    out["topology"] = topo;

    if (!raw.contains("flows") || !raw["flows"].is_array() || raw["flows"].empty())
      throw std::invalid_argument("config: 'flows' must be a nonempty array");
    json flows = json::array();
    for (size_t i = 0; i < raw["flows"].size(); ++i) {
      const json& f = raw["flows"][i];
      std::string where = "flows." + std::to_string(i);
      check_keys(f, where, {"source", "dest", "utility"});
      json out_f = json::object();
      out_f["source"] = static_cast<int>(need_number(f, where, "source"));
      out_f["dest"] = static_cast<int>(need_number(f, where, "dest"));
      out_f["utility"] =
          utility_defaults(f.value("utility", json::object()), where + ".utility");
      flows.push_back(out_f);
    }
    out["flows"] = flows;

    json pol_in = raw.value("policy", json::object());
    check_keys(pol_in, "policy", {"name", "M", "R_max", "F_max"});
    json pol = json::object();
    pol["name"] = pol_in.value("name", "dars");
    policy_from_string(pol["name"]);  // validates
    pol["M"] = pol_in.value("M", 200.0);
    pol["R_max"] = pol_in.value("R_max", 1.0);
    pol["F_max"] = pol_in.value("F_max", 1.0);
    out["policy"] = pol;
  } else {
    if (!raw.contains("dcc"))
      throw std::invalid_argument("config: model dcc needs a 'dcc' section");
    const json& d_in = raw["dcc"];
    check_keys(d_in, "dcc",
               {"devices", "mode", "arrival_mode", "M", "beta", "R_k_max",
                "arrivals", "utilities", "local_links", "hyperedges"});
    json d = json::object();
    d["devices"] = static_cast<int>(need_number(d_in, "dcc", "devices"));
    d["mode"] = d_in.value("mode", "unicast");
    dcc_mode_from_string(d["mode"]);
    d["arrival_mode"] = d_in.value("arrival_mode", "exogenous");
    dcc_arrival_mode_from_string(d["arrival_mode"]);
    d["M"] = d_in.value("M", 200.0);
    d["beta"] = d_in.value("beta", 0.05);
    d["R_k_max"] = d_in.value("R_k_max", 1.0);
    json arrivals = json::array();
    if (d_in.contains("arrivals")) {
      for (size_t i = 0; i < d_in["arrivals"].size(); ++i)
        arrivals.push_back(arrival_defaults(d_in["arrivals"][i],
                                            "dcc.arrivals." + std::to_string(i)));
    }
    d["arrivals"] = arrivals;
    json utilities = json::array();
    if (d_in.contains("utilities")) {
      for (size_t i = 0; i < d_in["utilities"].size(); ++i)
        utilities.push_back(utility_defaults(
            d_in["utilities"][i], "dcc.utilities." + std::to_string(i)));
    }
    while (utilities.size() < d["devices"].get<size_t>())
      utilities.push_back(utility_defaults(json::object(), "dcc.utilities"));
    d["utilities"] = utilities;
    d["local_links"] = d_in.value("local_links", json::array());
    json hyper = json::array();
    if (d_in.contains("hyperedges")) {
      for (size_t i = 0; i < d_in["hyperedges"].size(); ++i) {
        const json& h = d_in["hyperedges"][i];
        std::string where = "dcc.hyperedges." + std::to_string(i);
        check_keys(h, where, {"sender", "receivers"});
        json out_h = json::object();
        out_h["sender"] = static_cast<int>(need_number(h, where, "sender"));
        if (!h.contains("receivers") || !h["receivers"].is_array() ||
            h["receivers"].empty())
          throw std::invalid_argument("config: '" + where +
                                      ".receivers' must be a nonempty array");
        out_h["receivers"] = h["receivers"];
        hyper.push_back(out_h);
      }
    }
    d["hyperedges"] = hyper;
    out["dcc"] = d;
  }

  if (raw.contains("sweep")) {
    const json& s = raw["sweep"];
    check_keys(s, "sweep", {"param", "values"});
    if (!s.contains("param") || !s["param"].is_string())
      throw std::invalid_argument("config: 'sweep.param' must be a string");
    if (!s.contains("values") || !s["values"].is_array() || s["values"].empty())
      throw std::invalid_argument("config: 'sweep.values' must be a nonempty array");
    json sweep = json::object();
    sweep["param"] = s["param"];
    sweep["values"] = s["values"];
    out["sweep"] = sweep;
  }
  return out;
}

ExperimentConfig parse_config(const json& resolved) {
  ExperimentConfig cfg;
  cfg.resolved = resolved;
  cfg.model = resolved["model"];
  const json& sim = resolved["sim"];
  cfg.reps = sim["reps"];
  if (cfg.reps < 1) throw std::invalid_argument("config: 'sim.reps' must be >= 1");

  if (cfg.model == "dars") {
    const json& topo = resolved["topology"];
    cfg.sim.topology.n_nodes = topo["nodes"];
    for (const json& l : topo["links"])
      cfg.sim.topology.links.push_back({l["src"], l["dst"], l["rate"], l["loss_p"]});
    for (const json& p : topo["profiles"])
      cfg.sim.profiles.push_back({p["compute"], p["energy"], p["incentive"]});
    int fid = 0;
    for (const json& f : resolved["flows"]) {
      FlowSpec spec;
      spec.id = fid++;
      spec.source = f["source"];
      spec.dest = f["dest"];
      spec.utility = parse_utility(f["utility"]);
      cfg.sim.flows.push_back(spec);
    }
    const json& pol = resolved["policy"];
    cfg.sim.policy = policy_from_string(pol["name"]);
    cfg.sim.params = {pol["M"], pol["R_max"], pol["F_max"]};
    cfg.sim.loss_mode = sim["loss_mode"] == "stochastic"
                            ? LossMode::Stochastic
                            : LossMode::FluidExpectation;
    cfg.sim.interference = interference_from_string(sim["interference"]);
    cfg.sim.horizon = sim["slots"].get<std::uint64_t>();
    cfg.sim.warmup = sim["warmup"].get<std::uint64_t>();
    cfg.sim.seed = sim["seed"].get<std::uint64_t>();
  } else {
    const json& d = resolved["dcc"];
    cfg.dcc.topology.n_devices = d["devices"];
    for (const json& l : d["local_links"])
      cfg.dcc.topology.local_links.emplace_back(l[0].get<int>(), l[1].get<int>());
    for (const json& h : d["hyperedges"]) {
      Hyperedge he;
      he.sender = h["sender"];
      for (const json& r : h["receivers"]) he.receivers.push_back(r.get<int>());
      std::sort(he.receivers.begin(), he.receivers.end());
      cfg.dcc.topology.hyperedges.push_back(he);
    }
    cfg.dcc.params.big_m = d["M"];
    cfg.dcc.params.beta = d["beta"];
    cfg.dcc.params.r_k_max = d["R_k_max"];
    cfg.dcc.params.mode = dcc_mode_from_string(d["mode"]);
    cfg.dcc.params.arrival_mode = dcc_arrival_mode_from_string(d["arrival_mode"]);
    for (const json& a : d["arrivals"]) cfg.dcc.arrivals.push_back(parse_arrival(a));
    for (const json& u : d["utilities"]) cfg.dcc.utilities.push_back(parse_utility(u));
    cfg.dcc.horizon = sim["slots"].get<std::uint64_t>();
    cfg.dcc.warmup = sim["warmup"].get<std::uint64_t>();
    cfg.dcc.seed = sim["seed"].get<std::uint64_t>();
  }

  if (resolved.contains("sweep")) {
    SweepSpec s;
    s.param = resolved["sweep"]["param"];
    for (const json& v : resolved["sweep"]["values"]) s.values.push_back(v.get<double>());
    cfg.sweep = s;
  }
  return cfg;
}

std::string config_digest_hex(const json& resolved) {
  std::string dump = resolved.dump();
  Fnv1a h;
  for (char c : dump) h.mix(static_cast<unsigned char>(c));
  std::ostringstream os;
  os << std::hex << h.state;
  return os.str();
}

std::uint64_t combined_digest(const std::vector<std::uint64_t>& digests) {
  Fnv1a h;
  h.mix(digests.size());
  for (std::uint64_t d : digests) h.mix(d);
  return h.state;
}

namespace {

std::vector<ResultRow> run_point(const ExperimentConfig& cfg,
                                 const std::string& digest,
                                 const std::string& sweep_param,
                                 double sweep_value, bool has_sweep,
                                 bool parallel) {
  std::vector<ResultRow> rows;
  if (cfg.model == "dars") {
    ReplicationResult reps = run_replications(cfg.sim, cfg.reps, parallel);
    for (int r = 0; r < cfg.reps; ++r) {
      const Metrics& m = reps.metrics[r];
      ResultRow row;
      row.config_digest = digest;
      row.policy = to_string(cfg.sim.policy);
      row.sweep_param = has_sweep ? sweep_param : "-";
      row.sweep_value = sweep_value;
      row.has_sweep = has_sweep;
      row.rep = r;
      row.total_goodput = m.total_goodput;
      row.avg_backlog = m.avg_backlog;
      row.utility = m.utility;
      row.losses = m.lost_total;
      row.per_flow = m.goodput;
      row.trace_digest = reps.digests[r];
      rows.push_back(std::move(row));
    }
  } else {
    for (int r = 0; r < cfg.reps; ++r) {
      DccRunConfig c = cfg.dcc;
      c.stream = static_cast<std::uint64_t>(r);
      DccReport rep = dcc_run_check(c);
      ResultRow row;
      row.config_digest = digest;
      row.policy = "dcc";
      row.sweep_param = has_sweep ? sweep_param : "-";
      row.sweep_value = sweep_value;
      row.has_sweep = has_sweep;
      row.rep = r;
      double total = 0.0;
      for (double v : rep.avg_admitted) total += v;
      row.total_goodput = total;
      row.avg_backlog = rep.avg_total_backlog;
      row.utility = rep.avg_utility;
      row.losses = 0;
      row.per_flow = rep.avg_admitted;
      row.trace_digest = rep.digest;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace

ExperimentResult execute_experiment(const ExperimentConfig& config,
                                    bool parallel) {
  ExperimentResult result;
  int n_per_flow = config.model == "dars"
                       ? static_cast<int>(config.sim.flows.size())
                       : config.dcc.topology.n_devices;
  for (int i = 0; i < n_per_flow; ++i)
    result.per_flow_headers.push_back(
        (config.model == "dars" ? "goodput_flow_" : "admitted_dev_") +
        std::to_string(i));

  if (!config.sweep) {
    std::string digest = config_digest_hex(config.resolved);
    result.rows = run_point(config, digest, "-", 0.0, false, parallel);
    return result;
  }

  const SweepSpec& sweep = *config.sweep;
  for (double v : sweep.values) {
    json doc = config.resolved;
    set_json_path(doc, sweep.param, v);
    ExperimentConfig point = parse_config(doc);
    std::string digest = config_digest_hex(doc);
    std::vector<ResultRow> rows =
        run_point(point, digest, sweep.param, v, true, parallel);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string rows_to_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "config_digest,policy,sweep_param,sweep_value,rep,total_goodput,"
        "avg_backlog,utility,losses,trace_digest";
  for (const std::string& h : result.per_flow_headers) os << "," << h;
  os << "\n";
  for (const ResultRow& r : result.rows) {
    os << r.config_digest << "," << r.policy << "," << r.sweep_param << ","
       << (r.has_sweep ? fmt_double(r.sweep_value) : "-") << "," << r.rep << ","
       << fmt_double(r.total_goodput) << "," << fmt_double(r.avg_backlog) << ","
       << fmt_double(r.utility) << "," << r.losses << "," << std::hex
       << r.trace_digest << std::dec;
    for (double v : r.per_flow) os << "," << fmt_double(v);
    os << "\n";
  }
  return os.str();
}

namespace {

std::string out_dir_or_default(const CliOptions& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  const char* env = std::getenv("D2DSIM_OUT");
  return env ? env : ".";
}

ExperimentConfig load_and_parse(const CliOptions& opts, json& resolved_out) {
  // Overrides address the resolved document, so default-valued keys are
  // valid targets; a second resolve re-validates what they changed.
  json doc = resolve_config(load_config_file(opts.config_path));
  for (const std::string& ov : opts.overrides) apply_override(doc, ov);
  resolved_out = resolve_config(doc);
  return parse_config(resolved_out);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_outputs(const CliOptions& opts, const json& resolved,
                   const ExperimentResult& result) {
  std::string dir = out_dir_or_default(opts);
  std::filesystem::create_directories(dir);
  write_file(dir + "/resolved_config.json", resolved.dump(2) + "\n");
  write_file(dir + "/results.csv", rows_to_csv(result));
}

json trace_record_json(const TraceRecord& r) {
  json rec;
  rec["slot"] = r.slot;
  rec["admitted"] = r.admitted;
  json acts = json::array();
  for (const Activation& a : r.activations)
    acts.push_back(json::array({a.src, a.dst, a.flow}));
  rec["activations"] = acts;
  rec["delivered"] = r.delivered;
  rec["backlog"] = r.total_backlog;
  return rec;
}

}  // namespace

int cmd_run(const CliOptions& opts) {
  try {
    json resolved;
    ExperimentConfig cfg = load_and_parse(opts, resolved);
    ExperimentResult result = execute_experiment(cfg, opts.parallel);
    write_outputs(opts, resolved, result);

    if (opts.trace && cfg.model == "dars") {
      std::string dir = out_dir_or_default(opts);
      for (int r = 0; r < cfg.reps; ++r) {
        SimConfig c = cfg.sim;
        c.stream = static_cast<std::uint64_t>(r);
        RunResult run = run_simulation(c);
        std::ostringstream os;
        for (const TraceRecord& rec : run.trace.records)
          os << trace_record_json(rec).dump() << "\n";
        write_file(dir + "/trace_rep" + std::to_string(r) + ".jsonl", os.str());
      }
    }

    std::vector<std::uint64_t> digests;
    for (const ResultRow& r : result.rows) digests.push_back(r.trace_digest);
    std::cout << "config_digest=" << config_digest_hex(resolved) << "\n"
              << "rows=" << result.rows.size() << "\n"
              << "combined_trace_digest=" << std::hex
              << combined_digest(digests) << std::dec << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(const CliOptions& opts) {
  try {
    json doc = resolve_config(load_config_file(opts.config_path));
    for (const std::string& ov : opts.overrides) apply_override(doc, ov);
    json resolved = resolve_config(doc);
    ExperimentConfig cfg = parse_config(resolved);
    if (!opts.sweep_param.empty()) {
      SweepSpec s;
      s.param = opts.sweep_param;
      s.values = opts.sweep_values;
      if (s.values.empty())
        throw std::invalid_argument("sweep: empty value list");
      cfg.sweep = s;
      resolved["sweep"] = {{"param", s.param}, {"values", s.values}};
      cfg.resolved = resolved;
    }
    if (!cfg.sweep) throw std::invalid_argument("sweep: no sweep spec given");
    ExperimentResult result = execute_experiment(cfg, opts.parallel);
    write_outputs(opts, resolved, result);
    std::cout << "rows=" << result.rows.size() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_oracle(const CliOptions& opts) {
  try {
    json resolved;
    ExperimentConfig cfg = load_and_parse(opts, resolved);
    if (opts.oracle_what == "static") {
      if (cfg.model != "dars")
        throw std::invalid_argument("oracle static needs a dars config");
      StaticOptimum opt = static_optimum(cfg.sim.topology, cfg.sim.profiles,
                                         cfg.sim.flows, cfg.sim.interference);
      for (size_t s = 0; s < opt.x.size(); ++s)
        std::cout << "x_" << s << "=" << opt.x[s] << "\n";
      std::cout << "value=" << opt.value << "\n"
                << "activation_sets=" << opt.n_activation_sets << "\n"
                << "converged=" << (opt.converged ? 1 : 0) << "\n";
      return 0;
    }
    if (opts.oracle_what == "region") {
      if (cfg.model != "dcc")
        throw std::invalid_argument("oracle region needs a dcc config");
      RegionSpec region;
      region.mode = cfg.dcc.params.mode == DccMode::Broadcast
                        ? RegionMode::DccBroadcast
                        : RegionMode::DccUnicast;
      region.n_devices = cfg.dcc.topology.n_devices;
      region.hyperedges = cfg.dcc.topology.hyperedges;
      std::vector<double> rates = opts.oracle_rates;
      if (rates.empty())
        for (const ArrivalProcess& a : cfg.dcc.arrivals) rates.push_back(a.mean);
      if (static_cast<int>(rates.size()) != region.n_devices)
        throw std::invalid_argument(
            "oracle region: need one rate per device (config arrivals or --rates)");
      RegionResult res = region_membership(region, rates);
      const char* names[] = {"interior", "boundary", "exterior"};
      std::cout << "membership=" << names[static_cast<int>(res.membership)]
                << "\n"
                << "margin=" << res.margin << "\n";
      return 0;
    }
    if (opts.oracle_what == "sets") {
      if (cfg.model != "dars")
        throw std::invalid_argument("oracle sets needs a dars config");
      auto sets = enumerate_activation_sets(cfg.sim.topology, cfg.sim.flows,
                                            cfg.sim.interference);
      std::cout << "feasible_sets=" << sets.size() << "\n";
      for (const auto& set : sets) {
        for (const Activation& a : set)
          std::cout << "(" << a.src << "," << a.dst << ",f" << a.flow << ")";
        std::cout << "\n";
      }
      return 0;
    }
    throw std::invalid_argument("oracle: unknown subcommand '" +
                                opts.oracle_what + "'");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace d2dsim
