#include "spca/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "spca/config.hpp"
#include "spca/counterexamples.hpp"
#include "spca/error.hpp"
#include "spca/experiments.hpp"
#include "spca/parallel.hpp"

namespace spca {

namespace {

using nlohmann::ordered_json;

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "spca_out";
  unsigned threads = 0;
};

/// Turns leftover "--key value", "--key=value" and "key=value" tokens into overrides.
std::vector<std::string> extra_overrides(const std::vector<std::string>& extras) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& t = extras[i];
    if (t.rfind("--", 0) == 0) {
      const std::string body = t.substr(2);
      if (body.find('=') != std::string::npos) {
        out.push_back(body);
      } else {
        if (i + 1 >= extras.size()) throw ParameterError("option '" + t + "' needs a value");
        out.push_back(body + "=" + extras[++i]);
      }
    } else if (t.find('=') != std::string::npos) {
      out.push_back(t);
    } else {
      throw ParameterError("unexpected argument '" + t + "'");
    }
  }
  return out;
}

Config resolve_config(const Invocation& inv) {
  Config cfg = inv.config_path.empty() ? Config{} : Config::load(inv.config_path);
  cfg.apply_overrides(inv.overrides);
  if (inv.seed) cfg.set("seed", std::to_string(*inv.seed));
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_outputs(const std::filesystem::path& dir, const std::string& subcommand, const Config& cfg,
                   const std::vector<Record>& recs, ordered_json extra) {
  write_csv((dir / "records.csv").string(), recs);
  write_text(dir / "manifest.txt", "# spca " + subcommand + "\n" + cfg.manifest());
  ordered_json summary;
  summary["subcommand"] = subcommand;
  summary["config_hash"] = cfg.hash();
  ordered_json totals;
  totals["records"] = recs.size();
  summary["totals"] = totals;
  for (auto& [k, v] : extra.items()) summary[k] = v;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

ordered_json certificates_json(const std::vector<Certificate>& certs) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : certs) {
    ordered_json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["bound"] = c.bound;
    j["pass"] = c.pass();
    j["informational"] = c.informational;
    arr.push_back(j);
  }
  return arr;
}

std::string report_text(const VerificationReport& rep) {
  std::ostringstream out;
  out << "family " << rep.family << (rep.pass() ? ": PASS" : ": FAIL") << "\n";
  for (const auto& [k, v] : rep.params) out << "  " << k << " = " << format_double(v) << "\n";
  if (!rep.error.empty()) out << "  error: " << rep.error << "\n";
  for (const auto& c : rep.certificates) out << "  " << c.describe() << "\n";
  for (const auto& f : rep.flags) out << "  flag: " << f << "\n";
  return out.str();
}

int cmd_verify(const Invocation& inv, const Config& cfg, const std::filesystem::path& dir) {
  const std::string family = cfg.get_string("family", "all");
  std::vector<VerificationReport> reps;
  if (family == "all") {
    reps = verify_all();
  } else if (family == "barrier") {
    reps.push_back(verify_barrier(
        build_deflation_barrier(cfg.get_index("d", 50), cfg.get_double("delta", 0.1), cfg.get_double("gamma", 0.2))));
  } else {
    const BuiltModel m = build_model(cfg);
    if (!m.counterexample) throw ParameterError("verify: family '" + family + "' has no certificates");
    reps.push_back(verify_instance(*m.counterexample));
  }
  std::string text;
  ordered_json arr = ordered_json::array();
  const VerificationReport* failed = nullptr;
  const Certificate* failed_cert = nullptr;
  for (const auto& r : reps) {
    text += report_text(r);
    ordered_json j;
    j["family"] = r.family;
    j["pass"] = r.pass();
    ordered_json params;
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["certificates"] = certificates_json(r.certificates);
    j["flags"] = r.flags;
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(j);
    if (!r.pass() && !failed) {
      failed = &r;
      for (const auto& c : r.certificates)
        if (!c.informational && !c.pass()) {
          failed_cert = &c;
          break;
        }
    }
  }
  std::cout << text;
  write_text(dir / "report.txt", text);
  write_outputs(dir, inv.subcommand, cfg, {}, ordered_json{{"reports", arr}});
  if (failed) {
    std::cerr << "spca: verification failed for family " << failed->family << ": "
              << (failed_cert ? failed_cert->describe() : failed->error) << "\n";
    return 2;
  }
  return 0;
}

int cmd_gen(const Invocation& inv, const Config& cfg, const std::filesystem::path& dir, const RunOptions& opt) {
  const BuiltModel m = build_model(cfg);
  CounterexampleInstance inst;
  if (m.counterexample) {
    inst = *m.counterexample;
  } else {
    inst.instance = m.instance;
    inst.family = m.family;
    inst.params = {{"d", static_cast<double>(m.instance.dim())},
                   {"s", static_cast<double>(m.instance.s)},
                   {"gamma", m.instance.gamma}};
  }
  write_instance((dir / "instance.spcx").string(), inst);
  ordered_json extra;
  extra["instance"] = "instance.spcx";
  if (cfg.has("n")) {
    const Dataset x = sample_gaussian(m.instance, cfg.get_index("n", 0), cfg.get_u64("seed", 1), opt.threads);
    write_dataset((dir / "dataset.bin").string(), x);
    extra["dataset"] = "dataset.bin";
  }
  Record r;
  r.algorithm = "top_eigenvector";
  r.family = m.family;
  r.d = m.instance.dim();
  r.s = m.instance.s;
  r.k = m.instance.components.size();
  r.gamma = m.instance.gamma;
  r.mode = "population";
  r.metric = "sin2";
  r.value = sin2_angle(top_eigenpair(m.instance.sigma).pair.vector, m.instance.v());
  r.flags = m.flags;
  write_outputs(dir, inv.subcommand, cfg, {r}, extra);
  return 0;
}

int cmd_experiment(const Invocation& inv, const Config& cfg, const std::filesystem::path& dir, const RunOptions& opt,
                   const std::string& fallback) {
  const std::string exp = inv.subcommand == "ablate" ? "ablation" : cfg.get_string("experiment", fallback);
  std::vector<Record> recs;
  ordered_json extra;
  extra["experiment"] = exp;
  if (exp == "recovery") {
    recs = run_recovery(cfg, opt);
  } else if (exp == "scaling") {
    ScalingResult res = run_scaling(cfg, opt);
    ordered_json pts = ordered_json::array();
    for (const auto& p : res.points) {
      ordered_json j;
      j["axis"] = p.axis;
      j["s"] = p.s;
      j["gamma"] = p.gamma;
      j["delta"] = p.delta;
      if (p.median) {
        j["median_n_scale"] = *p.median;
      } else {
        j["median_n_scale"] = "above-grid";
      }
      pts.push_back(j);
    }
    extra["points"] = pts;
    recs = std::move(res.records);
  } else if (exp == "runtime") {
    RuntimeResult res = run_runtime_accuracy(cfg, opt);
    extra["notes"] = res.notes;
    recs = std::move(res.records);
  } else if (exp == "counterexample") {
    recs = run_counterexample_sweep(cfg, opt);
  } else if (exp == "ablation") {
    recs = run_ablation(cfg, opt);
  } else {
    throw ParameterError("unknown experiment '" + exp + "' (recovery, scaling, runtime, counterexample, ablation)");
  }
  write_outputs(dir, inv.subcommand, cfg, recs, extra);
  return 0;
}

int cmd_text(const Invocation& inv, const Config& cfg, const std::filesystem::path& dir, const RunOptions& opt) {
  TextRunResult res = run_text(cfg, opt);
  std::string csv = "component,rank,word,weight\n";
  ordered_json comps = ordered_json::array();
  for (std::size_t c = 0; c < res.result.components.size(); ++c) {
    const auto& comp = res.result.components[c];
    ordered_json j;
    j["component"] = c + 1;
    j["nnz"] = comp.nnz;
    j["top_words"] = comp.words;
    comps.push_back(j);
    std::cout << "component " << c + 1 << ":";
    for (std::size_t w = 0; w < comp.words.size(); ++w) {
      csv += std::to_string(c + 1) + "," + std::to_string(w + 1) + "," + comp.words[w] + "," +
             format_double(comp.weights[w]) + "\n";
      std::cout << " " << comp.words[w];
    }
    std::cout << "\n";
  }
  write_text(dir / "topwords.csv", csv);
  write_outputs(dir, inv.subcommand, cfg, res.records, ordered_json{{"components", comps}});
  return 0;
}

int dispatch(const Invocation& inv) {
  const Config cfg = resolve_config(inv);
  const std::filesystem::path dir(inv.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + inv.out_dir + "': " + ec.message());
  RunOptions opt;
  opt.threads = resolve_threads(inv.threads);
  opt.timing = cfg.get_bool("timing", false);
  if (inv.subcommand == "verify") return cmd_verify(inv, cfg, dir);
  if (inv.subcommand == "gen") return cmd_gen(inv, cfg, dir, opt);
  if (inv.subcommand == "text") return cmd_text(inv, cfg, dir, opt);
  if (inv.subcommand == "run") return cmd_experiment(inv, cfg, dir, opt, "recovery");
  if (inv.subcommand == "sweep") return cmd_experiment(inv, cfg, dir, opt, "scaling");
  return cmd_experiment(inv, cfg, dir, opt, "ablation");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Sparse PCA lab: instance generation, experiments, counterexample verification"};
  app.require_subcommand(1);
  Invocation inv;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"gen", "Build an instance (and optionally a sampled dataset)"},
      {"run", "Run algorithms on one model (experiment=recovery by default)"},
      {"sweep", "Run a sweep (experiment=scaling|runtime|counterexample)"},
      {"ablate", "Full vs disjoint sample-splitting ablation"},
      {"text", "Sparse components of a bag-of-words corpus"},
      {"verify", "Check counterexample certificates (family=all by default)"}};
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->add_option("--config,-c", inv.config_path, "Config file (key = value lines)");
    sub->add_option("--seed", seed, "Base seed (overrides the config)");
    sub->add_option("--out,-o", inv.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", inv.threads, "Worker threads (default: SPCA_THREADS, then hardware count)");
    sub->add_option("--set", sets, "Config override key=value (repeatable)");
    sub->footer("Any config key can also be given as --key value or key=value.");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  try {
    for (CLI::App* sub : app.get_subcommands()) {
      inv.subcommand = sub->get_name();
      inv.overrides = sets;
      for (auto& o : extra_overrides(sub->remaining())) inv.overrides.push_back(std::move(o));
      if (sub->count("--seed") > 0) inv.seed = seed;
    }
    return dispatch(inv);
  } catch (const Error& e) {
    std::cerr << "spca: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "spca: internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace spca
