#include "perclab/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "perclab/config.hpp"
#include "perclab/csv.hpp"
#include "perclab/cutpoints.hpp"
#include "perclab/estimators.hpp"
#include "perclab/lattice.hpp"
#include "perclab/lemma_check.hpp"
#include "perclab/manifest.hpp"
#include "perclab/metric.hpp"
#include "perclab/renorm.hpp"

namespace perclab {

namespace {

namespace fs = std::filesystem;

// Outcome of a command body: complete, or partial output already flushed.
struct RunStatus {
  bool complete = true;
  std::string message;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<std::string> keys;
  std::vector<std::string> input_keys;   // keys naming files that are read
  std::vector<std::string> output_keys;  // keys naming files that are written; the first is "out"
  std::string default_out;
  std::function<RunStatus(const Config&)> run;
};

const std::vector<std::string> kSampleKeys{"sample", "d", "L", "p", "seed"};
const std::vector<std::string> kMcKeys{"seed", "replicates", "workers", "fail_at"};
const std::vector<std::string> kNormKeys{"mu_norm", "mu_scale"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

double probability(const Config& c) {
  const double p = c.real("p");
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("p must lie in (0, 1)");
  return p;
}

PercolationSample obtain_sample(const Config& c) {
  if (c.has("sample")) {
    for (const char* k : {"d", "L", "p"})
      if (c.has(k)) throw ConfigError(std::string("'") + k + "' conflicts with 'sample'");
    return load_sample(c.text("sample"));
  }
  const BoxSpec box{static_cast<int>(c.integer("d")), static_cast<int>(c.integer("L")), {}};
  box.validate();
  return sample_configuration(box, probability(c), c.unsigned_integer("seed", 1));
}

Point single_point(const Config& c, const std::string& key, int d, const Point& fallback) {
  if (!c.has(key)) return fallback;
  const auto pts = c.int_points(key);
  if (pts.size() != 1 || static_cast<int>(pts[0].size()) != d)
    throw ConfigError(key + ": expected one point with " + std::to_string(d) + " coordinates");
  return pts[0];
}

std::vector<double> single_direction(const Config& c, const std::string& key, int d) {
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;
  if (!c.has(key)) return e1;
  const auto pts = c.real_points(key);
  if (pts.size() != 1 || static_cast<int>(pts[0].size()) != d)
    throw ConfigError(key + ": expected one point with " + std::to_string(d) + " coordinates");
  return pts[0];
}

Norm make_norm(const Config& c) {
  const auto kind = c.text("mu_norm", "l1");
  const double scale = c.real("mu_scale", 1.0);
  if (!(scale > 0.0)) throw ConfigError("mu_scale must be positive");
  if (kind == "l1") return scaled_l1_norm(scale);
  if (kind == "l2") return scaled_l2_norm(scale);
  throw ConfigError("mu_norm: expected l1 or l2, got '" + kind + "'");
}

McOptions mc_options(const Config& c, std::uint64_t default_replicates) {
  McOptions mc;
  mc.seed = c.unsigned_integer("seed", 1);
  mc.replicates = c.unsigned_integer("replicates", default_replicates);
  mc.workers = static_cast<unsigned>(c.unsigned_integer("workers", 0));
  if (c.has("fail_at")) mc.fail_at = static_cast<std::size_t>(c.unsigned_integer("fail_at", 0));
  return mc;
}

RunStatus run_sample(const Config& c) {
  const BoxSpec box{static_cast<int>(c.integer("d")), static_cast<int>(c.integer("L")), {}};
  box.validate();
  save_sample(sample_configuration(box, probability(c), c.unsigned_integer("seed", 1)), c.text("out"));
  return {};
}

RunStatus run_ball(const Config& c) {
  const auto sample = obtain_sample(c);
  const int d = sample.box().dimension;
  const auto source = single_point(c, "source", d, Point(d, 0));
  std::optional<std::uint32_t> t_max;
  if (c.has("t_max")) t_max = static_cast<std::uint32_t>(c.unsigned_integer("t_max", 0));
  const auto ball = grow_ball(sample, source, t_max);
  write_file(c.text("out"), [&](std::ostream& out) { write_distance_csv(out, ball); });
  return {};
}

RunStatus run_cutpoint_scan(const Config& c) {
  const auto sample = obtain_sample(c);
  const int d = sample.box().dimension;
  const auto ball = grow_ball(sample, single_point(c, "source", d, Point(d, 0)));
  const auto last = static_cast<std::uint32_t>(ball.layer_count() - 1);
  const auto t_min = static_cast<std::uint32_t>(c.unsigned_integer("t_min", 1));
  const auto t_max = c.has("t_max") ? static_cast<std::uint32_t>(c.unsigned_integer("t_max", 0))
                                    : std::min(last, ball.certified_through());
  std::vector<CutPointRecord> cuts;
  if (t_min <= t_max) cuts = detect_cutpoints(ball, t_min, t_max);
  write_file(c.text("out"), [&](std::ostream& out) {
    CsvWriter csv(out, "cutpoints", {"time", "point", "volume"});
    for (const auto& r : cuts)
      csv.row({std::to_string(r.time), format_coords(ball.geometry().point(r.location)),
               std::to_string(ball.volume(r.time))});
  });
  std::cout << cuts.size() << " cut-points in [" << t_min << ", " << t_max << "]\n";
  return {};
}

MacroClassification classify_from(const PercolationSample& sample, const Config& c) {
  ClassifyOptions opt;
  opt.exact_pair_limit = c.unsigned_integer("exact_pair_limit", opt.exact_pair_limit);
  opt.sampled_sources = c.unsigned_integer("sampled_sources", opt.sampled_sources);
  opt.workers = static_cast<unsigned>(c.unsigned_integer("workers", 0));
  return classify_boxes(sample, static_cast<int>(c.integer("N")), c.real("epsilon"), make_norm(c), opt);
}

RunStatus run_classify(const Config& c) {
  const auto sample = obtain_sample(c);
  const auto cls = classify_from(sample, c);
  write_file(c.text("out"), [&](std::ostream& out) { write_classification_csv(out, cls); });
  if (c.has("clusters_out"))
    write_file(c.text("clusters_out"), [&](std::ostream& out) { write_bad_clusters_csv(out, bad_clusters(cls)); });
  std::cout << cls.count(Verdict::good) << " good, " << cls.count(Verdict::bad) << " bad, "
            << cls.count(Verdict::unclassifiable) << " unclassifiable\n";
  return {};
}

RunStatus run_route(const Config& c) {
  const auto sample = obtain_sample(c);
  const int d = sample.box().dimension;
  const auto cls = classify_from(sample, c);
  const auto macro_path = c.int_points("macro_path");
  for (const auto& s : macro_path)
    if (static_cast<int>(s.size()) != d) throw ConfigError("macro_path: site has the wrong dimension");
  const auto& g = sample.geometry();
  if (!c.has("x") || !c.has("y")) throw ConfigError("route needs both 'x' and 'y'");
  const auto x = single_point(c, "x", d, {});
  const auto y = single_point(c, "y", d, {});
  if (!g.contains(x) || !g.contains(y)) throw ConfigError("x and y must lie in the sample box");
  const auto route = route_through_good(sample, cls, macro_path, g.vertex(x), g.vertex(y));
  write_file(c.text("out"), [&](std::ostream& out) {
    CsvWriter csv(out, "route", {"step", "point", "length", "bound", "within_bound"});
    for (std::size_t i = 0; i < route.path.size(); ++i)
      csv.row({std::to_string(i), format_coords(g.point(route.path[i])), std::to_string(route.length()),
               format_real(route.bound), route.within_bound() ? "1" : "0"});
  });
  fmt::print("route length {}, bound {:.6g}\n", route.length(), route.bound);
  return {};
}

RunStatus run_slab(const Config& c) {
  SlabComparisonConfig cfg;
  cfg.d = static_cast<int>(c.integer("d", 3));
  cfg.p = c.real("p");
  cfg.slab.epsilon = c.real("epsilon", cfg.slab.epsilon);
  cfg.slab.xi = c.real("xi", cfg.slab.xi);
  cfg.slab.N = static_cast<int>(c.integer("N", cfg.slab.N));
  cfg.slab.n = static_cast<int>(c.integer("n", cfg.slab.n));
  cfg.slab.mu_hat = c.real("mu_hat", cfg.slab.mu_hat);
  if (c.has("rho")) cfg.slab.rho = static_cast<int>(c.integer("rho"));
  cfg.mc = mc_options(c, 100);
  const auto result = slab_vs_point_experiment(cfg);
  write_file(c.text("out"), [&](std::ostream& out) { write_slab_comparison_csv(out, cfg, result); });
  std::cout << "verdict: " << result.verdict << "\n";
  return {};
}

RunStatus run_lemma_check_command(const Config& c) {
  LemmaCheckOptions opt;
  opt.dimension = static_cast<int>(c.integer("d", 0));
  opt.workers = static_cast<unsigned>(c.unsigned_integer("workers", 0));
  const auto lemma = c.text("lemma");
  const auto rows = run_lemma_check(lemma, c.unsigned_integer("instances", 100), c.unsigned_integer("seed", 1), opt);
  write_file(c.text("out"), [&](std::ostream& out) { write_lemma_csv(out, rows); });
  const auto passed = std::count_if(rows.begin(), rows.end(), [](const LemmaRow& r) { return r.pass; });
  std::cout << lemma << ": " << passed << "/" << rows.size() << " instances pass\n";
  return {};
}

RunStatus run_estimate_mu(const Config& c) {
  MuConfig cfg;
  cfg.d = static_cast<int>(c.integer("d"));
  cfg.p = c.real("p");
  cfg.x = single_direction(c, "x", cfg.d);
  cfg.n_grid = c.integers("n_grid");
  cfg.box_factor = c.real("box_factor", cfg.box_factor);
  cfg.mc = mc_options(c, 100);
  const auto est = estimate_mu(cfg);
  write_file(c.text("out"), [&](std::ostream& out) { write_mu_csv(out, est); });
  fmt::print("mu_hat = {:.6g} (se {:.3g}, n = {})\n", est.mu_hat, est.mu_se, est.n_used);
  for (const auto& w : est.warnings) std::cerr << "warning: " << w << "\n";
  if (est.partial) return {false, "estimate-mu stopped early; partial table written"};
  return {};
}

RunStatus run_estimate_rate(const Config& c) {
  RateConfig cfg;
  cfg.kind = parse_event_kind(c.text("event", "A"));
  cfg.d = static_cast<int>(c.integer("d"));
  cfg.p = c.real("p");
  const bool tail = cfg.kind == EventKind::upper_tail;
  if (c.has(tail ? "s" : "xi"))
    throw ConfigError(tail ? "the upper tail takes 'xi', not 's'" : "cut-point events take 's', not 'xi'");
  cfg.levels = c.reals(tail ? "xi" : "s");
  if (c.has("x")) cfg.xs = c.real_points("x");
  cfg.n_grid = c.integers("n_grid");
  cfg.alpha = c.optional_real("alpha");
  cfg.K = c.real("K", cfg.K);
  cfg.mu_hat = c.real("mu_hat", cfg.mu_hat);
  cfg.box_factor = c.real("box_factor", cfg.box_factor);
  cfg.mc = mc_options(c, 1000);
  const auto surface = estimate_event_rate(cfg);
  write_file(c.text("out"), [&](std::ostream& out) { write_rate_csv(out, surface); });
  if (c.has("subadditivity_out"))
    write_file(c.text("subadditivity_out"), [&](std::ostream& out) { write_subadditivity_csv(out, surface); });
  if (surface.partial) return {false, "estimate-rate stopped early: " + surface.error};
  return {};
}

RunStatus run_estimate_j(const Config& c) {
  std::ifstream in(c.text("rates"), std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + c.text("rates") + "'");
  const auto estimates = read_rate_csv(in);
  if (estimates.empty()) throw std::invalid_argument("rate table has no rows");
  std::int64_t n = 0;
  for (const auto& e : estimates) n = std::max(n, e.n);
  n = c.integer("n", n);
  const auto surface = surface_from_rates(estimates, n);
  if (surface.empty()) throw ConfigError("rate table has no rows with n = " + std::to_string(n));
  const int d = static_cast<int>(surface.front().y.size());
  const auto x = single_direction(c, "x", d);
  const auto mu = make_norm(c);
  const double rel = c.real("mu_rel_error", 0.0);
  std::vector<JRow> rows;
  for (double xi : c.has("xi") ? c.reals("xi") : std::vector<double>{0.0})
    rows.push_back({xi, estimate_J(surface, x, xi, mu, rel)});
  write_file(c.text("out"), [&](std::ostream& out) { write_j_csv(out, rows); });
  return {};
}

RunStatus run_upper_tail(const Config& c) {
  UpperTailCutConfig cfg;
  cfg.d = static_cast<int>(c.integer("d"));
  cfg.p = c.real("p");
  cfg.xi = c.real("xi", cfg.xi);
  cfg.s = c.real("s", cfg.s);
  cfg.mu_hat = c.real("mu_hat", cfg.mu_hat);
  cfg.n_grid = c.integers("n_grid");
  cfg.box_factor = c.real("box_factor", cfg.box_factor);
  cfg.mc = mc_options(c, 1000);
  const auto rows = upper_tail_vs_cutpoint_experiment(cfg);
  write_file(c.text("out"), [&](std::ostream& out) { write_upper_tail_cut_csv(out, rows); });
  return {};
}

const std::vector<Command>& commands() {
  static const std::vector<Command> list{
      {"sample", "sample a bond configuration and save it", {"d", "L", "p", "seed"}, {}, {"out"}, "sample.bin",
       run_sample},
      {"ball", "chemical distances from a source", join({kSampleKeys, {"source", "t_max"}}), {"sample"}, {"out"},
       "ball.csv", run_ball},
      {"cutpoint-scan", "single-vertex layers of the ball around a source",
       join({kSampleKeys, {"source", "t_min", "t_max"}}), {"sample"}, {"out"}, "cutpoints.csv", run_cutpoint_scan},
      {"classify", "good/bad classification of macroscopic boxes",
       join({kSampleKeys, kNormKeys, {"N", "epsilon", "exact_pair_limit", "sampled_sources", "workers"}}),
       {"sample"}, {"out", "clusters_out"}, "classification.csv", run_classify},
      {"route", "open path through a chain of good boxes",
       join({kSampleKeys, kNormKeys,
             {"N", "epsilon", "exact_pair_limit", "sampled_sources", "workers", "macro_path", "x", "y"}}),
       {"sample"}, {"out"}, "route.csv", run_route},
      {"slab", "box-to-box slab distance versus point-to-point upper tail",
       join({kMcKeys, {"d", "p", "epsilon", "xi", "N", "n", "mu_hat", "rho"}}), {}, {"out"}, "slab.csv", run_slab},
      {"lemma-check", "verify combinatorial lemmas on random instances",
       {"lemma", "instances", "seed", "d", "workers"}, {}, {"out"}, "lemma_check.csv", run_lemma_check_command},
      {"estimate-mu", "time constant estimate", join({kMcKeys, {"d", "p", "x", "n_grid", "box_factor"}}), {},
       {"out"}, "mu.csv", run_estimate_mu},
      {"estimate-rate", "event probabilities and empirical rates",
       join({kMcKeys, {"event", "d", "p", "s", "xi", "x", "n_grid", "alpha", "K", "mu_hat", "box_factor"}}), {},
       {"out", "subadditivity_out"}, "rate.csv", run_estimate_rate},
      {"estimate-j", "grid infimum of the rate surface over the upper-tail constraint",
       join({kNormKeys, {"rates", "n", "x", "xi", "mu_rel_error"}}), {"rates"}, {"out"}, "j.csv", run_estimate_j},
      {"upper-tail", "upper-tail event versus late cut-points",
       join({kMcKeys, {"d", "p", "xi", "s", "mu_hat", "n_grid", "box_factor"}}), {}, {"out"}, "upper_tail.csv",
       run_upper_tail},
  };
  return list;
}

const Command& find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw std::logic_error("no command " + name);
}

std::set<std::string> known_keys(const Command& cmd) {
  std::set<std::string> k(cmd.keys.begin(), cmd.keys.end());
  k.insert(cmd.input_keys.begin(), cmd.input_keys.end());
  k.insert(cmd.output_keys.begin(), cmd.output_keys.end());
  return k;
}

// Runs the command and writes its manifest next to the main output.
int execute(const Command& cmd, Config config, ExperimentRecord* record_out = nullptr) {
  config.require_known(known_keys(cmd));
  if (!config.has("out")) config.set("out", cmd.default_out);
  ExperimentRecord rec;
  rec.command = cmd.name;
  rec.config = config.canonical();
  rec.id = experiment_id(rec.command, rec.config);
  for (const auto& k : cmd.input_keys)
    if (config.has(k)) rec.inputs.push_back({k, config.text(k), file_blob_sha1(config.text(k))});
  rec.input_hash = combined_input_hash(rec.config, rec.inputs);
  rec.started = utc_timestamp();
  const auto status = cmd.run(config);
  rec.finished = utc_timestamp();
  for (const auto& k : cmd.output_keys)
    if (config.has(k)) rec.outputs.push_back(describe_output(config.text(k)));
  write_manifest(rec, manifest_path(config.text("out")));
  if (record_out) *record_out = rec;
  if (!status.complete) {
    std::cerr << "error: " << status.message << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int replay(const std::string& manifest, bool keep) {
  const auto rec = read_manifest(manifest);
  const auto& cmd = find_command(rec.command);
  auto config = Config::parse(rec.config, manifest + ":config");
  for (const auto& in : rec.inputs) {
    const auto now = file_blob_sha1(in.path);
    if (now != in.sha1) {
      std::cerr << "error: input '" << in.path << "' changed since the recorded run\n";
      return kExitRuntime;
    }
  }
  std::string tmpl = (fs::temp_directory_path() / "perclab-replay-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("cannot create a temporary directory");
  const fs::path dir(tmpl);
  std::size_t i = 0;
  for (const auto& k : cmd.output_keys)
    if (config.has(k))
      config.set(k, (dir / (std::to_string(i++) + "_" + fs::path(config.text(k)).filename().string())).string());
  ExperimentRecord rerun;
  const int status = execute(cmd, config, &rerun);
  int mismatches = 0;
  if (rerun.outputs.size() != rec.outputs.size()) {
    std::cerr << "error: replay produced " << rerun.outputs.size() << " outputs, manifest lists "
              << rec.outputs.size() << "\n";
    ++mismatches;
  } else {
    for (std::size_t k = 0; k < rec.outputs.size(); ++k) {
      const bool same = rec.outputs[k].sha1 == rerun.outputs[k].sha1;
      std::cout << (same ? "identical " : "DIFFERS   ") << rec.outputs[k].path << " " << rec.outputs[k].sha1 << "\n";
      if (!same) ++mismatches;
    }
  }
  if (keep)
    std::cout << "replay outputs kept in " << dir.string() << "\n";
  else
    fs::remove_all(dir);
  if (status != kExitOk) return status;
  return mismatches ? kExitRuntime : kExitOk;
}

std::string option_names(const std::string& key) {
  std::string names = "--" + key;
  if (key.find('_') != std::string::npos) {
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    names += ",--" + dashed;
  }
  return names;
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"perclab: supercritical bond percolation laboratory"};
  app.name("perclab");
  app.require_subcommand(1);

  struct Slot {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
  };
  std::map<std::string, Slot> slots;
  for (const auto& cmd : commands()) {
    auto& slot = slots[cmd.name];
    slot.sub = app.add_subcommand(cmd.name, cmd.description);
    slot.sub->add_option("--config", slot.config_path, "config file (key = value lines)");
    slot.sub->add_option("--set", slot.sets, "override, key=value (repeatable)");
    for (const auto& key : known_keys(cmd)) slot.sub->add_option(option_names(key), slot.flags[key]);
  }
  std::string manifest;
  bool keep = false;
  auto* rp = app.add_subcommand("replay", "rerun a recorded experiment and compare output hashes");
  rp->add_option("manifest", manifest, "manifest written by an earlier run")->required();
  rp->add_flag("--keep", keep, "keep the replayed outputs");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rp->parsed()) return replay(manifest, keep);
    for (const auto& cmd : commands()) {
      auto& slot = slots[cmd.name];
      if (!slot.sub->parsed()) continue;
      Config config = slot.config_path.empty() ? Config{} : Config::load(slot.config_path);
      for (const auto& key : known_keys(cmd))
        if (slot.sub->count("--" + key)) config.set(key, slot.flags[key]);
      for (const auto& s : slot.sets) config.set_assignment(s);
      return execute(cmd, config);
    }
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : commands()) n.push_back(c.name);
    n.push_back("replay");
    return n;
  }();
  return names;
}

int cli_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(std::move(args));
}

int cli_dispatch(const std::vector<std::string>& args) { return dispatch(args); }

}  // namespace perclab
