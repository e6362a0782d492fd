#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "perclab/cli.hpp"
#include "perclab/config.hpp"
#include "perclab/csv.hpp"
#include "perclab/manifest.hpp"
#include "perclab/metric.hpp"
#include "perclab/parallel.hpp"
#include "perclab/rng.hpp"

using namespace perclab;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory, removed on scope exit
struct Scratch {
  fs::path dir;
  Scratch() {
    std::string tmpl = (fs::temp_directory_path() / "perclab-test-XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    dir = tmpl;
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int cli(const std::string& args, const std::string& log = "/dev/null") {
  const std::string cmd = std::string(PERCLAB_CLI_PATH) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& text, bool data_only) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!data_only || (!line.empty() && line[0] != '#')) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parses comments, lists and points") {
  const auto c = Config::parse(
      "# header\n"
      "d = 3\n"
      "p = 0.7   # trailing comment\n"
      "\n"
      "n_grid = 10, 20,40\n"
      "x = 1,0,0; 0.5,0.5,0\n"
      "name = run one\n");
  CHECK(c.integer("d") == 3);
  CHECK(c.real("p") == 0.7);
  CHECK(c.integers("n_grid") == std::vector<std::int64_t>{10, 20, 40});
  const auto pts = c.real_points("x");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1] == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(c.text("name") == "run one");
  CHECK(c.integer("missing", 7) == 7);
  CHECK(Config::parse(c.canonical()).values() == c.values());
}

TEST_CASE("config errors name the problem") {
  CHECK_THROWS_AS(Config::parse("d = 2\nd = 3\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("bad key! = 1\n"), ConfigError);
  const auto c = Config::parse("d = two\np = 0.5x\nseed = -1\n");
  CHECK_THROWS_AS(c.integer("d"), ConfigError);
  CHECK_THROWS_AS(c.real("p"), ConfigError);
  CHECK_THROWS_AS(c.unsigned_integer("seed", 0), ConfigError);
  CHECK_THROWS_AS(c.text("absent"), ConfigError);
  CHECK_THROWS_AS(c.require_known({"d", "p"}), ConfigError);
  CHECK_NOTHROW(c.require_known({"d", "p", "seed"}));
  CHECK_THROWS_AS(Config::load("/nonexistent/perclab.cfg"), ConfigError);
}

TEST_CASE("config overrides replace earlier values") {
  auto c = Config::parse("p = 0.6\n");
  c.set_assignment("p=0.8");
  CHECK(c.real("p") == 0.8);
  CHECK_THROWS_AS(c.set_assignment("p"), ConfigError);
}

TEST_CASE("csv writer emits the schema line and checks row width") {
  std::ostringstream out;
  CsvWriter csv(out, "demo", {"a", "b"});
  csv.row({"1", format_real(0.1)});
  CHECK_THROWS_AS(csv.row({"1"}), std::logic_error);
  csv.mark_partial("stopped");
  CHECK(out.str() == "# perclab-schema demo v1\na,b\n1,0.1\n# partial: stopped\n");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_distance(kInfinity) == "inf");
  CHECK(format_coords({1, -2, 3}) == "1;-2;3");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("parallel results do not depend on the worker count") {
  const auto task = [](std::size_t i) { return mix64(i) % 1000; };
  const auto one = run_parallel<std::uint64_t>(5000, task, {1, {}});
  const auto four = run_parallel<std::uint64_t>(5000, task, {4, {}});
  CHECK_FALSE(one.partial);
  CHECK(one.results == four.results);
  CHECK(run_parallel<int>(0, [](std::size_t) { return 1; }).results.empty());
}

TEST_CASE("zero replicates give a header-only table") {
  std::ostringstream out;
  CsvWriter csv(out, "replicates", {"replicate", "value"});
  const auto r = run_parallel<int>(0, [](std::size_t) { return 1; });
  for (std::size_t i = 0; i < r.results.size(); ++i) csv.row({std::to_string(i), std::to_string(r.results[i])});
  CHECK(count_lines(out.str(), false) == 2);
  CHECK(count_lines(out.str(), true) == 1);
}

TEST_CASE("an injected failure flushes the completed prefix with a partial marker") {
  for (unsigned workers : {1u, 3u}) {
    const auto r = run_parallel<std::uint64_t>(10000, [](std::size_t i) { return mix64(i); }, {workers, 5000});
    CHECK(r.partial);
    REQUIRE(r.results.size() == 5000);
    CHECK(r.results[4999] == mix64(4999));
    std::ostringstream out;
    CsvWriter csv(out, "replicates", {"replicate", "value"});
    for (std::size_t i = 0; i < r.results.size(); ++i) csv.row({std::to_string(i), std::to_string(r.results[i])});
    if (r.partial) csv.mark_partial(r.error);
    const auto text = out.str();
    CHECK(count_lines(text, true) == 1 + 5000);
    CHECK(text.find("# partial: injected failure at task 5000") != std::string::npos);
  }
}

TEST_CASE("a task exception stops the run at the first failing index") {
  const auto r = run_parallel<int>(
      100, [](std::size_t i) -> int { return i == 17 ? throw std::runtime_error("boom") : static_cast<int>(i); },
      {2, {}});
  CHECK(r.partial);
  CHECK(r.results.size() == 17);
  CHECK(r.error == "boom");
}

TEST_CASE("git blob hashes match git") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("manifest round-trips") {
  Scratch tmp;
  ExperimentRecord rec;
  rec.command = "ball";
  rec.config = "d = 2\nout = x.csv\n";
  rec.id = experiment_id(rec.command, rec.config);
  rec.inputs.push_back({"sample", "s.bin", git_blob_sha1("abc")});
  rec.input_hash = combined_input_hash(rec.config, rec.inputs);
  rec.started = rec.finished = utc_timestamp();
  rec.outputs.push_back({"x.csv", git_blob_sha1("1\n"), 2});
  write_manifest(rec, tmp / "m.json");
  const auto back = read_manifest(tmp / "m.json");
  CHECK(back.id == rec.id);
  CHECK(back.config == rec.config);
  CHECK(back.inputs.size() == 1);
  CHECK(back.inputs[0].sha1 == rec.inputs[0].sha1);
  CHECK(back.outputs == rec.outputs);
  CHECK(experiment_id("ball", "d = 3\n") != rec.id);
  CHECK(manifest_path("out/rate.csv") == "out/rate.csv.manifest.json");
}

TEST_CASE("cli exit codes") {
  Scratch tmp;
  CHECK(cli("") == kExitUsage);
  CHECK(cli("no-such-command") == kExitUsage);
  CHECK(cli("--help") == kExitOk);
  CHECK(cli("ball --d 2 --L 4 --p 1.5 --out " + (tmp / "b.csv")) == kExitConfig);
  CHECK(cli("ball --d 2 --L 4 --p 0.7 --set colour=red --out " + (tmp / "b.csv")) == kExitConfig);
  CHECK(cli("estimate-mu --d 2 --p 0.3 --n-grid 5 --out " + (tmp / "m.csv")) == kExitConfig);
  CHECK(cli("ball --sample " + (tmp / "missing.bin") + " --out " + (tmp / "b.csv")) == kExitRuntime);
  CHECK(cli("estimate-rate --d 2 --p 0.7 --s 0.25 --n-grid 6 --replicates 200 --fail-at 50 --out " +
            (tmp / "r.csv")) == kExitRuntime);
  const auto partial = read_file(tmp / "r.csv");
  CHECK(partial.find("# partial:") != std::string::npos);
  CHECK(partial.find(",50,") != std::string::npos);
  CHECK(cli("ball --d 2 --L 4 --p 0.7 --out " + (tmp / "b.csv")) == kExitOk);
}

TEST_CASE("cli reads config files and lets flags override them") {
  Scratch tmp;
  {
    std::ofstream cfg(tmp / "run.cfg");
    cfg << "d = 2\np = 0.7\nn_grid = 8\nreplicates = 20\nseed = 4\n";
  }
  CHECK(cli("estimate-mu --config " + (tmp / "run.cfg") + " --out " + (tmp / "a.csv")) == kExitOk);
  CHECK(cli("estimate-mu --config " + (tmp / "run.cfg") + " --seed 4 --out " + (tmp / "b.csv")) == kExitOk);
  CHECK(cli("estimate-mu --config " + (tmp / "run.cfg") + " --set seed=5 --out " + (tmp / "c.csv")) == kExitOk);
  CHECK(read_file(tmp / "a.csv") == read_file(tmp / "b.csv"));
  CHECK(read_file(tmp / "a.csv") != read_file(tmp / "c.csv"));
}

TEST_CASE("cli output is deterministic and independent of the worker count") {
  Scratch tmp;
  const std::string common = "estimate-rate --d 2 --p 0.7 --s 0,0.25,0.5 --n-grid 6,12 --replicates 300 --seed 9";
  CHECK(cli(common + " --workers 1 --out " + (tmp / "w1.csv")) == kExitOk);
  CHECK(cli(common + " --workers 2 --out " + (tmp / "w2.csv")) == kExitOk);
  CHECK(cli(common + " --workers 1 --out " + (tmp / "again.csv")) == kExitOk);
  const auto a = read_file(tmp / "w1.csv");
  CHECK(a == read_file(tmp / "w2.csv"));
  CHECK(a == read_file(tmp / "again.csv"));
  CHECK(count_lines(a, true) == 1 + 6);
}

TEST_CASE("cli sample then ball equals the library computation") {
  Scratch tmp;
  REQUIRE(cli("sample --d 2 --L 6 --p 0.65 --seed 12 --out " + (tmp / "s.bin")) == kExitOk);
  REQUIRE(cli("ball --sample " + (tmp / "s.bin") + " --out " + (tmp / "ball.csv")) == kExitOk);
  const auto sample = sample_configuration(BoxSpec{2, 6, {}}, 0.65, 12);
  CHECK(load_sample(tmp / "s.bin").same_edges(sample));
  std::ostringstream want;
  write_distance_csv(want, grow_ball(sample, Point{0, 0}));
  CHECK(read_file(tmp / "ball.csv") == want.str());
}

TEST_CASE("replay reproduces outputs and detects changed inputs") {
  Scratch tmp;
  REQUIRE(cli("sample --d 2 --L 5 --p 0.7 --seed 2 --out " + (tmp / "s.bin")) == kExitOk);
  REQUIRE(cli("ball --sample " + (tmp / "s.bin") + " --out " + (tmp / "b.csv")) == kExitOk);
  const auto manifest = read_manifest(manifest_path(tmp / "b.csv"));
  REQUIRE(manifest.outputs.size() == 1);
  CHECK(manifest.outputs[0].sha1 == file_blob_sha1(tmp / "b.csv"));
  CHECK(cli("replay " + manifest_path(tmp / "b.csv")) == kExitOk);
  REQUIRE(cli("estimate-rate --d 2 --p 0.7 --s 0.25 --n-grid 6 --replicates 50 --out " + (tmp / "r.csv")) ==
          kExitOk);
  CHECK(cli("replay " + manifest_path(tmp / "r.csv")) == kExitOk);
  REQUIRE(cli("sample --d 2 --L 5 --p 0.7 --seed 3 --out " + (tmp / "s.bin")) == kExitOk);
  CHECK(cli("replay " + manifest_path(tmp / "b.csv")) == kExitRuntime);
}

TEST_CASE("cli lemma check writes one row per instance") {
  Scratch tmp;
  REQUIRE(cli("lemma-check --lemma dislines --instances 40 --seed 3 --out " + (tmp / "l.csv")) == kExitOk);
  const auto text = read_file(tmp / "l.csv");
  CHECK(text.rfind("# perclab-schema lemma_check v1\n", 0) == 0);
  CHECK(count_lines(text, true) == 1 + 40);
  CHECK(cli("lemma-check --lemma nonsense --instances 5 --out " + (tmp / "x.csv")) == kExitConfig);
}
