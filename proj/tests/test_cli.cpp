#include "cli_runner.hpp"

#include "erasure/dataio.hpp"
#include "erasure/linalg.hpp"

#include <doctest.h>
#include <cmath>
#include <nlohmann/json.hpp>

using namespace erasure;
using erasure::test::CliSandbox;
using nlohmann::json;

namespace {

const std::vector<std::string> kRlaceShort = {"--outer-loops", "1500", "--eval-every", "500"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void make_fixture(const CliSandbox& box, const std::string& kind, const std::string& out, const std::string& n = "1000",
                  const std::string& dim = "20", const std::string& draw = "0") {
  const auto r =
      box.run({"synth", "--kind", kind, "--n", n, "--dim", dim, "--seed", "7", "--draw", draw, "--out", out});
  REQUIRE(r.exit_code == 0);
}

json error_json(const std::string& err) { return json::parse(err.substr(0, err.find('\n'))); }

}  // namespace

TEST_CASE("synth output is byte-identical across runs") {
  CliSandbox box("synth");
  make_fixture(box, "planted-1d", "a");
  make_fixture(box, "planted-1d", "b");
  for (const char* f : {"vectors.txt", "labels.txt", "planted.csv"}) CHECK(box.read(std::string("a/") + f) == box.read(std::string("b/") + f));
  const auto m = json::parse(box.read("a/manifest.json"));
  CHECK(m["command"] == "synth");
  CHECK(m["config"]["kind"] == "planted-1d");
  CHECK(m["outputs"].contains("vectors.txt"));
  CHECK(std::filesystem::exists(box.path("a/manifest.json")));
}

TEST_CASE("erase rlace writes a valid projection and is deterministic") {
  CliSandbox box("erase");
  make_fixture(box, "planted-1d", "fx", "4000", "10");
  const auto args = concat({"erase", "--method", "rlace", "--rank", "1", "--vectors", "fx/vectors.txt", "--labels",
                            "fx/labels.txt", "--seed", "3"},
                           kRlaceShort);
  REQUIRE(box.run(concat(args, {"--out", "e1"})).exit_code == 0);
  REQUIRE(box.run(concat(args, {"--out", "e2"})).exit_code == 0);
  CHECK(box.read("e1/projection.json") == box.read("e2/projection.json"));
  CHECK(box.read("e1/fit.json") == box.read("e2/fit.json"));

  const auto proj = load_projection(box.path("e1/projection.json"));
  CHECK(proj.rank_removed() == 1);
  CHECK(proj.dim() == 10);
  CHECK(is_orthogonal_projection(proj.matrix(), 1e-8).ok);
  CHECK(proj.seed() == std::optional<std::uint64_t>(3));

  SUBCASE("probe accuracy drops to chance after erasure") {
    // Scored on an independent draw: a split of the rows the eraser was fit
    // on would see the in-sample class means cancel and score below chance.
    make_fixture(box, "planted-1d", "held", "4000", "10", "1");
    const std::vector<std::string> base = {"eval",          "--vectors",      "fx/vectors.txt",    "--labels",
                                           "fx/labels.txt", "--test-vectors", "held/vectors.txt",  "--test-labels",
                                           "held/labels.txt", "--probe"};
    REQUIRE(box.run(concat(base, {"--out", "v0"})).exit_code == 0);
    REQUIRE(box.run(concat(base, {"--projection", "e1/projection.json", "--out", "v1"})).exit_code == 0);
    const auto before = json::parse(box.read("v0/report.json"))["probe"];
    const auto after = json::parse(box.read("v1/report.json"))["probe"];
    CHECK(before["accuracy"].get<double>() >= 0.95);
    CHECK(std::abs(after["accuracy"].get<double>() - after["majority"].get<double>()) <= 0.05);
  }

  SUBCASE("apply matches the library pipeline") {
    REQUIRE(box.run({"apply", "--projection", "e1/projection.json", "--vectors", "fx/vectors.txt", "--out", "a"})
                .exit_code == 0);
    const auto applied = parse_vectors_text(box.read("a/vectors.txt"));
    const auto raw = load_vectors_text(box.path("fx/vectors.txt"));
    CHECK((applied.x - apply_pipeline(raw.x, proj)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(applied.ids == raw.ids);
  }
}

TEST_CASE("usage errors exit with code 2 and a JSON message") {
  CliSandbox box("usage");
  make_fixture(box, "planted-1d", "fx", "200", "6");
  const std::vector<std::string> data = {"--vectors", "fx/vectors.txt", "--labels", "fx/labels.txt", "--out", "o"};

  auto r = box.run(concat({"erase", "--method", "rlace", "--rank", "0"}, data));
  CHECK(r.exit_code == 2);
  auto e = error_json(r.err);
  CHECK(e["error_kind"] == "usage");
  CHECK(e["message"] == "rank must be ≥ 1");
  CHECK(e["module"] == "cli");

  r = box.run(concat({"erase", "--method", "regression", "--rank", "1"}, data));
  CHECK(r.exit_code == 2);
  CHECK(error_json(r.err)["message"].get<std::string>().find("requires a regression task") != std::string::npos);

  r = box.run({"erase", "--no-such-flag"});
  CHECK(r.exit_code == 2);
  CHECK(error_json(r.err)["error_kind"] == "usage");

  r = box.run({"synth", "--kind", "spiral", "--out", "s"});
  CHECK(r.exit_code == 2);
}

TEST_CASE("runtime errors exit with code 1") {
  CliSandbox box("runtime");
  const auto r = box.run({"apply", "--projection", "missing.json", "--vectors", "missing.txt", "--out", "o"});
  CHECK(r.exit_code == 1);
  const auto e = error_json(r.err);
  CHECK(e.contains("error_kind"));
  CHECK(e.contains("module"));
}

TEST_CASE("flags override the config file and print-config shows defaults") {
  CliSandbox box("config");
  box.write("run.cfg", "# comment\nmethod = pls\nrank = 3\nlr = 0.1\n");
  auto r = box.run({"erase", "--config", "run.cfg", "--rank", "2", "--print-config"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("method = pls\n") != std::string::npos);
  CHECK(r.out.find("rank = 2\n") != std::string::npos);
  CHECK(r.out.find("lr = 0.1\n") != std::string::npos);
  CHECK(r.out.find("eraser-lr = 0.005\n") != std::string::npos);
  CHECK(r.out.find("outer-loops = 10000\n") != std::string::npos);

  box.write("bad.cfg", "rnak = 3\n");
  r = box.run({"erase", "--config", "bad.cfg", "--print-config"});
  CHECK(r.exit_code == 2);
}

TEST_CASE("manifest digests track input content") {
  CliSandbox box("digest");
  make_fixture(box, "planted-1d", "fx", "200", "6");
  const std::vector<std::string> cmd = {"erase", "--method", "pls", "--rank", "1", "--vectors", "fx/vectors.txt",
                                        "--labels", "fx/labels.txt"};
  REQUIRE(box.run(concat(cmd, {"--out", "m1"})).exit_code == 0);
  REQUIRE(box.run(concat(cmd, {"--out", "m2"})).exit_code == 0);
  const auto d1 = json::parse(box.read("m1/manifest.json"))["inputs"];
  const auto d2 = json::parse(box.read("m2/manifest.json"))["inputs"];
  CHECK(d1["vectors"]["fnv1a64"] == d2["vectors"]["fnv1a64"]);
  CHECK(d1["labels"]["fnv1a64"] == d2["labels"]["fnv1a64"]);

  box.write("fx/labels.txt", box.read("fx/labels.txt") + "\n");
  REQUIRE(box.run(concat(cmd, {"--out", "m3"})).exit_code == 0);
  const auto d3 = json::parse(box.read("m3/manifest.json"))["inputs"];
  CHECK(d3["vectors"]["fnv1a64"] == d1["vectors"]["fnv1a64"]);
  CHECK(d3["labels"]["fnv1a64"] != d1["labels"]["fnv1a64"]);
}

TEST_CASE("eval metrics on constructed fixtures") {
  CliSandbox box("metrics");
  make_fixture(box, "blobs", "blobs", "200", "5");

  SUBCASE("perfectly separated blobs give V-measure 1") {
    const auto r = box.run({"eval", "--vectors", "blobs/vectors.txt", "--labels", "blobs/labels.txt", "--vmeasure",
                            "--clusters", "2", "--out", "v"});
    REQUIRE(r.exit_code == 0);
    const auto rep = json::parse(box.read("v/report.json"));
    CHECK(rep["vmeasure"][0]["v_measure"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(box.read("v/vmeasure.csv").rfind("clusters,v,", 0) == 0);
  }

  SUBCASE("WEAT with identical target sets has d = 0") {
    box.write("weat.json", R"({"X": ["r0", "r1", "r2"], "Y": ["r0", "r1", "r2"], "A": ["r3", "r4"], "B": ["r5", "r6"]})");
    const auto r = box.run({"eval", "--vectors", "blobs/vectors.txt", "--weat", "weat.json", "--out", "w"});
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(box.read("w/report.json"))["weat"]["d"].get<double>() == 0.0);
  }

  SUBCASE("similarity pairs and TPR gap") {
    std::string groups;
    for (int i = 0; i < 200; ++i) groups += "r" + std::to_string(i) + " " + std::to_string(i % 2) + "\n";
    box.write("groups.txt", groups);
    box.write("pairs.csv", "id1,id2,score\nr0,r1,1\nr2,r3,2\nr4,r5,3\nr6,r7,4\n");
    // class 1: group 0 TPR 1/2, group 1 TPR 1; class 0: both 1.
    box.write("pred.csv", "id,y_true,y_pred\nr0,1,1\nr1,1,1\nr2,1,0\nr3,1,1\nr4,0,0\nr5,0,0\n");
    const auto r = box.run({"eval", "--vectors", "blobs/vectors.txt", "--labels", "groups.txt", "--simpairs",
                            "pairs.csv", "--tpr-gap", "pred.csv", "--out", "t"});
    REQUIRE(r.exit_code == 0);
    const auto rep = json::parse(box.read("t/report.json"));
    CHECK(rep["simpairs"]["pairs"] == 4);
    CHECK(rep["tpr_gap"]["rms"].get<double>() == doctest::Approx(std::sqrt(0.125)).epsilon(1e-12));
    CHECK(box.read("t/tpr_gap.csv") ==
          "class,share,positives_z0,tpr_z0,positives_z1,tpr_z1,gap\n0,0.5,1,1,1,1,0\n1,0.5,2,0.5,2,1,0.5\n");
  }
}

TEST_CASE("eval rank sweep is deterministic and independent of --jobs") {
  CliSandbox box("sweep");
  make_fixture(box, "multi-separable", "fx", "600", "8");
  const auto base = concat({"eval", "--vectors", "fx/vectors.txt", "--labels", "fx/labels.txt", "--sweep-rank", "1..3",
                            "--method", "rlace", "--outer-loops", "300", "--eval-every", "100"},
                           {});
  REQUIRE(box.run(concat(base, {"--jobs", "1", "--out", "s1"})).exit_code == 0);
  REQUIRE(box.run(concat(base, {"--jobs", "3", "--out", "s2"})).exit_code == 0);
  CHECK(box.read("s1/report.json") == box.read("s2/report.json"));
  CHECK(box.read("s1/sweep.csv") == box.read("s2/sweep.csv"));

  REQUIRE(box.run({"eval", "--vectors", "fx/vectors.txt", "--labels", "fx/labels.txt", "--sweep-rank", "1..3",
                   "--method", "inlp", "--out", "s3"})
              .exit_code == 0);
  const auto rep = json::parse(box.read("s3/report.json"));
  CHECK(rep["sweep"]["points"].size() == 3);
}
