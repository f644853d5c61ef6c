#include "mixvol/app.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace mixvol;
using mixvol::app::json;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Proc cli(const std::string& args) {
  const std::string cmd = std::string(MIXVOL_CLI_PATH) + " " + args + " 2>/dev/null";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
  const int st = pclose(f);
  p.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return p;
}

std::string data(const std::string& name) { return std::string(MIXVOL_TEST_DATA) + "/" + name; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mixvol_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, OracleSquareDiamond) {
  const Proc p = cli("mixed-volume --method oracle -i " + data("square.json") + " -i " + data("diamond.json"));
  ASSERT_EQ(p.code, 0) << p.out;
  const json r = json::parse(p.out);
  EXPECT_EQ(r["schema"], 1);
  EXPECT_NEAR(r["value"].get<double>(), 2.0, 1e-12);
  EXPECT_TRUE(r["pass"].get<bool>());
  EXPECT_EQ(r["bodies"][0], "Q");
}

TEST(Cli, GeneratorsAndRoutes) {
  const Proc s = cli("mixed-volume --method schneider --gen square --gen diamond --seed 3");
  ASSERT_EQ(s.code, 0);
  EXPECT_NEAR(json::parse(s.out)["value"].get<double>(), 2.0, 1e-9);
  const Proc seg = cli("mixed-volume -i " + data("segments.json") + " --method schneider --seed 1");
  ASSERT_EQ(seg.code, 0);
  EXPECT_NEAR(json::parse(seg.out)["value"].get<double>(), 0.5, 1e-9);
  const Proc a = cli("mixed-volume --method angle --dim 3 --gen cube --gen \"random-rotation 5 cube\" --degrees 1,2 "
                     "--seed 2 --samples 5000");
  ASSERT_EQ(a.code, 0) << a.out;
  const json r = json::parse(a.out);
  EXPECT_GT(r["std_error"].get<double>(), 0.0);
  EXPECT_TRUE(r["checks"]["oracle"].contains("z"));
  const Proc e = cli("mixed-volume --method epsilon --eps 0.8 --gen square --gen diamond --seed 1");
  ASSERT_EQ(e.code, 0);
  EXPECT_LE(json::parse(e.out)["value"].get<double>(), 2.0 + 1e-9);
}

TEST(Cli, KernelEval) {
  const Proc p = cli("kernel-eval --u \"1,0;0,1\" --u \"1,0;-1,0\"");
  ASSERT_EQ(p.code, 0);
  std::istringstream in(p.out);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "u,value,error");
  const auto value = [](const std::string& row) {
    const auto q = row.rfind('"');
    const auto c = row.find(',', q + 2);
    return std::stod(row.substr(q + 2, c - q - 2));
  };
  EXPECT_NEAR(value(row1), 0.25, 1e-12);
  EXPECT_NEAR(value(row2), 1 / (2 * std::numbers::pi), 1e-12);
  // coincident directions at ε = 0 are reported, not fatal
  const Proc g = cli("kernel-eval --mode r --u \"1,0;0,1\" --u \"1,0;1,0\"");
  ASSERT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("0.25"), std::string::npos);
}

TEST(Cli, FlagCheck) {
  const Proc p = cli("flag-check --gen square --gen diamond --seed 4 --samples 20000");
  ASSERT_EQ(p.code, 0) << p.out;
  const json r = json::parse(p.out);
  EXPECT_NEAR(r["value"].get<double>(), 2.0, 4 * r["std_error"].get<double>());
  ASSERT_EQ(r["dmatrices"].size(), 1u);
  EXPECT_TRUE(r["dmatrices"][0]["exact"].get<bool>());

  const Proc f = cli("flag-check --mode r --degrees 1,1 --gen square --gen diamond --seed 4 --samples 20000");
  ASSERT_EQ(f.code, 0);
  EXPECT_NEAR(json::parse(f.out)["checks"]["reference"]["reference"].get<double>(), 4.0, 1e-8);
}

TEST(Cli, DMatrixCacheFile) {
  const auto path = temp_file("dm.json");
  std::filesystem::remove(path);
  const std::string args = "flag-check --lemma 3 --dim 3 --degrees 1,2 --trials 3 --samples 5000 --seed 5 "
                           "--estimate-dmatrix --dmatrix-budget 50000 --dmatrix-cache " +
                           path.string();
  const Proc a = cli(args);
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_TRUE(std::filesystem::exists(path));
  std::ifstream in(path);
  const json c = json::parse(in);
  EXPECT_EQ(c["schema"], 1);
  ASSERT_FALSE(c["matrices"].empty());
  const auto& m = c["matrices"][0];
  for (const char* key : {"d", "j", "entries", "sigma", "seed", "samples"}) EXPECT_TRUE(m.contains(key)) << key;
  // the second run reads the cache and reproduces the report
  const Proc b = cli(args);
  EXPECT_EQ(a.out, b.out);
  const json r = json::parse(a.out);
  EXPECT_FALSE(r["dmatrices"][0]["exact"].get<bool>());
  std::filesystem::remove(path);
}

TEST(Cli, Translative) {
  const Proc p = cli("translative --gen square --gen diamond --j 0 --seed 6 --samples 200000");
  ASSERT_EQ(p.code, 0);
  const json r = json::parse(p.out);
  EXPECT_NEAR(r["value"].get<double>(), 7.0, 4 * r["std_error"].get<double>());
  EXPECT_NEAR(r["exact"]["total"].get<double>(), 7.0, 1e-8);
  const Proc d = cli("translative --gen square --gen square --j 1 --decompose --seed 6 --samples 100000");
  ASSERT_EQ(d.code, 0);
  const json t = json::parse(d.out)["table"];
  EXPECT_EQ(t["entries"].size(), 2u);
  for (const auto& e : t["entries"]) EXPECT_NEAR(e["value"].get<double>(), 2.0, 4 * e["std_error"].get<double>());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("mixed-volume -i " + data("malformed.json")).code, 2);
  EXPECT_EQ(cli("mixed-volume -i " + data("no_vertices.json")).code, 2);
  EXPECT_EQ(cli("mixed-volume -i /nonexistent.json").code, 2);
  EXPECT_EQ(cli("mixed-volume --gen square --gen diamond --method angle").code, 2);  // no seed
  EXPECT_EQ(cli("mixed-volume --gen square --gen diamond --degrees 1,2").code, 2);
  EXPECT_EQ(cli("mixed-volume --gen blob").code, 2);
  EXPECT_EQ(cli("no-such-command").code, 2);
  EXPECT_EQ(cli("translative --gen square --gen square --j 2 --seed 1").code, 2);
  // parallel squares are not in general position
  EXPECT_EQ(cli("flag-check --gen square --gen square --seed 1 --samples 100").code, 3);
  EXPECT_EQ(cli("flag-check --lemma 3 --dim 3 --degrees 1,2 --seed 1 --estimate-dmatrix --dmatrix-budget 2").code, 2);
  // D-matrix design rejected as ill-conditioned
  EXPECT_EQ(cli("flag-check --lemma 3 --dim 3 --degrees 1,2 --seed 1 --trials 1 --samples 100 --estimate-dmatrix "
                "--dmatrix-budget 1000 --tol dmatrix_condition=1")
                .code,
            4);
  // the cutoff route is checked one-sided, so z=0 still passes
  EXPECT_EQ(cli("mixed-volume --method epsilon --eps 0.8 --gen square --gen diamond --seed 1 --tol z=0").code, 0);
  // a two-sided check that cannot meet z=0
  EXPECT_EQ(cli("flag-check --gen square --gen diamond --seed 4 --samples 2000 --tol z=0").code, 1);
}

TEST(Cli, ByteReproducible) {
  for (const std::string args :
       {"flag-check --gen square --gen diamond --seed 11 --samples 5000",
        "translative --gen square --gen diamond --decompose --seed 11 --samples 20000",
        "mixed-volume --method angle --dim 3 --gen cube --gen \"random-rotation 2 simplex\" --degrees 2,1 --seed 11 "
        "--samples 2000",
        "kernel-eval --random 10 --dim 3 --degrees 1,2 --seed 11"}) {
    const Proc a = cli(args), b = cli(args), c = cli("--threads 1 " + args);
    ASSERT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_EQ(a.out, c.out) << args;
  }
}

TEST(Cli, OutputFile) {
  const auto path = temp_file("report.json");
  const Proc p = cli("mixed-volume --gen square --gen diamond -o " + path.string());
  ASSERT_EQ(p.code, 0);
  EXPECT_TRUE(p.out.empty());
  std::ifstream in(path);
  EXPECT_NEAR(json::parse(in)["value"].get<double>(), 2.0, 1e-12);
  std::filesystem::remove(path);
}

TEST(Cli, VerifyQuick) {
  const Proc p = cli("verify --suite quick --seed 7");
  ASSERT_EQ(p.code, 0) << p.out;
  const json r = json::parse(p.out);
  EXPECT_EQ(r["criteria"].size(), 11u);
  EXPECT_TRUE(r["pass"].get<bool>());
}

TEST(AppIo, PolytopeRoundTrip) {
  Rng rng(1);
  Polytope p = unit_simplex(3).transformed(random_rotation(rng, 3));
  p.set_name("t");
  const Polytope q = app::polytope_from_json(app::polytope_to_json(p));
  EXPECT_EQ(q.name(), "t");
  EXPECT_NEAR(q.volume(), p.volume(), 1e-14);
  EXPECT_EQ(q.vertices().size(), 4u);
}

TEST(AppIo, Parsers) {
  EXPECT_EQ(app::parse_int_list("1,2,0"), (std::vector<int>{1, 2, 0}));
  EXPECT_THROW(app::parse_int_list("1,x"), InputError);
  const auto u = app::parse_direction_tuple("2,0;0,-3");
  EXPECT_NEAR(u[1][1], -1.0, 1e-15);
  EXPECT_THROW(app::parse_direction_tuple("1,0"), InputError);
  EXPECT_THROW(app::parse_direction_tuple("1,0;0,0"), InputError);
  EXPECT_THROW(app::generate("random-rotation", 2), InputError);
  EXPECT_EQ(app::generate("random-rotation 3 diamond", 2).vertices().size(), 4u);
  EXPECT_EQ(app::generate("segment 1", 2).dim(), 1);
}
