#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = GEOBOUND_CLI;
const std::string kConfigs = GEOBOUND_CONFIGS;
const std::string kTmp = GEOBOUND_TMP;

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write(const std::string& name, const std::string& text) {
  const std::string path = kTmp + "/" + name;
  std::ofstream(path) << text;
  return path;
}

const char* kSmallMc =
    "family = pareto\nalpha = 2.2\np = 0.5\nengine = mc\nmc.samples = 20000\nseed = 3\n"
    "mc.step = 1\nB = 20\nh.gamma = 1/3.2\ng.exponent = 0.6875\n";

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("bound --config " + kConfigs + "/ex1_spliced.conf --out " + kTmp + "/ex1.cert") == 0);
  CHECK(run("bound --config " + kConfigs + "/ex2.conf") == 2);
  CHECK(run("bound --config " + write("bad.conf", "family = pareto\np = 0.5\n")) == 3);
  CHECK(run("tail --config " + kConfigs + "/ex1.conf --engine fft") == 3);
  CHECK(run("nosuchcommand") == 3);
  CHECK(run("tail") == 3);
  const auto tiny = write("tiny.conf",
                          "family = pareto\nalpha = 2.2\np = 0.5\nbandwidth = 1\nB = 4\n"
                          "h.gamma = 0.99\nh.scale = 0.9\ng.exponent = 0.5\n");
  CHECK(run("bound --config " + tiny) == 3);
}

TEST_CASE("bound report and certificate") {
  const std::string cert = kTmp + "/ex1_report.cert";
  REQUIRE(run("bound --config " + kConfigs + "/ex1_spliced.conf --out " + cert) == 0);
  const auto text = slurp(cert);
  CHECK(text.find("bound = Delta(x) <= 8.53") != std::string::npos);
  CHECK(text.find("x^-0.6875 for x > 100") != std::string::npos);
  CHECK(text.find("config.g.bstar = 21.3") != std::string::npos);

  const std::string plot = kTmp + "/plot.csv";
  REQUIRE(run("plot-data --config " + kConfigs + "/ex1_spliced.conf --certificate " + cert +
              " --out " + plot) == 0);
  std::ifstream in(plot);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,log10_delta_exact,log10_delta_upper");
  int rows = 0, checked = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const std::string exact = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string upper = line.substr(c2 + 1);
    if (std::stod(line.substr(0, c1)) >= 100 && !exact.empty()) {
      ++checked;
      CHECK(std::stod(exact) <= std::stod(upper));
    }
  }
  CHECK(rows > 1000);
  CHECK(checked >= 1);

  const auto empty = write("empty.conf", slurp(kConfigs + "/ex1.conf") + "grid.lo = 50\ngrid.hi = 10\n");
  REQUIRE(run("plot-data --config " + empty + " --out " + kTmp + "/empty.csv") == 0);
  CHECK(slurp(kTmp + "/empty.csv") == "x,log10_delta_exact,log10_delta_upper\n");
}

TEST_CASE("identical config and seed give byte-identical output") {
  const auto cfg = write("mc.conf", kSmallMc);
  REQUIRE(run("tail --config " + cfg + " --out " + kTmp + "/a.csv") == 0);
  REQUIRE(run("tail --config " + cfg + " --out " + kTmp + "/b.csv") == 0);
  REQUIRE(run("tail --config " + cfg + " --seed 4 --out " + kTmp + "/c.csv") == 0);
  CHECK(slurp(kTmp + "/a.csv") == slurp(kTmp + "/b.csv"));
  CHECK(slurp(kTmp + "/a.csv") != slurp(kTmp + "/c.csv"));
  CHECK(slurp(kTmp + "/a.csv").rfind("x,tail,stderr,engine,bandwidth\n1,", 0) == 0);
}

TEST_CASE("unit-severity tail through the tool") {
  const auto cfg = write("unit.conf",
                         "family = discrete\natoms = 1:1\np = 0.25\nbandwidth = 1\nB = 5\n"
                         "h.gamma = 0.5\ng.exponent = 0.5\n");
  REQUIRE(run("tail --config " + cfg + " --out " + kTmp + "/unit.csv") == 0);
  CHECK(slurp(kTmp + "/unit.csv") ==
        "x,tail,stderr,engine,bandwidth\n"
        "0,1,0,panjer,1\n1,0.75,0,panjer,1\n2,0.5625,0,panjer,1\n3,0.421875,0,panjer,1\n"
        "4,0.31640625,0,panjer,1\n5,0.2373046875,0,panjer,1\n");
}

TEST_CASE("delta, kernels and tune subcommands") {
  CHECK(run("delta --config " + kConfigs + "/ex3.conf --out " + kTmp + "/d.csv") == 0);
  CHECK(slurp(kTmp + "/d.csv").rfind("x,delta,delta_stderr\n", 0) == 0);
  CHECK(run("kernels --config " + kConfigs + "/ex5.conf --out " + kTmp + "/k.csv") == 0);
  CHECK(slurp(kTmp + "/k.csv").rfind("x,h,K,J,K_envelope,J_envelope,g,f1,f2,f3\n", 0) == 0);
  CHECK(run("tune --config " + kConfigs + "/ex1.conf --out " + kTmp + "/t.csv") == 0);
  CHECK(slurp(kTmp + "/t.csv").find("1.14,21.3,true") != std::string::npos);
}
