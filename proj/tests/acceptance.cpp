#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "kpz/harness.hpp"

using namespace kpz;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
};

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

bool report(const Criterion& c) {
  bool ok = !c.checks.empty();
  for (const Check& k : c.checks) ok = ok && k.pass;
  std::printf("criterion %2d %s  %s  [%.1f s]\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), c.seconds);
  for (const Check& k : c.checks) {
    char tol[32] = "";
    if (k.relation.rfind("in", 0) != 0) std::snprintf(tol, sizeof tol, " %.6g", k.tolerance);
    std::printf("    %-4s %s = %.6g %s%s  %s\n", k.pass ? "ok" : "FAIL", k.name.c_str(), k.measured, k.relation.c_str(), tol,
                k.detail.c_str());
  }
  std::fflush(stdout);
  return ok;
}

template <class F>
Criterion run(int id, std::string title, F&& body) {
  Criterion c{id, std::move(title), {}, 0.0};
  const double t0 = now();
  try {
    body(c.checks);
  } catch (const std::exception& e) {
    c.checks.push_back(make_check("exception", 1.0, "<=", 0.0, 0, e.what()));
  }
  c.seconds = now() - t0;
  report(c);
  return c;
}

void add(std::vector<Check>& out, const std::vector<Check>& more) { out.insert(out.end(), more.begin(), more.end()); }

void add_runtime(std::vector<Check>& out, double t0, double limit) {
  out.push_back(make_check("runtime_seconds", now() - t0, "<", limit));
}

int cli(const std::string& args) {
  const std::string cmd = std::string(KPZ_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// every CSV of one manifest, run with 1 and 3 workers and once more with 1
std::vector<Check> determinism(const fs::path& root) {
  struct Job {
    std::string command, config;
  };
  const std::vector<Job> jobs{
      {"simulate", "rho = 0.4\nt_max = 30\nn_runs = 400\nw_list = 0, 0.3\ns_min = -4\ns_max = 4\ns_step = 0.25\n"},
      {"limit-dist", "w_list = 0.5\ns_min = -6\ns_max = 6\ns_step = 0.5\n"},
      {"finite-dist", "rho = 0.5\nt_max = 100\nw_list = 0.3\ns_min = -3\ns_max = 3\ns_step = 1\n"},
      {"scaling", "rho = 0.5\nt_max = 40\nn_runs = 300\nw_min = -0.2\nw_max = 0.2\nw_step = 0.1\n"},
  };
  std::vector<Check> out;
  for (const Job& j : jobs) {
    const fs::path d = root / j.command;
    fs::create_directories(d);
    std::ofstream(d / "run.cfg") << j.config;
    const std::string base = j.command + " --config " + (d / "run.cfg").string() + " --seed 17";
    int rc = cli(base + " --workers 1 --out " + (d / "a").string());
    rc |= cli(base + " --workers 3 --out " + (d / "b").string());
    rc |= cli(base + " --workers 1 --out " + (d / "c").string());
    int files = 0, differing = 0;
    for (const auto& e : fs::directory_iterator(d / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const std::string a = slurp(e.path());
      const fs::path name = e.path().filename();
      differing += a != slurp(d / "b" / name) || a != slurp(d / "c" / name);
    }
    out.push_back(make_check(j.command + "_csv_files_differing", rc != 0 || files == 0 ? 1.0 : differing, "<=", 0.0, 17,
                             std::to_string(files) + " files, exit " + std::to_string(rc)));
  }
  return out;
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "kpz_acceptance";
  fs::remove_all(scratch);
  std::vector<Criterion> all;

  all.push_back(run(1, "Fredholm self-convergence of F_GUE", [](auto& c) {
    const double t0 = now();
    c.push_back(checks::fgue_self_convergence(-8.0, 4.0, 0.25));
    add_runtime(c, t0, 10.0);
  }));
  all.push_back(run(2, "limit law: mean zero and by-parts moments", [](auto& c) {
    for (double w : {0.3, 0.7, 1.0}) add(c, checks::limit_moments(w, 1));
  }));
  all.push_back(run(3, "g1 identity on random frames", [](auto& c) { c.push_back(checks::g1_identity(100, kSeed)); }));
  all.push_back(run(4, "kernel identities for R and L", [](auto& c) {
    for (double rho : {0.4, 0.5})
      for (double t : {50.0, 100.0}) add(c, checks::kernel_identities(rho, t));
  }));
  all.push_back(run(5, "finite time vs limit at t = 200", [](auto& c) { c.push_back(checks::finite_vs_limit(200.0)); }));
  all.push_back(run(6, "exact finite-time law vs Monte Carlo", [](auto& c) {
    const double t0 = now();
    c.push_back(checks::crossval_fixed_time(0.5, 100.0, 0.3, 10000, kSeed, 1));
    add_runtime(c, t0, 600.0);
  }));
  all.push_back(run(7, "sum rules at t = 50", [](auto& c) {
    for (double rho : {0.4, 0.5}) add(c, checks::sum_rules(rho, 50.0, 2000, kSeed, 1));
  }));
  all.push_back(run(8, "variance Laplacian and second-class law", [](auto& c) {
    add(c, checks::delta_var_and_pmf(0.5, 20.0, 2000, kSeed, 1));
  }));
  all.push_back(run(9, "variance scaling exponent", [](auto& c) {
    const double t0 = now();
    c.push_back(checks::variance_exponent(0.5, {100, 200, 400, 800, 1600}, 1000, kSeed, 1));
    add_runtime(c, t0, 1800.0);
  }));
  all.push_back(run(10, "trace growth and trace formulas", [](auto& c) { add(c, checks::trace_shape(0.5, 100.0)); }));
  all.push_back(run(11, "tail shapes", [](auto& c) { add(c, checks::tail_shapes(0.5, 100.0, 0.3)); }));
  all.push_back(run(12, "moment convergence and weak pairing", [](auto& c) {
    add(c, checks::moment_convergence(0.5, 0.3, {50, 100, 200, 400}, 4000, kSeed, 1));
  }));
  all.push_back(run(13, "determinism across worker counts", [&](auto& c) { add(c, determinism(scratch)); }));

  int failed = 0;
  std::printf("\nsummary\n");
  for (const Criterion& c : all) {
    bool ok = !c.checks.empty();
    for (const Check& k : c.checks) ok = ok && k.pass;
    failed += !ok;
    std::printf("criterion %2d %s  %s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str());
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(all.size()) - failed, all.size());
  fs::remove_all(scratch);
  return failed == 0 ? 0 : 1;
}
