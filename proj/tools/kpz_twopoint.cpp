#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kpz/airy_limit.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/harness.hpp"
#include "kpz/quadrature.hpp"
#include "kpz/specialfn.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stationary TASEP two-point function: exact numerics and Monte Carlo"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", suite;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  const char* names[] = {"simulate", "limit-dist", "finite-dist", "verify", "scaling"};
  const char* help[] = {"simulate stationary TASEP and estimate S(j,t), sum rules and F_w(s,t)",
                        "limit law F_w(s) on an s grid, with moments",
                        "finite-time F, G0 and F_w(s,t) on an s grid",
                        "run a verification suite (identities, tails, moments, crossval)",
                        "rescaled two-point function against the limit, and the weak pairing"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
    if (std::string(names[i]) == "verify") sub->add_option("--suite", suite, "suite name; overrides the config key");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    kpz::RunManifest m;
    m.command = app.get_subcommands().front()->get_name();
    m.params = kpz::Config::load(config_path);
    if (m.command == "verify" && app.get_subcommands().front()->count("--suite")) m.params.set("suite", suite);
    m.seed = app.get_subcommands().front()->count("--seed") ? seed : m.params.get_u64("seed", 1);
    m.params.set("seed", std::to_string(m.seed));
    m.output_dir = out_dir;
    m.workers = workers;
    return kpz::run_command(m, std::cout);
  } catch (const kpz::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const kpz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kpz::UnsupportedParameter& e) {
    std::cerr << "unsupported parameter: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
