#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dtids/error.hpp"
#include "settings.hpp"

namespace {

// Exit codes: 0 success, 1 unexpected failure, 2 configuration error, 3 data
// error, 4 training diverged.
int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const dtids::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const dtids::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const dtids::DivergedError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return 1;
  }
}

struct CommandFlags {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace dtids::cli;
  CLI::App app{"Intrusion detection with residual 1-D CNNs and deep transfer learning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  std::map<std::string, CommandFlags> commands;
  for (const auto& name : command_names()) {
    auto& c = commands[name];
    c.app = app.add_subcommand(name);
    c.app->add_option("--config", c.config, "key-value config file; flags override it");
    for (const auto& o : command_options(name)) {
      std::string help = o.help;
      if (!o.fallback.empty()) help += " [" + o.fallback + "]";
      c.options[o.key] = c.app->add_option(flag_name(o.key), c.values[o.key], help);
    }
  }
  commands["synth"].app->description("generate synthetic seven-sensor telemetry");
  commands["prepare"].app->description("ingest, clean, prune, scale and split raw CSVs");
  commands["train"].app->description("train a model on prepared data and evaluate it on the test split");
  commands["evaluate"].app->description("evaluate a checkpoint on a prepared split");
  commands["transfer"].app->description("transferred versus from-scratch comparison over several seeds");
  commands["report"].app->description("comparison and resource tables over run directories");
  commands["report"].options["runs"]->delimiter(',');
  std::vector<std::string> positional_runs;
  commands["report"].app->add_option("run_dirs", positional_runs, "run directories");

  std::string manifest, rerun_out;
  auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest.txt");
  rerun->add_option("manifest", manifest, "manifest.txt of an earlier run")->required();
  rerun->add_option("--out", rerun_out, "write to this directory instead of the recorded one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return guarded([&] {
    if (rerun->parsed()) {
      Settings s = Settings::from_manifest(manifest);
      if (!rerun_out.empty()) s.set("out", rerun_out);
      run_command(s);
      return;
    }
    for (auto& [name, c] : commands) {
      if (!c.app->parsed()) continue;
      std::map<std::string, std::string> flags;
      for (const auto& [key, opt] : c.options) {
        if (opt->count() > 0) flags[key] = c.values[key];
      }
      if (name == "report" && !positional_runs.empty()) {
        std::string joined = flags.count("runs") ? flags["runs"] : "";
        for (const auto& r : positional_runs) joined += (joined.empty() ? "" : ",") + r;
        flags["runs"] = joined;
      }
      Settings s = Settings::resolve(name, c.config, flags);
      run_command(s);
    }
  });
}
