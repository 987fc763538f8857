// noether: scenario runner for scaling-symmetry charge verification.
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "noether/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

void print_config_error(const noether::ConfigError& e) {
  std::cerr << "config error";
  if (e.line() != 0) std::cerr << " at line " << e.line() << ", column " << e.column();
  std::cerr << ": " << e.what() << "\n";
}

void print_report(const noether::Report& report, const std::string& format) {
  if (format == "json") {
    std::cout << report.to_json();
    return;
  }
  std::cout << "scenario,check,pass,metric,value\n";
  const auto prec = std::cout.precision(17);
  for (const auto& c : report.checks) {
    const auto name = noether::to_string(c.check);
    for (const auto& [key, value] : c.metrics) {
      std::cout << report.scenario << ',' << name << ',' << (c.pass ? "true" : "false") << ',' << key << ',' << value
                << '\n';
    }
    if (!c.pass) {
      std::cerr << report.scenario << ": " << name << " FAILED: " << c.detail << "\n";
    }
  }
  std::cout.precision(prec);
  std::cout << report.scenario << ',' << "overall" << ',' << (report.pass ? "true" : "false") << ",,\n";
}

int cmd_list(const std::string& format) {
  const auto& catalog = noether::list_builtin_scenarios();
  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& b : catalog) j.push_back({{"name", b.name}, {"description", b.description}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "name,description\n";
    for (const auto& b : catalog) std::cout << b.name << ",\"" << b.description << "\"\n";
  }
  return kOk;
}

int cmd_show(const std::string& name) {
  for (const auto& b : noether::list_builtin_scenarios()) {
    if (b.name == name) {
      std::cout << b.toml;
      return kOk;
    }
  }
  std::cerr << "unknown built-in scenario '" << name << "'\n";
  return kConfigError;
}

struct RunOptions {
  std::vector<std::string> configs;
  std::vector<std::string> builtins;
  std::string out;
  double tol = 0.0;
  std::string format = "csv";
  unsigned jobs = 1;
};

int cmd_run(const RunOptions& opt) {
  std::vector<noether::Scenario> scenarios;
  try {
    for (const auto& path : opt.configs) scenarios.push_back(noether::load_scenario(path));
    for (const auto& name : opt.builtins) scenarios.push_back(noether::builtin_scenario(name));
    if (scenarios.empty()) throw noether::ConfigError("nothing to run: give a config file or --builtin <name>");
    for (auto& sc : scenarios) {
      if (opt.tol > 0.0) sc.tol = opt.tol;
      if (!opt.out.empty()) {
        sc.output_dir = scenarios.size() == 1 ? std::filesystem::path(opt.out) : std::filesystem::path(opt.out) / sc.name;
      } else if (sc.output_dir.empty()) {
        sc.output_dir = std::filesystem::path("noether-out") / sc.name;
      }
      noether::validate(sc);
    }
  } catch (const noether::ConfigError& e) {
    print_config_error(e);
    return kConfigError;
  }

  std::vector<std::future<noether::Report>> pending;
  std::vector<std::optional<noether::Report>> reports(scenarios.size());
  int status = kOk;
  auto collect = [&](std::size_t i) {
    try {
      reports[i] = pending[i].get();
    } catch (const noether::ConfigError& e) {
      print_config_error(e);
      status = std::max(status, static_cast<int>(kConfigError));
    } catch (const std::exception& e) {
      std::cerr << scenarios[i].name << ": runtime error: " << e.what() << "\n";
      status = kRuntimeError;
    }
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&sc = scenarios[i]] { return noether::run_scenario(sc); }));
    if (pending.size() >= jobs) {
      for (std::size_t j = i + 1 - jobs; j <= i; ++j) {
        if (!reports[j] && pending[j].valid()) collect(j);
      }
    }
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (pending[i].valid()) collect(i);
  }

  for (const auto& report : reports) {
    if (!report) continue;
    print_report(*report, opt.format);
    if (!report->pass && status == kOk) status = kCheckFailed;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaling-symmetry Noether charge verification"};
  app.require_subcommand(1);
  std::string format = "csv";

  auto* list = app.add_subcommand("list", "List the built-in scenarios");
  list->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::string show_name;
  auto* show = app.add_subcommand("show", "Print the configuration of a built-in scenario");
  show->add_option("name", show_name, "Built-in scenario name")->required();

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run scenarios from config files or the built-in catalog");
  run->add_option("config", run_opt.configs, "Scenario files (.toml or .json)");
  run->add_option("--builtin", run_opt.builtins, "Built-in scenario name")->take_all();
  run->add_option("--out", run_opt.out, "Output directory");
  run->add_option("--tol", run_opt.tol, "Override the integration tolerance")
      ->check(CLI::PositiveNumber);
  run->add_option("--format", run_opt.format, "Report format on stdout")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("-j,--jobs", run_opt.jobs, "Scenarios run concurrently")->check(CLI::Range(1u, 64u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  if (*list) return cmd_list(format);
  if (*show) return cmd_show(show_name);
  return cmd_run(run_opt);
}
