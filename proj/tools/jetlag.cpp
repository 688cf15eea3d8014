// jetlag: batch checks of generalized metrical multi-time Lagrange geometry.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "jetlag/error.hpp"
#include "jetlag/runner.hpp"

using namespace jetlag;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_config = 2;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void list_spaces() {
  for (const SpaceInfo& s : builtin_spaces()) {
    std::cout << s.name << "\n  " << s.summary << "\n";
    for (const auto& [name, shape] : s.params) std::cout << "    " << name << ": " << shape << "\n";
  }
  std::cout << "\nchecks:";
  for (const std::string& c : check_names()) std::cout << " " << c;
  std::cout << "\ndump families:";
  for (const std::string& f : dump_families()) std::cout << " " << f;
  std::cout << "\n";
}

void print_summary(const nlohmann::json& report) {
  for (const auto& c : report["checks"]) {
    std::printf("%-13s %-8s max_abs %.3e", c["name"].get<std::string>().c_str(), c["status"].get<std::string>().c_str(),
                c.value("max_abs", 0.0));
    if (c.contains("message")) std::printf("  %s", c["message"].get<std::string>().c_str());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jetlag: jet-bundle geometry checks"};
  app.require_subcommand(1);

  std::string run_path, out_path, dump_list;
  std::uint64_t seed = 0;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "run the checks of a configuration and write a report");
  run->add_option("config", run_path, "configuration file")->required();
  auto* out_opt = run->add_option("--out", out_path, "report path (default: config output, else stdout)");
  auto* seed_opt = run->add_option("--seed", seed, "override points.seed");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  auto* dump_opt = run->add_option("--dump", dump_list, "comma-separated component families to dump");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("config", validate_path, "configuration file")->required();

  auto* spaces = app.add_subcommand("spaces", "list built-in spaces and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_config;
  }

  if (spaces->parsed()) {
    list_spaces();
    return exit_pass;
  }

  try {
    if (validate->parsed()) {
      const RunConfig cfg = load_config(validate_path);
      build_context(cfg);
      std::cout << "valid: " << cfg.space << " p=" << cfg.dims.p << " n=" << cfg.dims.n << ", "
                << cfg.checks.size() << " check(s)\n";
      return exit_pass;
    }

    RunConfig cfg = load_config(run_path);
    if (*seed_opt) {
      cfg.seed = seed;
      cfg.source["points"]["seed"] = seed;
    }
    if (*dump_opt) {
      nlohmann::json j = cfg.source;
      j["dump"] = split(dump_list);
      const std::uint64_t s = cfg.seed;
      cfg = parse_config(j);
      cfg.seed = s;
    }
    if (*out_opt) cfg.output = out_path;
    build_context(cfg);

    const nlohmann::json report = run_report(cfg, {jobs});
    const std::string text = to_json_text(report);
    if (cfg.output.empty()) {
      std::cout << text;
    } else {
      write_atomic(cfg.output, text);
      print_summary(report);
      std::cout << "report: " << cfg.output << "\n";
    }
    return report_passed(report) ? exit_pass : exit_fail;
  } catch (const Error& e) {
    std::cerr << "jetlag: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "jetlag: " << e.what() << "\n";
    return exit_config;
  }
}
