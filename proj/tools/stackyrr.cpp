#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stackyrr/cli.hpp"

int main(int argc, char** argv) {
  using namespace stackyrr::cli;
  CLI::App app{"Exact invariants of finite quotient stacks and orbifold curves"};
  app.require_subcommand(0, 1);

  RawJob job;
  std::string group, gset, bundle, curve, divisor, weights;
  bool list_fixtures = false;
  app.add_flag("--list-fixtures", list_fixtures, "Print the embedded fixture names and exit");

  const char* help[][2] = {
      {"classes", "Conjugacy classes of a group"},
      {"inertia", "Orbits and inertia of a G-set"},
      {"euler", "Euler characteristics, series and ladder of a G-set"},
      {"series", "Higher orbifold Euler characteristics of a G-set"},
      {"rr", "Riemann-Roch on an orbifold curve"},
      {"devissage", "Devissage matrix of a G-set, optionally with a bundle"},
      {"weighted", "Weighted Euler characteristics and determinants"},
      {"report", "Every section applicable to the given inputs"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("--group", group, "Group JSON file or fixture");
    sub->add_option("--gset", gset, "G-set JSON file or fixture");
    sub->add_option("--bundle", bundle, "Equivariant bundle JSON file or fixture");
    sub->add_option("--curve", curve, "Orbifold curve JSON file or fixture");
    sub->add_option("--divisor", divisor, "Divisor JSON file or fixture (needs --curve)");
    sub->add_option("--weights", weights, "Weights JSON file or fixture");
    sub->add_option("--max-m", job.m_max, "Largest series index")->capture_default_str();
    sub->add_flag("--oracle", job.oracle, "Run every independent cross-check");
    sub->add_option("--output", job.output_path, "Write the report here instead of stdout");
    sub->add_option("--format", job.format, "json or table")->capture_default_str();
    sub->callback([&job, name = std::string(name)] { job.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return status::invalid;
  }
  if (list_fixtures) {
    for (const auto& f : fixtures()) std::cout << f.name << " (" << f.kind << ")\n";
    return 0;
  }
  if (job.command.empty()) {
    std::cerr << app.help();
    return status::invalid;
  }

  auto set = [](std::optional<std::string>& slot, const std::string& v) {
    if (!v.empty()) slot = v;
  };
  set(job.group, group);
  set(job.gset, gset);
  set(job.bundle, bundle);
  set(job.curve, curve);
  set(job.divisor, divisor);
  set(job.weights, weights);

  const RunResult r = run(job);
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  if (job.output_path.empty()) std::cout << r.output;
  return r.status;
}
