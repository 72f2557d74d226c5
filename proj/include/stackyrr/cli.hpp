#pragma once

// Batch front-end: load JSON inputs, run one command, render a report.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace stackyrr::cli {

enum class Command { classes, inertia, euler, series, rr, devissage, weighted, report };
enum class Format { json, table };

namespace status {
inline constexpr int ok = 0;
inline constexpr int invalid = 2;
inline constexpr int resource = 3;
inline constexpr int disagreement = 4;
}  // namespace status

/// Command-line level description: input sources are file paths or names of
/// embedded fixtures (a trailing ".json" is ignored for fixture lookup).
struct RawJob {
  std::string command;
  std::optional<std::string> group, gset, bundle, curve, divisor, weights;
  int m_max = 3;
  bool oracle = false;
  std::string output_path;
  std::string format = "json";
};

struct Inputs {
  std::optional<GroupPtr> group;
  std::optional<FiniteGSet> gset;
  std::optional<VirtualEqBundle> bundle;
  std::optional<OrbifoldCurve> curve;
  std::optional<FracDivisor> divisor;
  std::optional<io::WeightsInput> weights;
};

/// A validated job. Build it with load_job.
struct JobSpec {
  Command command = Command::report;
  Inputs inputs;
  int m_max = 3;
  bool oracle = false;
  std::string output_path;
  Format format = Format::json;
};

struct RunResult {
  int status = status::ok;
  std::string output;  // rendered report, empty on error
  io::Json report;
  std::string error;
};

std::string report_schema_version();

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command c);

/// Parses and validates every input; throws ValidationError with a
/// location-bearing message.
JobSpec load_job(const RawJob& raw);

/// Computes the report and writes it to output_path when one is given.
/// Library errors become exit statuses; nothing is thrown.
RunResult run(const JobSpec& spec);

/// load_job followed by run, with load errors mapped to statuses.
RunResult run(const RawJob& raw);

/// Parses a report, rejecting unknown schema versions.
io::Json parse_report(const std::string& text);

std::string render_table(const io::Json& report);

struct Fixture {
  std::string name;
  std::string kind;  // group, gset, bundle, curve, divisor, weights
  std::string text;
  std::string companion;  // curve fixture paired with a divisor fixture
};

const std::vector<Fixture>& fixtures();
std::optional<Fixture> find_fixture(const std::string& name);

/// The report job exercising one fixture (divisors are paired with a curve).
RawJob fixture_job(const Fixture& f);

}  // namespace stackyrr::cli
