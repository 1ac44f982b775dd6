#ifndef PTRING_RUNNER_HPP
#define PTRING_RUNNER_HPP

#include "ptring/config_io.hpp"
#include "ptring/model.hpp"

#include "json.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace ptring::cli
{

enum class Command
{
    Steady,
    Eigen,
    Ep,
    Spectrum,
    Dynamics,
    Quantum,
    Figure
};

Command command_from_string(const std::string &name);
const char *to_string(Command command);

enum class Format
{
    Csv,
    Json
};

Format format_from_string(const std::string &name);

// name:min:max:count:lin|log. min and max accept unit suffixes.
struct SweepAxis
{
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log = false;

    std::vector<double> values() const;
};

SweepAxis parse_sweep_axis(const std::string &text);

// Parameter names accepted by sweeps and series: omega_c, C1, C2, gamma1,
// gamma2, gamma, A, B, kappa, epsilon, power, detuning, omega, port.
bool is_parameter(const std::string &name);
QuantityKind parameter_kind(const std::string &name);
// Sets one parameter, keeping dependent fields (Q, optical epsilon, drive
// frequency offset) consistent. Does not validate.
void apply_parameter(SystemConfig &config, const std::string &name, double value);

struct Series
{
    std::string label;
    nlohmann::json set = nlohmann::json::object(); // parameter -> value
};

struct RunSpec
{
    Command command = Command::Steady;
    SystemConfig config;
    std::vector<SweepAxis> sweeps;
    std::vector<Series> series;
    nlohmann::json options = nlohmann::json::object();
    std::vector<std::string> columns; // empty: the command's defaults
    std::string out_path;             // empty: standard output
    Format format = Format::Csv;
    unsigned threads = 0;
};

using Cell = std::variant<double, long long, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::size_t points = 0;
    std::size_t failed_points = 0;
};

// Evaluates the command on every (series x sweep grid) point. Points run on a
// worker pool; rows come back in grid order with the last sweep axis varying
// fastest. Point failures land in the `error` column.
Table run(const RunSpec &spec);

std::string to_csv(const Table &table);
std::string to_json(const Table &table);

std::string default_preset_dir();
std::vector<std::string> list_presets(const std::string &dir = default_preset_dir());
// Builds a RunSpec from data/presets/<name>.json.
RunSpec load_preset(const std::string &name, const std::string &dir = default_preset_dir());
RunSpec spec_from_json(const nlohmann::json &doc);

// Runs the spec and writes the table; returns the process exit status
// (nonzero only when every point failed).
int execute(const RunSpec &spec);

} // namespace ptring::cli

#endif // PTRING_RUNNER_HPP
