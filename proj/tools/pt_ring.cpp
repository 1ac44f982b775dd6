#include "ptring/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace ptring;
using namespace ptring::cli;

namespace
{

struct Arguments
{
    std::string config_path;
    std::vector<std::string> sweeps;
    std::vector<std::string> sets;
    std::vector<std::string> options;
    std::vector<std::string> columns;
    std::string out_path;
    std::string format = "csv";
    unsigned threads = 0;
    std::string figure;
    std::string preset_dir = default_preset_dir();
    bool list = false;
};

std::pair<std::string, std::string> split_assignment(const std::string &text, const std::string &flag)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError(flag, "expected name=value, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

// Numbers, booleans and arrays are parsed as JSON; anything else is a string.
nlohmann::json option_value(const std::string &text)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &) {
        return text;
    }
}

void add_common(CLI::App &sub, Arguments &args)
{
    sub.add_option("--sweep", args.sweeps, "name:min:max:count:lin|log (repeatable)");
    sub.add_option("--set", args.sets, "name=value parameter override (repeatable)");
    sub.add_option("--option", args.options, "key=value command option (repeatable)");
    sub.add_option("--columns", args.columns, "output columns")->delimiter(',');
    sub.add_option("--out", args.out_path, "output file (default: stdout)");
    sub.add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub.add_option("--threads", args.threads, "worker threads (0: hardware concurrency)");
}

RunSpec build_spec(const std::string &command, const Arguments &args)
{
    RunSpec spec;
    if (command == "figure") {
        spec = load_preset(args.figure, args.preset_dir);
    } else {
        spec.command = command_from_string(command);
        spec.config = load_config(args.config_path);
    }
    for (const auto &s : args.sweeps)
        spec.sweeps.push_back(parse_sweep_axis(s));
    for (const auto &s : args.sets) {
        const auto [name, value] = split_assignment(s, "set");
        apply_parameter(spec.config, name, parse_quantity(value, parameter_kind(name), "set." + name));
    }
    validate(spec.config);
    for (const auto &o : args.options) {
        const auto [key, value] = split_assignment(o, "option");
        spec.options[key] = option_value(value);
    }
    if (!args.columns.empty())
        spec.columns = args.columns;
    spec.out_path = args.out_path;
    spec.format = format_from_string(args.format);
    spec.threads = args.threads;
    return spec;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Coupled active/passive microresonator simulator"};
    app.require_subcommand(1);
    Arguments args;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"steady", "steady-state intensities and amplitudes"},
        {"eigen", "complex eigenfrequencies and PT phase"},
        {"ep", "exceptional-point coupling"},
        {"spectrum", "transmission spectra"},
        {"dynamics", "time integration of the coupled-mode equations"},
        {"quantum", "truncated Fock-space master equation"}};
    for (const auto &[name, help] : commands) {
        auto *sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config_path, "JSON configuration file")->required();
        add_common(*sub, args);
    }
    auto *figure = app.add_subcommand("figure", "run a named figure preset");
    figure->add_option("name", args.figure, "preset name");
    figure->add_flag("--list", args.list, "list available presets");
    figure->add_option("--preset-dir", args.preset_dir, "preset directory");
    add_common(*figure, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "figure") {
            if (args.list) {
                for (const auto &name : list_presets(args.preset_dir))
                    std::cout << name << '\n';
                return 0;
            }
            if (args.figure.empty())
                throw ConfigError("figure", "a preset name or --list is required");
        }
        return execute(build_spec(command, args));
    } catch (const ConfigError &e) {
        std::cerr << "pt-ring: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "pt-ring: " << e.what() << '\n';
        return 1;
    }
}
