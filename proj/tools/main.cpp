#include "bhlab/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for scalar balance laws with singular nonlocal sources"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "path to a key = value config")->required();

    auto* list = app.add_subcommand("list", "list experiments and their schemas");

    std::string defaults_name;
    auto* defaults = app.add_subcommand("defaults", "print the default config of an experiment");
    defaults->add_option("experiment", defaults_name, "experiment name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return bhlab::run_experiment(bhlab::parse_config_file(config_path));
        }
        if (*list) {
            for (const auto& name : bhlab::list_experiments()) {
                std::cout << name << "\n";
                std::cout << bhlab::experiment_defaults_text(name);
                std::cout << "\n";
            }
            return 0;
        }
        if (*defaults) {
            std::cout << bhlab::experiment_defaults_text(defaults_name);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
