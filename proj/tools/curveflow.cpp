#include <iostream>

#include <CLI11.hpp>

#include "curveflow/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"curveflow: gradient flow of the bending energy with a spontaneous-curvature "
                 "coupling and length penalty, for open curves with fixed endpoints"};
    app.require_subcommand(1);

    std::string run_config;
    bool print_defaults = false;
    auto* run = app.add_subcommand("run", "integrate a flow from a config file");
    run->add_option("config", run_config, "config file (key = value)");
    run->add_flag("--print-defaults", print_defaults, "print the defaults table and exit");

    std::string check_dir;
    auto* check = app.add_subcommand("check", "audit a finished trajectory directory");
    check->add_option("dir", check_dir, "trajectory directory")->required();

    std::string audit_spec;
    auto* audit = app.add_subcommand("audit", "run an inequality corpus audit");
    audit->add_option("spec", audit_spec, "audit spec file")->required();

    std::string sweep_glob;
    auto* sweep = app.add_subcommand("sweep", "run every config matching a glob");
    sweep->add_option("glob", sweep_glob, "config glob, e.g. 'configs/*.cfg'")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (print_defaults) {
                std::cout << curveflow::defaults_table();
                return 0;
            }
            if (run_config.empty()) {
                std::cerr << "run: config file required\n";
                return 4;
            }
            return curveflow::cmd_run(std::filesystem::path(run_config));
        }
        if (check->parsed())
            return curveflow::cmd_check(check_dir);
        if (audit->parsed())
            return curveflow::cmd_audit(audit_spec);
        if (sweep->parsed())
            return curveflow::cmd_sweep(sweep_glob);
    } catch (const curveflow::Error& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 4;
    }
    return 4;
}
