#include "sfde/experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Fractional diffusion experiments: iteration tables, spectral bound checks, convergence orders"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto add_command = [&](const std::string& name, const std::string& help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", config_path, "key = value experiment file")->required();
        cmd->add_option("--out", out_dir, "directory for CSV and Markdown output")->required();
        return cmd;
    };
    CLI::App* table = add_command("table", "iteration counts per method over a parameter sweep");
    CLI::App* verify = add_command("verify", "dense spectral checks on random instances");
    CLI::App* order = add_command("order", "temporal and spatial convergence orders");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? sfde::kExitOk : sfde::kExitConfigError;
    }

    try {
        const sfde::ExperimentConfig cfg = sfde::load_config(config_path);
        const std::filesystem::path out(out_dir);
        if (table->parsed())
            return sfde::run_table(cfg, out, std::cout);
        if (verify->parsed())
            return sfde::run_verification(cfg, out, std::cout);
        if (order->parsed())
            return sfde::run_order_study(cfg, out, std::cout);
    } catch (const sfde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return sfde::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sfde::kExitRowFailure;
    }
    return sfde::kExitConfigError;
}
