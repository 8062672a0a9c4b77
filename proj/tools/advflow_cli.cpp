// advflow: command-line driver for the experiments.
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include <advflow/experiment.hpp>

int main(int argc, char** argv) {
    using namespace advflow;
    CLI::App app{"Adversarial boundary evolution experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> eps_max, step;
    std::optional<std::size_t> grid;
    std::optional<std::string> out;
    std::vector<double> eps;
    bool certify = false;

    const std::pair<const char*, const char*> cmds[] = {
        {"bayes", "Bayes set (1D) or Bayes contour (2D)"},
        {"evolve1d", "Evolve the 1D decision boundary in eps"},
        {"certify", "Build and verify optimality certificates"},
        {"evolve2d", "Front-track the 2D decision boundary"},
        {"radial", "Radial example against its ODE"},
    };
    for (const auto& [name, help] : cmds) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--eps-max", eps_max, "Largest eps to evolve to");
        sub->add_option("--step", step, "Step in eps");
        sub->add_option("--grid", grid, "Transport grid cells (1D) or contour nodes along x (2D)");
        sub->add_option("--out", out, "Output directory");
        sub->add_flag("--certify", certify, "Also write per-eps duality reports (evolve1d)");
        sub->add_option("--eps", eps, "Eps values to certify or report (repeatable)");
    }
    CLI11_PARSE(app, argc, argv);

    Command cmd = Command::bayes;
    for (const auto* sub : app.get_subcommands()) {
        const std::string n = sub->get_name();
        if (n == "evolve1d") cmd = Command::evolve1d;
        if (n == "certify") cmd = Command::certify;
        if (n == "evolve2d") cmd = Command::evolve2d;
        if (n == "radial") cmd = Command::radial;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code::config;
    }
    if (eps_max) cfg.eps_max = *eps_max;
    if (step) cfg.step = *step;
    if (out) cfg.output_dir = *out;
    if (!eps.empty()) cfg.eps = eps;
    cfg.certify = cfg.certify || certify;
    if (grid) {
        cfg.grid = *grid;
        if (cfg.window.size() == 4 && *grid >= 2) {
            cfg.contour_nx = *grid;
            const double aspect = (cfg.window[3] - cfg.window[2]) / (cfg.window[1] - cfg.window[0]);
            cfg.contour_ny = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(*grid * aspect)));
        }
    }
    return run_guarded(cmd, cfg, std::cout, std::cerr);
}
