#include "quantact/session.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace quantact;

int main(int argc, char** argv) {
    CLI::App app{"Quantization workbench for group actions on R^d"};
    app.set_help_all_flag("--help-all");
    std::string config_path;
    std::string task;
    std::string action;
    std::optional<int> order;
    std::optional<std::uint64_t> seed;
    std::string out;
    auto add_common = [&](CLI::App* a) {
        a->add_option("--config", config_path, "Session config file")->check(CLI::ExistingFile);
        a->add_option("--order", order, "Truncation order N")->check(CLI::NonNegativeNumber);
        a->add_option("--seed", seed, "Random seed");
        a->add_option("--out", out, "Report directory");
        a->add_option("--action", action, "builtin:<spec> or action file, overrides the config");
    };
    add_common(&app);
    app.add_option("--task", task, "Task name")->check(CLI::IsMember(task_names()));
    for (const auto& name : task_names()) {
        add_common(app.add_subcommand(name, "Run the " + name + " task"));
    }
    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);

    for (auto* sub : app.get_subcommands()) {
        task = sub->get_name();
    }
    try {
        Config cfg = config_path.empty() ? Config::parse("") : Config::load(config_path);
        if (!task.empty()) {
            cfg.set("session", "task", task);
        }
        if (order) {
            cfg.set("session", "order", std::to_string(*order));
        }
        if (seed) {
            cfg.set("session", "seed", std::to_string(*seed));
        }
        if (!out.empty()) {
            cfg.set("session", "out", out);
        }
        if (!action.empty()) {
            cfg.set("session", "action", action);
        }
        const SessionConfig session = SessionConfig::from(cfg);
        if (session.task.empty()) {
            std::cerr << "error: no task given (use a subcommand, --task or task = ... in the config)\n";
            return 2;
        }
        return run_session(session, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
