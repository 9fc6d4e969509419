#include "sdd_tools/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

constexpr const char* output_env = "SDD_OUTPUT_DIR";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampling and billiard experiments for spatially varying diffusion"};
    app.set_version_flag("--version", SDD_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    unsigned workers = 0;
    std::int64_t seed = -1;

    for (const auto& name : sdd::tools::experiment_names()) {
        auto* sub = app.add_subcommand(name, sdd::tools::experiment_description(name));
        sub->add_option("config", config_path, "INI configuration file")->required();
        sub->add_option("-o,--output-dir", output_dir,
                        std::string("Output directory (default: [run] output_dir, then $") + output_env + ", then .)");
        sub->add_option("-w,--workers", workers, "Worker threads (default: [run] workers, then 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("-s,--seed", seed, "Master seed (default: [run] seed, then 1)")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    try {
        sdd::tools::Config cfg = sdd::tools::Config::from_file(config_path);
        sdd::tools::RunContext ctx;
        const std::string cfg_dir = cfg.text("run", "output_dir", "");
        if (!output_dir.empty()) {
            ctx.output_dir = output_dir;
        } else if (!cfg_dir.empty()) {
            ctx.output_dir = cfg_dir;
        } else if (const char* env = std::getenv(output_env); env && *env) {
            ctx.output_dir = env;
        }
        const auto cfg_workers = cfg.count("run", "workers", 1);
        ctx.workers = workers > 0 ? workers : static_cast<unsigned>(std::max<std::uint64_t>(1, cfg_workers));
        const auto cfg_seed = cfg.count("run", "seed", 1);
        ctx.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : cfg_seed;
        // The manifest echoes what was used, not what the file said.
        cfg.set("run", "seed", std::to_string(ctx.seed));
        cfg.set("run", "workers", std::to_string(ctx.workers));
        cfg.set("run", "output_dir", ctx.output_dir.string());
        cfg.count("run", "seed", ctx.seed);
        cfg.count("run", "workers", ctx.workers);
        cfg.text("run", "output_dir", ".");

        const auto summary = sdd::tools::run_experiment(name, cfg, ctx);
        sdd::tools::write_manifest(ctx.output_dir / "manifest.json", name, config_path, cfg, ctx, summary);
        for (const auto& [key, value] : summary.derived) std::cout << key << " = " << value << '\n';
        return 0;
    } catch (const sdd::Error& e) {
        std::cerr << "sdd " << name << ": " << e.what() << '\n';
        return sdd::tools::exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "sdd " << name << ": " << e.what() << '\n';
        return 3;
    }
}
