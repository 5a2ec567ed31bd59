#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wsb/error.hpp"
#include "wsb/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mention and signal analysis for r/wallstreetbets submissions"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string range_text;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    app.add_option("--config", config_path, "Pipeline configuration (JSON)")->required();
    app.add_option("--range", range_text, "Override date_range, YYYY-MM-DD..YYYY-MM-DD");
    app.add_option("--seed", seed, "Override the random baseline seed");
    app.add_option("--out", out_dir, "Override the output directory");

    for (const char* name : {"fetch", "ingest", "aggregate", "backtest", "report", "all"}) {
        app.add_subcommand(name, std::string("Run the ") + name + " stage and its prerequisites")->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : wsb::kExitConfigError;
    }

    const auto stage = wsb::parse_stage(app.get_subcommands().front()->get_name());
    try {
        wsb::PipelineConfig config = wsb::load_config(config_path);
        wsb::ConfigOverrides overrides;
        if (!range_text.empty()) {
            try {
                overrides.range = wsb::DateRange::parse(range_text);
            } catch (const std::exception& e) {
                throw wsb::ConfigError(std::string("invalid configuration\n  --range: ") + e.what());
            }
        }
        overrides.seed = seed;
        if (!out_dir.empty()) overrides.output_dir = out_dir;
        wsb::apply_overrides(config, overrides);
        return wsb::run_pipeline(config, *stage, std::cerr);
    } catch (const wsb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return wsb::kExitConfigError;
    }
}
