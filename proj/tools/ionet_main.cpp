#include "ionet/errors.hpp"
#include "ionet/kernels.hpp"
#include "ionet/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"duplex industry network pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    for (const auto& stage : ionet::pipeline::stage_names()) {
        CLI::App* sub = app.add_subcommand(stage, "run the " + stage + " stage");
        sub->add_option("-c,--config", config_path, "configuration file");
        sub->add_option("-s,--set", overrides, "override a key: section.key=value");
    }
    CLI::App* backends = app.add_subcommand("backends", "show compute backend selection");

    CLI11_PARSE(app, argc, argv);

    try {
        if (backends->parsed()) {
            std::printf("detected=%s active=%s\n",
                        ionet::kernels::backend_name(ionet::kernels::detected_backend()).c_str(),
                        ionet::kernels::backend_name(ionet::kernels::active_backend()).c_str());
            return 0;
        }
        ionet::pipeline::Config cfg;
        if (!config_path.empty()) cfg = ionet::pipeline::Config::from_file(config_path);
        for (const auto& o : overrides) cfg.set_override(o);
        ionet::pipeline::run(app.get_subcommands().front()->get_name(), cfg);
        return 0;
    } catch (const ionet::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
