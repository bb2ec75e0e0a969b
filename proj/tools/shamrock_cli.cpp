#include "shamrock/cli.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
    CLI::App app{"shamrock: opto-mechanical crystal bands, defect modes and cascade amplitudes"};
    app.require_subcommand(1);
    std::string config, out, domain = "photonic";
    bool quiet = false;
    for (const char* name : {"bands", "defect", "cascade", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON configuration file")->required();
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--domain", domain, "photonic or phononic")->check(CLI::IsMember({"photonic", "phononic"}));
        sub->add_flag("--quiet", quiet, "suppress progress messages");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : shamrock::kExitConfig;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    return shamrock::run_cli(cmd, config, out, domain, quiet);
}
