#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qv/cli.hpp"

namespace qv::cli {

namespace {

// report destination: --out, then [output] path, then $QVPRICE_OUTPUT_DIR/<name>.csv
std::string destination(const Options& opt, const std::string& configured, const std::string& stem) {
    if (!opt.out.empty()) return opt.out;
    if (!configured.empty()) return configured;
    if (const char* dir = std::getenv("QVPRICE_OUTPUT_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / (stem + ".csv")).string();
    return "";
}

void emit(const Report& rep, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        rep.write(out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write report to " + path);
    rep.write(f);
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

} // namespace

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qvprice: prices options on an asset and its realized variance"};
    app.require_subcommand(1);
    // global flags may also follow the subcommand
    app.fallthrough();
    Options opt;
    app.add_flag("-q,--quiet", opt.quiet, "suppress human-readable text");
    app.add_option("-o,--out", opt.out, "write the delimited report to this file");

    std::string config;
    int table_id = 0;
    std::int64_t paths = -1;
    std::uint64_t seed = 0;
    auto* price = app.add_subcommand("price", "price one contract");
    price->add_option("config", config, "config file")->required();
    auto* greeks = app.add_subcommand("greeks", "contour Delta and Gamma with finite-difference checks");
    greeks->add_option("config", config, "config file")->required();
    auto* validate_cmd = app.add_subcommand("validate", "check a config without pricing");
    validate_cmd->add_option("config", config, "config file")->required();
    auto* table = app.add_subcommand("table", "reproduce a reference table");
    table->add_option("id", table_id, "table number 1..5")->required();
    auto* paths_opt = table->add_option("--mc-paths", paths, "Monte Carlo paths (0 disables)");
    auto* seed_opt = table->add_option("--seed", seed, "Monte Carlo seed");
    for (auto* sub : {price, greeks, validate_cmd}) {
        sub->add_option("--mc-paths", paths, "override [montecarlo] paths");
        sub->add_option("--seed", seed, "override [montecarlo] seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    if (paths >= 0) opt.mc_paths = paths;
    if (*seed_opt || seed != 0) opt.seed = seed;
    (void)paths_opt;

    try {
        Outcome o;
        std::string where;
        if (*table) {
            o = cmd_table(table_id, opt, err);
            where = destination(opt, "", "table" + std::to_string(table_id));
        } else {
            const RunConfig cfg = load_config(config);
            if (*price) o = cmd_price(cfg, opt, err);
            if (*greeks) o = cmd_greeks(cfg, opt, err);
            if (*validate_cmd) o = cmd_validate(cfg, opt, err);
            const std::string verb = *price ? "price" : *greeks ? "greeks" : "validate";
            where = destination(opt, cfg.output, stem_of(config) + "_" + verb);
        }
        emit(o.report, where, out);
        if (!where.empty() && !opt.quiet) err << "report written to " << where << "\n";
        return o.code;
    } catch (const ModelRejected& e) {
        err << "error: model rejected (" << e.condition() << "): " << e.what() << "\n";
        return kUsage;
    } catch (const StripViolation& e) {
        err << "error: contour outside strip: " << e.what() << "\n";
        return kStrip;
    } catch (const EmptyStripError& e) {
        err << "error: empty strip: " << e.what() << "\n";
        return kStrip;
    } catch (const SingularPointError& e) {
        err << "error: singular contour: " << e.what() << "\n";
        return kStrip;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (best estimate " << e.estimate() << ", error " << e.error() << ")\n";
        return kNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNonConvergence;
    }
}

} // namespace qv::cli
