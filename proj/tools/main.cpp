#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pensionopt/cli.hpp"
#include "pensionopt/frontier.hpp"

using namespace pensionopt;

namespace {

struct Options {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string format = "text";
};

RunConfig load(const Options& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) cfg.mc.seed = *o.seed;
    if (!o.out_path.empty()) cfg.output_path = o.out_path;
    return cfg;
}

void emit(const CommandOutput& out, const RunConfig& cfg, bool csv_on_stdout) {
    if (!cfg.output_path.empty()) {
        std::ofstream f(cfg.output_path, std::ios::binary);
        if (!f) throw ConfigError("cannot write output file '" + cfg.output_path + "'");
        f << out.csv;
        std::cerr << out.report;
        return;
    }
    if (csv_on_stdout) {
        std::cout << out.csv;
        std::cerr << out.report;
    } else {
        std::cout << out.report;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pension embedded option pricer"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", opt.out_path, "write CSV output to this path");
    app.add_option("--seed", opt.seed, "Monte Carlo seed (overrides mc.seed)");
    app.add_option("--format", opt.format, "output format for price (text or csv)")
        ->check(CLI::IsMember({"text", "csv"}));

    std::string product, setting, table, param;
    std::vector<double> values;

    auto* price = app.add_subcommand("price", "price one product");
    price->add_option("product", product, "fse, underpin or bermudan")
        ->required()
        ->check(CLI::IsMember({"fse", "underpin", "bermudan"}));
    price->add_option("setting", setting, "discrete or continuous")
        ->required()
        ->check(CLI::IsMember({"discrete", "continuous"}));

    auto* tab = app.add_subcommand("table", "reproduce a published table next to computed values");
    tab->add_option("which", table, "t1, t2, t3 or t4")->required()->check(CLI::IsMember({"t1", "t2", "t3", "t4"}));

    auto* front = app.add_subcommand("frontier", "exercise frontier of the continuous Bermudan underpin");
    std::string surface_path;
    front->add_option("--surface", surface_path, "also write the value surface (t,y,v) to this path");

    auto* sweep = app.add_subcommand("sweep", "price products over a list of parameter values");
    sweep->add_option("--param", param, "c, mu_l, r, sigma_s, gamma, b, sigma_l or rho");
    sweep->add_option("--values", values, "comma-separated values")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const RunConfig cfg = load(opt);
        if (price->parsed()) {
            const CommandOutput out = cmd_price(parse_product(product), parse_setting(setting), cfg);
            emit(out, cfg, opt.format == "csv");
            return out.exit_code;
        }
        if (opt.format != "text" && opt.format != "csv") return kExitUsage;
        if (tab->parsed()) {
            const CommandOutput out = cmd_table(table, cfg);
            emit(out, cfg, true);
            return out.exit_code;
        }
        if (front->parsed()) {
            std::string surface;
            const CommandOutput out = cmd_frontier(cfg, surface_path.empty() ? nullptr : &surface);
            if (!surface_path.empty()) {
                std::ofstream f(surface_path, std::ios::binary);
                if (!f) throw ConfigError("cannot write surface file '" + surface_path + "'");
                f << surface;
            }
            emit(out, cfg, true);
            return out.exit_code;
        }
        if (sweep->parsed()) {
            const std::string name = param.empty() ? cfg.sweep_param : param;
            if (name.empty()) throw ConfigError("sweep: no parameter given (--param or sweep.param)");
            const std::vector<double> vals = sweep->count("--values") > 0 ? values : cfg.sweep_values;
            const CommandOutput out = cmd_sweep(name, vals, cfg);
            emit(out, cfg, true);
            return out.exit_code;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
