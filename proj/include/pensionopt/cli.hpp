#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pensionopt/config.hpp"
#include "pensionopt/core_model.hpp"
#include "pensionopt/pde_engine.hpp"

namespace pensionopt {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNonConvergence = 2, kExitTolerance = 3 };

struct CommandOutput {
    int exit_code = kExitOk;
    std::string csv;     // machine-readable payload
    std::string report;  // human-readable summary (runtime etc.), never part of the CSV
};

/// Prices one product with the method implied by the setting: closed form for the
/// FSE, PDE for continuous underpin/Bermudan, MC/LSMC (or the DP oracle) for discrete.
/// Throws NonConvergenceError on an unconverged PDE and ConfigError on a
/// product/setting/method mismatch.
PriceEstimate price_product(Product product, Setting setting, const PlanParams& p, const MarketParams& m,
                            const RunConfig& cfg);

CommandOutput cmd_price(Product product, Setting setting, const RunConfig& cfg);

/// One horizon of Table 1 or 2. For Table 1, bermudan is v2 (stochastic salary)
/// and bermudan_det is v3; for Table 2, bermudan is the LSMC value.
struct TableRow {
    std::string label;
    double horizon = 0.0;
    double db = 0.0;
    double dc = 0.0;
    std::optional<PriceEstimate> fse;
    std::optional<PriceEstimate> underpin;
    std::optional<PriceEstimate> bermudan;
    std::optional<PriceEstimate> bermudan_det;
};

/// One computed quantity next to its published counterpart.
struct TableCell {
    std::string row;
    std::string column;
    std::string method;
    double value = 0.0;
    double std_error = 0.0;
    std::string published;     // verbatim, empty when no value was published
    std::string published_se;  // verbatim, empty when none
    double tolerance = 0.0;    // absolute acceptance band
    std::string status;        // ok, fail, nonconverged, error, unpublished
    std::string note;
};

struct TableResult {
    std::string which;
    std::vector<TableRow> rows;  // t1 and t2 only
    std::vector<TableCell> cells;
    int exit_code = kExitOk;
};

/// Tables use the benchmark plan and market; cfg supplies the method specs.
TableResult build_table(const std::string& which, const RunConfig& cfg);
std::string table_csv(const TableResult& t);
CommandOutput cmd_table(const std::string& which, const RunConfig& cfg);

/// Exercise frontier of the continuous Bermudan underpin with a classification header.
/// When surface_csv is given it receives the solved value surface as t,y,v rows.
CommandOutput cmd_frontier(const RunConfig& cfg, std::string* surface_csv = nullptr);

/// t,y,v rows of a solved surface, every time_stride-th time level (the last level always).
std::string surface_csv(const ValueSurface& s, std::size_t time_stride = 1);

/// Parameter names accepted by cmd_sweep.
const std::vector<std::string>& sweep_parameters();
/// Sets a sweep parameter on copies of plan/market; throws ConfigError for unknown names.
void set_parameter(const std::string& name, double value, PlanParams& p, MarketParams& m);

CommandOutput cmd_sweep(const std::string& param, const std::vector<double>& values, const RunConfig& cfg);

/// Decimal places of a published number ("0.0023" -> 4, "7.08" -> 2, "0" -> 0).
int published_decimals(const std::string& s);
/// max(tol, half a unit in the last published decimal); integers such as "0" keep tol.
double comparison_tolerance(double tol, const std::string& published);
/// %.6g formatting used for every computed CSV value.
std::string format_value(double v);

}  // namespace pensionopt
