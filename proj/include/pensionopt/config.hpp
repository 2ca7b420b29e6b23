#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pensionopt/core_model.hpp"
#include "pensionopt/mc_engine.hpp"
#include "pensionopt/oracle.hpp"
#include "pensionopt/pde_engine.hpp"

namespace pensionopt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Product { Fse, Underpin, Bermudan };
enum class Setting { Discrete, Continuous };
enum class DiscreteMethod { MonteCarlo, Oracle };

const char* to_string(Product p);
const char* to_string(Setting s);
Product parse_product(const std::string& s);
Setting parse_setting(const std::string& s);

struct RunConfig {
    PlanParams plan;
    MarketParams market;
    McSpec mc;
    GridSpec grid;
    OracleSpec oracle;
    SalaryVariant salary = SalaryVariant::DeterministicSalary;  // continuous products
    DiscreteMethod discrete_method = DiscreteMethod::MonteCarlo;

    std::string sweep_param;
    std::vector<double> sweep_values;
    std::vector<Product> sweep_products{Product::Fse, Product::Underpin, Product::Bermudan};
    Setting sweep_setting = Setting::Continuous;

    std::string output_path;  // empty: stdout
};

/// Flat `key = value` lines with dotted keys; '#' starts a comment. Unknown keys,
/// malformed values and invalid specs raise ConfigError naming the key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Applies one key to cfg (same rules as the file parser).
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Re-validates every nested spec; throws ConfigError.
void validate(const RunConfig& cfg);

/// Keys accepted by the parser, for help output.
const std::vector<std::string>& config_keys();

}  // namespace pensionopt
