#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qv/core.hpp"
#include "qv/montecarlo.hpp"
#include "qv/payoffs.hpp"
#include "qv/pricer.hpp"

namespace qv::cli {

enum ExitCode { kOk = 0, kUsage = 1, kNonConvergence = 2, kToleranceBreach = 3, kStrip = 4 };

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

enum class Method { Transform, MonteCarlo, Both };

struct RunConfig {
    ModelParams model;
    RatesSpec rates;
    MarketState market;
    ContractSpec contract;
    Method method = Method::Transform;
    QuadConfig quad;
    std::optional<Contour> contour;
    mc::McConfig mc;
    std::string output;  // report path; empty: default location
    std::string source;  // where the config came from
};

// INI document, sections [model] [rates] [market] [contract] [run]
// and optional [quadrature] [montecarlo] [output]. Unknown sections or
// keys are schema errors. Model validation (ModelRejected) is left to the
// caller.
RunConfig parse_config(std::istream& in, const std::string& source);
RunConfig load_config(const std::string& path);

std::string method_name(Method m);

// Delimited report: one '#' line carrying the volatile bits (timestamp,
// runtime), then stable '#' metadata, a column line and rows.
struct Report {
    std::string command;
    std::string volatile_line;
    std::vector<std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const;
};

struct Options {
    bool quiet = false;
    std::string out;  // explicit report path
    std::optional<std::int64_t> mc_paths;
    std::optional<std::uint64_t> seed;
};

struct Outcome {
    int code = kOk;
    Report report;
};

// Commands write human text to `human` (unless quiet) and return the report.
Outcome cmd_price(const RunConfig& cfg, const Options& opt, std::ostream& human);
Outcome cmd_greeks(const RunConfig& cfg, const Options& opt, std::ostream& human);
Outcome cmd_validate(const RunConfig& cfg, const Options& opt, std::ostream& human);
Outcome cmd_table(int id, const Options& opt, std::ostream& human);

// printed reference rows for one table
struct ReferenceRow {
    int table;
    std::string param;
    double value, monte_carlo, pde;
    std::optional<double> comparison;
};
std::vector<ReferenceRow> reference_rows(int table);
std::string reference_path();

// full command-line entry point
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace qv::cli
