#ifndef CHEBPINT_TOOLS_RESULTS_IO_HPP
#define CHEBPINT_TOOLS_RESULTS_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace chebpint::cli
{

/// One line of experiment output. Unset reals are NaN.
struct ResultRow
{
    std::string experiment;
    int n = 0;
    long long m = 0;
    int workers = 1;
    double error;
    double cond2;
    double residual;
    int iterations = 0;
    double t_assembly;
    double t_step_a;
    double t_step_b;
    double t_step_c;
    double t_wall;
    double speedup;
    double strong_eff;
    double weak_eff;
    /// Command-specific columns; every row of a run carries the same keys.
    std::vector<std::pair<std::string, double>> extras;

    ResultRow();

    void set_extra(const std::string& key, double value);
    double extra(const std::string& key) const;
};

bool same_values(const ResultRow& a, const ResultRow& b);

struct ResultSet
{
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<ResultRow> rows;
};

/// Shortest round-trip scientific form ("1.5e-03"); "nan", "inf", "-inf".
std::string format_double(double value);
/// Inverse of format_double. Throws std::invalid_argument.
double parse_double(const std::string& text);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

void write_json(std::ostream& os, const ResultSet& set);
ResultSet read_json(std::istream& is);

} // namespace chebpint::cli

#endif // CHEBPINT_TOOLS_RESULTS_IO_HPP
