#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace desclab {

// One row of the persisted schema:
//   name,variant,m,rho,n,replicates,estimate,stderr,reference,provenance,pass
// NaN-valued floats serialize as empty fields; pass < 0 means "no verdict".
// A row with a reference must name where the reference comes from.
struct ResultRow {
    std::string name;
    std::string variant;
    int m = 0;
    double rho = 0.0;
    int64_t n = 0;
    int64_t replicates = 0;
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();
    std::string provenance;
    double tolerance = 0.0;  // joins the provenance column as "|tol=..."
    int pass = -1;

    bool operator==(const ResultRow& other) const;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    bool operator==(const ResultTable& other) const { return rows == other.rows; }
};

struct VerificationReport {
    ResultTable table;
    bool all_pass() const;
};

enum class OutputFormat { csv, json };
OutputFormat format_from_name(const std::string& name);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);
std::string serialize(const ResultTable& table, OutputFormat format);

ResultTable parse_csv(const std::string& text);
ResultTable parse_json(const std::string& text);

void write_results(const ResultTable& table, const std::string& path,
                   OutputFormat format);
ResultTable read_results(const std::string& path);

void pretty_print(const ResultTable& table, std::ostream& out);

} // namespace desclab
