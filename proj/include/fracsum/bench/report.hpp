#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fracsum::bench {

struct EocRow
{
    double h = 0.0;
    double error = 0.0;
    std::optional<double> eoc;  ///< log2(E(2h)/E(h)); empty on the first row
    bool marker = false;        ///< error did not decrease ("***")
    bool failed = false;        ///< the solve for this h threw
};

/// Rows in the given order; each EOC compares a row with the one before it
/// (step 2h). Throws ShapeError unless h halves from row to row.
/// Rows flagged as failed should be passed with a NaN error.
std::vector<EocRow> eoc(const std::vector<std::pair<double, double>>& errors);

/// Plain table rendered as RFC 4180 CSV.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string fmt_sci(double x);   ///< "%.6e"
std::string fmt_fixed2(double x); ///< "%.2f"

CsvTable eoc_table(const std::vector<EocRow>& rows);

void write_csv(std::ostream& os, const CsvTable& table);

/// Writes path and, when meta is non-empty, a one-line sidecar path + ".meta".
/// Throws IoError with the path on failure.
void emit_csv(const CsvTable& table, const std::filesystem::path& path,
              const std::string& meta = {});

} // namespace fracsum::bench
