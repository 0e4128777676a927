#include "fracsum/bench/report.hpp"

#include "fracsum/error.hpp"
#include "fracsum/expsum_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace fracsum::bench {

std::vector<EocRow> eoc(const std::vector<std::pair<double, double>>& errors)
{
    std::vector<EocRow> out;
    out.reserve(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i) {
        EocRow row;
        row.h = errors[i].first;
        row.error = errors[i].second;
        row.failed = std::isnan(row.error);
        if (i > 0) {
            const double prev_h = errors[i - 1].first;
            if (std::abs(prev_h / row.h - 2.0) > 1e-12)
                throw ShapeError("eoc: step sizes must halve from row to row");
            const double prev = errors[i - 1].second;
            if (!row.failed && !std::isnan(prev)) {
                if (row.error < prev && row.error > 0.0)
                    row.eoc = std::log2(prev / row.error);
                else
                    row.marker = true;
            }
        }
        out.push_back(row);
    }
    return out;
}

std::string fmt_sci(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

std::string fmt_fixed2(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

CsvTable eoc_table(const std::vector<EocRow>& rows)
{
    CsvTable t;
    t.header = {"h", "error", "eoc"};
    for (const auto& r : rows) {
        std::string err = r.failed ? "" : fmt_sci(r.error);
        std::string e;
        if (r.failed)
            e = "failed";
        else if (r.marker)
            e = "***";
        else if (r.eoc)
            e = fmt_fixed2(*r.eoc);
        t.rows.push_back({format_shortest(r.h), err, e});
    }
    return t;
}

namespace {

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

void write_row(std::ostream& os, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            os << ',';
        os << quote(cells[i]);
    }
    os << '\n';
}

} // namespace

void write_csv(std::ostream& os, const CsvTable& table)
{
    write_row(os, table.header);
    for (const auto& r : table.rows)
        write_row(os, r);
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path, const std::string& meta)
{
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw IoError("cannot open '" + path.string() + "' for writing");
        write_csv(os, table);
        if (!os)
            throw IoError("write to '" + path.string() + "' failed");
    }
    if (!meta.empty()) {
        const std::filesystem::path mp = path.string() + ".meta";
        std::ofstream ms(mp, std::ios::binary);
        if (!ms)
            throw IoError("cannot open '" + mp.string() + "' for writing");
        ms << meta << '\n';
        if (!ms)
            throw IoError("write to '" + mp.string() + "' failed");
    }
}

} // namespace fracsum::bench
