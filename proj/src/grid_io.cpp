#include "twotime/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "twotime/error.hpp"

namespace twotime {

namespace {

std::string axis_line(const Axis& a)
{
    return a.name + " " + format_value(a.lo) + " " + format_value(a.hi) + " " + std::to_string(a.count);
}

Axis parse_axis(const std::string& value)
{
    std::istringstream in(value);
    Axis a;
    std::string lo, hi;
    if (!(in >> a.name >> lo >> hi >> a.count))
        throw Error(ErrorKind::ParseError, "csv: malformed axis header '" + value + "'");
    a.lo = std::stod(lo);
    a.hi = std::stod(hi);
    return a;
}

double parse_value(const std::string& cell)
{
    if (cell == "nan")
        return std::nan("");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != cell.size() || cell.empty())
        throw Error(ErrorKind::ParseError, "csv: bad value '" + cell + "'");
    return v;
}

} // namespace

std::string format_value(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string format_csv(const FieldGrid& grid, const GridMeta& meta)
{
    std::string out;
    out.reserve(grid.values.size() * 20 + 256);
    out += "# kind: ";
    out += to_string(grid.kind);
    out += "\n# normalization: ";
    out += to_string(grid.normalization);
    out += "\n# rows: " + axis_line(grid.rows) + "\n# cols: " + axis_line(grid.cols) + "\n";
    for (const auto& [key, value] : meta)
        out += "# " + key + ": " + value + "\n";
    for (std::size_t i = 0; i < grid.rows.count; ++i) {
        for (std::size_t j = 0; j < grid.cols.count; ++j) {
            if (j)
                out += ',';
            out += format_value(grid(i, j));
        }
        out += '\n';
    }
    return out;
}

FieldGrid parse_csv(const std::string& text, GridMeta* meta)
{
    FieldGrid grid;
    bool have_rows = false, have_cols = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto colon = line.find(": ");
            if (line.size() < 2 || colon == std::string::npos)
                throw Error(ErrorKind::ParseError, "csv: malformed header '" + line + "'");
            const std::string key = line.substr(2, colon - 2);
            const std::string value = line.substr(colon + 2);
            if (key == "rows") {
                grid.rows = parse_axis(value);
                have_rows = true;
            } else if (key == "cols") {
                grid.cols = parse_axis(value);
                have_cols = true;
            } else if (key == "kind") {
                for (FieldKind k : {FieldKind::Pdf, FieldKind::J1, FieldKind::J2, FieldKind::Residual})
                    if (value == to_string(k))
                        grid.kind = k;
            } else if (key == "normalization") {
                grid.normalization = value == "max1" ? Normalization::Max1 : Normalization::Raw;
            } else if (meta) {
                meta->emplace_back(key, value);
            }
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        std::size_t n = 0;
        while (std::getline(cells, cell, ',')) {
            grid.values.push_back(parse_value(cell));
            ++n;
        }
        if (have_cols && n != grid.cols.count)
            throw Error(ErrorKind::ParseError, "csv: row has " + std::to_string(n) + " cells, expected " +
                                                   std::to_string(grid.cols.count));
    }
    if (!have_rows || !have_cols)
        throw Error(ErrorKind::ParseError, "csv: missing axis headers");
    if (grid.values.size() != grid.rows.count * grid.cols.count)
        throw Error(ErrorKind::ParseError, "csv: row count does not match the rows header");
    return grid;
}

std::string format_pgm(const FieldGrid& grid, const std::string& comment)
{
    double peak = 0.0;
    for (double v : grid.values)
        if (std::isfinite(v))
            peak = std::max(peak, std::abs(v));
    std::string out = "P2\n";
    if (!comment.empty())
        out += "# " + comment + "\n";
    out += std::to_string(grid.cols.count) + " " + std::to_string(grid.rows.count) + "\n65535\n";
    for (std::size_t r = grid.rows.count; r-- > 0;) {
        for (std::size_t j = 0; j < grid.cols.count; ++j) {
            const double v = grid(r, j);
            long level = 0;
            if (peak > 0.0 && std::isfinite(v))
                level = std::lround(std::abs(v) / peak * 65535.0);
            if (j)
                out += ' ';
            out += std::to_string(level);
        }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw Error(ErrorKind::IoError, "cannot create '" + path.parent_path().string() + "': " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::IoError, "cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.close();
        if (!out) {
            fs::remove(tmp, ec);
            throw Error(ErrorKind::IoError, "write to '" + tmp.string() + "' failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot rename onto '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace twotime
