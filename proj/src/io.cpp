#include "cheblat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace cheblat {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::random_device rd;
    auto tmp = path;
    tmp += ".tmp" + std::to_string(rd());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& row) {
    row.clear();
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) end = line.size();
        std::string field = line.substr(pos, end - pos);
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        if (a == std::string::npos) return false;
        field = field.substr(a, b - a + 1);
        std::size_t used = 0;
        try {
            row.push_back(std::stod(field, &used));
        } catch (const std::exception&) {
            return false;
        }
        if (used != field.size()) return false;
        pos = end + 1;
    }
    return true;
}

}  // namespace

std::vector<std::vector<double>> read_csv_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::vector<double> row;
    int lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        if (!parse_row(line, row)) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw std::runtime_error("malformed CSV at line " + std::to_string(lineno));
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                     " fields, expected " + std::to_string(rows.front().size()));
        rows.push_back(row);
    }
    return rows;
}

namespace {

void write_header(std::ostream& os, char prefix, int d, const std::string& last) {
    for (int a = 0; a < d; ++a) os << (a ? "," : "") << prefix << (a + 1);
    if (!last.empty()) os << ',' << last;
    os << '\n';
}

}  // namespace

void write_points_csv(std::ostream& os, const ChebyshevLattice& lat) {
    const int d = lat.dim();
    write_header(os, 'x', d, "");
    for (const auto& p : lat.points()) {
        for (int a = 0; a < d; ++a) os << (a ? "," : "") << format_double(p[a]);
        os << '\n';
    }
}

void write_samples_csv(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> values,
                       const std::string& value_name) {
    if (values.size() != lat.size()) throw std::invalid_argument("write_samples_csv: value count mismatch");
    const int d = lat.dim();
    write_header(os, 'x', d, value_name);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        for (int a = 0; a < d; ++a) os << format_double(lat.points()[i][a]) << ',';
        os << format_double(values[i]) << '\n';
    }
}

std::vector<double> read_samples_csv(std::istream& in, const ChebyshevLattice& lat) {
    const auto rows = read_csv_rows(in);
    const int d = lat.dim();
    if (rows.size() != lat.size()) {
        throw std::runtime_error("sample file has " + std::to_string(rows.size()) + " records, lattice has " +
                                 std::to_string(lat.size()) + " points");
    }
    std::vector<double> out(lat.size());
    if (rows.empty()) return out;
    if (rows.front().size() == 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][0];
        return out;
    }
    if (rows.front().size() != static_cast<std::size_t>(d) + 1) {
        throw std::runtime_error("sample rows need 1 or " + std::to_string(d + 1) + " columns");
    }
    const auto key = [d](const double* x) {
        std::array<long long, 3> k{};
        for (int a = 0; a < d; ++a) k[a] = std::llround(x[a] * 1e9);
        return k;
    };
    std::map<std::array<long long, 3>, std::size_t> where;
    for (std::size_t i = 0; i < lat.size(); ++i) where[key(lat.points()[i].data())] = i;
    std::vector<char> seen(lat.size(), 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto it = where.find(key(rows[r].data()));
        if (it == where.end()) throw std::runtime_error("sample record " + std::to_string(r + 1) + " is not a lattice point");
        if (seen[it->second]++) throw std::runtime_error("sample record " + std::to_string(r + 1) + " repeats a point");
        out[it->second] = rows[r][d];
    }
    return out;
}

void write_coeffs_csv(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> coeffs) {
    if (coeffs.size() != lat.size()) throw std::invalid_argument("write_coeffs_csv: coefficient count mismatch");
    const int d = lat.dim();
    write_header(os, 'k', d, "value");
    for (std::size_t b = 0; b < lat.size(); ++b) {
        const auto& k = lat.basis()[b].index;
        for (int a = 0; a < d; ++a) os << k[a] << ',';
        os << format_double(coeffs[b]) << '\n';
    }
}

std::vector<double> read_coeffs_csv(std::istream& in, const ChebyshevLattice& lat) {
    const auto rows = read_csv_rows(in);
    const int d = lat.dim();
    std::vector<double> out(lat.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != static_cast<std::size_t>(d) + 1)
            throw std::runtime_error("coefficient rows need " + std::to_string(d + 1) + " columns");
        MultiIndex k = MultiIndex::zero(d);
        for (int a = 0; a < d; ++a) {
            const double v = rows[r][a];
            if (v < 0 || v != std::floor(v)) {
                throw std::runtime_error("coefficient record " + std::to_string(r + 1) + " has a non-integer index");
            }
            k[a] = static_cast<int>(v);
        }
        auto pos = lat.find(k);
        if (!pos || lat.basis()[*pos].index != k)
            throw std::runtime_error("coefficient record " + std::to_string(r + 1) + " is not a basis index");
        out[*pos] = rows[r][d];
    }
    return out;
}

void write_lattice_json(std::ostream& os, const ChebyshevLattice& lat, std::span<const double> coeffs) {
    if (!coeffs.empty() && coeffs.size() != lat.size())
        throw std::invalid_argument("write_lattice_json: coefficient count mismatch");
    const int d = lat.dim();
    os << "{\"family\":\"" << to_string(lat.family()) << "\",\"dim\":" << d << ",\"resolution\":" << lat.resolution()
       << ",\"npoints\":" << lat.size() << ",\"basis\":[";
    for (std::size_t b = 0; b < lat.size(); ++b) {
        os << (b ? ",[" : "[");
        for (int a = 0; a < d; ++a) os << (a ? "," : "") << lat.basis()[b].index[a];
        os << ']';
    }
    os << "],\"points\":[";
    for (std::size_t i = 0; i < lat.size(); ++i) {
        os << (i ? ",[" : "[");
        for (int a = 0; a < d; ++a) os << (a ? "," : "") << format_double(lat.points()[i][a]);
        os << ']';
    }
    os << "],\"sublattices\":[";
    for (std::size_t j = 0; j < lat.sublattices().size(); ++j) {
        const auto& s = lat.sublattices()[j];
        const auto counts = s.counts();
        const auto bounds = s.boundaries();
        os << (j ? ",{" : "{") << "\"counts\":[";
        for (std::size_t a = 0; a < counts.size(); ++a) os << (a ? "," : "") << counts[a];
        os << "],\"boundaries\":[";
        for (std::size_t a = 0; a < bounds.size(); ++a) os << (a ? ",\"" : "\"") << to_string(bounds[a]) << '"';
        os << "],\"offset\":" << lat.sublattice_begin(j) << '}';
    }
    os << ']';
    if (!coeffs.empty()) {
        os << ",\"coefficients\":[";
        for (std::size_t b = 0; b < coeffs.size(); ++b) os << (b ? "," : "") << format_double(coeffs[b]);
        os << ']';
    }
    os << "}\n";
}

}  // namespace cheblat
