#include "relnewt/dataset.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "relnewt/errors.hpp"

namespace relnewt {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string join(const std::vector<std::string>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) s += ',';
        s += cols[i];
    }
    return s;
}

void append_vector(std::vector<std::string>& cols, const std::string& stem, int dim) {
    for (int i = 1; i <= dim; ++i) cols.push_back(stem + "_" + std::to_string(i));
}

std::vector<std::string> boundary_columns(int dim) {
    std::vector<std::string> cols{"theta0", "theta1"};
    append_vector(cols, "q0", dim);
    append_vector(cols, "q", dim);
    cols.push_back("s");
    append_vector(cols, "k", dim);
    append_vector(cols, "k0", dim);
    cols.push_back("l");
    return cols;
}

std::vector<std::string> scattering_columns(int dim) {
    std::vector<std::string> cols{"phi", "rho"};
    append_vector(cols, "vminus", dim);
    append_vector(cols, "xminus", dim);
    append_vector(cols, "a", dim);
    append_vector(cols, "b", dim);
    cols.push_back("chi");
    return cols;
}

std::vector<std::string> hodograph_columns(int dim, bool boundary_target) {
    std::vector<std::string> cols{"theta_zeta"};
    if (boundary_target)
        cols.push_back("theta_x");
    else
        append_vector(cols, "x", dim);
    cols.push_back("l");
    append_vector(cols, "k", dim);
    return cols;
}

[[noreturn]] void mismatch(int line, const std::string& what) {
    throw SchemaMismatch("line " + std::to_string(line) + ": " + what);
}

// Matches the header against the candidates, which must have pairwise
// distinct column lists. Returns the index of the matching candidate.
std::size_t match_header(const std::string& header,
                         const std::vector<std::vector<std::string>>& candidates) {
    std::vector<std::string> fields = split_line(header);
    for (const auto& cand : candidates)
        if (fields == cand) return static_cast<std::size_t>(&cand - candidates.data());
    // diagnose against the candidate with the matching column count
    for (const auto& cand : candidates) {
        if (fields.size() != cand.size()) continue;
        for (std::size_t i = 0; i < cand.size(); ++i)
            if (fields[i] != cand[i])
                mismatch(1, "unknown column '" + fields[i] + "' where '" + cand[i] +
                                "' was expected");
    }
    mismatch(1, "header has " + std::to_string(fields.size()) +
                    " columns, which matches no known schema");
}

double parse_field(const std::string& s, int line, const std::string& col) {
    if (s.empty()) mismatch(line, "empty field in column " + col);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        mismatch(line, "column " + col + " holds '" + s + "', which is not a number");
    return v;
}

using Table = std::vector<std::vector<double>>;

Table read_table(std::istream& in, const std::vector<std::vector<std::string>>& candidates,
                 std::size_t& which) {
    std::string line;
    if (!std::getline(in, line)) mismatch(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    which = match_header(line, candidates);
    const std::vector<std::string>& cols = candidates[which];

    Table rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != cols.size())
            mismatch(lineno, "expected " + std::to_string(cols.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        std::vector<double> row(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i)
            row[i] = parse_field(fields[i], lineno, cols[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_table(std::ostream& out, const std::vector<std::string>& cols,
                 const Table& rows) {
    out << join(cols) << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_value(row[i]);
        }
        out << '\n';
    }
}

void push_vec(std::vector<double>& row, const Vec& v, int dim) {
    for (int i = 0; i < dim; ++i) row.push_back(v[i]);
}

Vec pull_vec(const std::vector<double>& row, std::size_t& at, int dim) {
    Vec v = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) v[i] = row[at++];
    return v;
}

int dim_of(std::size_t candidate_index) { return candidate_index == 0 ? 2 : 3; }

void check_dim(int dim) {
    if (dim != 2 && dim != 3) throw ConfigError("datasets hold 2 or 3 dimensional rows");
}

} // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_boundary_csv(std::ostream& out, int dim, const std::vector<BoundaryRow>& rows) {
    check_dim(dim);
    Table table;
    table.reserve(rows.size());
    for (const BoundaryRow& r : rows) {
        std::vector<double> row{r.theta0, r.theta1};
        push_vec(row, r.d.q0, dim);
        push_vec(row, r.d.q, dim);
        row.push_back(r.d.s);
        push_vec(row, r.d.k, dim);
        push_vec(row, r.d.k0, dim);
        row.push_back(r.d.l);
        table.push_back(std::move(row));
    }
    write_table(out, boundary_columns(dim), table);
}

BoundaryCsv read_boundary_csv(std::istream& in) {
    std::size_t which = 0;
    Table table = read_table(in, {boundary_columns(2), boundary_columns(3)}, which);
    BoundaryCsv out;
    out.dim = dim_of(which);
    out.rows.reserve(table.size());
    for (const auto& row : table) {
        BoundaryRow r;
        std::size_t at = 0;
        r.theta0 = row[at++];
        r.theta1 = row[at++];
        r.d.q0 = pull_vec(row, at, out.dim);
        r.d.q = pull_vec(row, at, out.dim);
        r.d.s = row[at++];
        r.d.k = pull_vec(row, at, out.dim);
        r.d.k0 = pull_vec(row, at, out.dim);
        r.d.l = row[at++];
        out.rows.push_back(r);
    }
    return out;
}

void write_scattering_csv(std::ostream& out, int dim,
                          const std::vector<ScatteringRow>& rows) {
    check_dim(dim);
    Table table;
    table.reserve(rows.size());
    for (const ScatteringRow& r : rows) {
        std::vector<double> row{r.phi, r.rho};
        push_vec(row, r.d.v_minus, dim);
        push_vec(row, r.d.x_minus, dim);
        push_vec(row, r.d.a, dim);
        push_vec(row, r.d.b, dim);
        row.push_back(static_cast<double>(r.d.chi));
        table.push_back(std::move(row));
    }
    write_table(out, scattering_columns(dim), table);
}

ScatteringCsv read_scattering_csv(std::istream& in) {
    std::size_t which = 0;
    Table table = read_table(in, {scattering_columns(2), scattering_columns(3)}, which);
    ScatteringCsv out;
    out.dim = dim_of(which);
    out.rows.reserve(table.size());
    for (const auto& row : table) {
        ScatteringRow r;
        std::size_t at = 0;
        r.phi = row[at++];
        r.rho = row[at++];
        r.d.v_minus = pull_vec(row, at, out.dim);
        r.d.x_minus = pull_vec(row, at, out.dim);
        r.d.a = pull_vec(row, at, out.dim);
        r.d.b = pull_vec(row, at, out.dim);
        r.d.chi = static_cast<int>(row[at++]);
        out.rows.push_back(r);
    }
    return out;
}

void write_hodograph_csv(std::ostream& out, const HodographField& field) {
    bool boundary = field.target == HodographField::Target::boundary;
    int dim = 2;
    Table table;
    table.reserve(field.nodes.size());
    for (const HodographNode& n : field.nodes) {
        std::vector<double> row{n.theta_zeta};
        if (boundary)
            row.push_back(n.theta_x);
        else
            push_vec(row, n.x, dim);
        row.push_back(n.l);
        push_vec(row, n.k, dim);
        table.push_back(std::move(row));
    }
    write_table(out, hodograph_columns(dim, boundary), table);
}

HodographCsv read_hodograph_csv(std::istream& in) {
    std::vector<std::vector<std::string>> candidates{
        hodograph_columns(2, true), hodograph_columns(3, true),
        hodograph_columns(2, false), hodograph_columns(3, false)};
    std::size_t which = 0;
    Table table = read_table(in, candidates, which);
    HodographCsv out;
    out.boundary_target = which < 2;
    out.dim = (which % 2 == 0) ? 2 : 3;
    out.rows.reserve(table.size());
    for (const auto& row : table) {
        HodographRow r;
        std::size_t at = 0;
        r.theta_zeta = row[at++];
        if (out.boundary_target)
            r.theta_x = row[at++];
        else
            r.x = pull_vec(row, at, out.dim);
        r.l = row[at++];
        r.k = pull_vec(row, at, out.dim);
        out.rows.push_back(r);
    }
    return out;
}

namespace {

template <class Fn>
auto with_path(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const SchemaMismatch& e) {
        throw SchemaMismatch(path + ": " + e.what());
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path + " for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    return out;
}

} // namespace

void save_boundary_csv(const std::string& path, int dim,
                       const std::vector<BoundaryRow>& rows) {
    auto out = open_out(path);
    write_boundary_csv(out, dim, rows);
}

BoundaryCsv load_boundary_csv(const std::string& path) {
    auto in = open_in(path);
    return with_path(path, [&] { return read_boundary_csv(in); });
}

void save_scattering_csv(const std::string& path, int dim,
                         const std::vector<ScatteringRow>& rows) {
    auto out = open_out(path);
    write_scattering_csv(out, dim, rows);
}

ScatteringCsv load_scattering_csv(const std::string& path) {
    auto in = open_in(path);
    return with_path(path, [&] { return read_scattering_csv(in); });
}

void save_hodograph_csv(const std::string& path, const HodographField& field) {
    auto out = open_out(path);
    write_hodograph_csv(out, field);
}

HodographCsv load_hodograph_csv(const std::string& path) {
    auto in = open_in(path);
    return with_path(path, [&] { return read_hodograph_csv(in); });
}

} // namespace relnewt
