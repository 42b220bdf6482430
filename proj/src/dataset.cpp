#include "coda/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "coda/errors.hpp"
#include "coda/simplex.hpp"

namespace coda {

namespace {

constexpr double kRowSumTolerance = 1e-6;  // beyond this, flag closure of raw counts

std::vector<std::string> default_names(std::size_t d) {
    std::vector<std::string> names(d);
    for (std::size_t i = 0; i < d; ++i) names[i] = "part_" + std::to_string(i + 1);
    return names;
}

// Closes each row to unit sum; returns true if any row deviated enough to
// look like raw counts rather than proportions.
bool close_rows(Matrix& rows) {
    bool flagged = false;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t j = 0; j < rows.cols(); ++j) {
            const double v = rows(r, j);
            if (!(v > 0.0) || !std::isfinite(v))
                throw NonPositiveEntry("row " + std::to_string(r + 1) +
                                       " has a non-positive part");
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumTolerance) flagged = true;
        for (std::size_t j = 0; j < rows.cols(); ++j) {
            rows(r, j) /= sum;
            if (rows(r, j) < Composition::kMinPart)
                throw NonPositiveEntry("row " + std::to_string(r + 1) +
                                       " underflows after closure");
        }
    }
    return flagged;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw ParseError("unterminated quote on line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& field, std::size_t line_no) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("non-numeric field '" + field + "' on line " +
                         std::to_string(line_no));
    return value;
}

void validate_blocks(const CompositionalDataset& ds) {
    const std::size_t d = ds.n_parts();
    if (d < 2) throw DimensionTooSmall("dataset needs at least 2 parts");
    if (ds.q > d - 2)
        throw DimensionTooSmall("Y block must keep at least 2 positive parts (q <= D-2)");
    if (ds.q >= 1 && ds.n_y() == 0)
        throw EmptyBlock("structural zeros declared but no rows carry them");
    if (ds.n_z() == 0)
        throw EmptyBlock("no rows without structural zeros");
    if (ds.q >= 1 && ds.n_y() < 2)
        throw TooFewRows("Y block needs at least 2 rows, got " + std::to_string(ds.n_y()));
    if (ds.n_z() < 2)
        throw TooFewRows("Z block needs at least 2 rows, got " + std::to_string(ds.n_z()));
    if (ds.n_y() > 0 && ds.y_rows.cols() != d - ds.q)
        throw DimensionMismatch("Y block width does not match D-q");
    if (ds.z_rows.cols() != d)
        throw DimensionMismatch("Z block width does not match D");
}

}  // namespace

CompositionalDataset make_dataset(Matrix y_rows, Matrix z_rows, std::size_t q,
                                  std::vector<std::string> part_names,
                                  std::string provenance) {
    CompositionalDataset ds;
    ds.z_rows = std::move(z_rows);
    ds.y_rows = std::move(y_rows);
    ds.q = q;
    ds.part_names = part_names.empty() ? default_names(ds.z_rows.cols())
                                       : std::move(part_names);
    ds.provenance = std::move(provenance);
    bool flagged = close_rows(ds.z_rows);
    if (ds.y_rows.rows() > 0) flagged = close_rows(ds.y_rows) || flagged;
    if (flagged)
        ds.warnings.push_back("rows were closed to unit sum (input looked like counts)");
    validate_blocks(ds);
    return ds;
}

CompositionalDataset load_csv(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::vector<std::string> names;
    std::vector<std::vector<double>> raw;
    std::optional<std::size_t> declared_q;
    std::optional<std::size_t> declared_ny;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 &&
            static_cast<unsigned char>(line[0]) == 0xEF)
            line.erase(0, 3);  // UTF-8 BOM
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            std::istringstream ss(body);
            std::string token;
            while (ss >> token) {
                if (token.rfind("q=", 0) == 0)
                    declared_q = std::stoul(token.substr(2));
                else if (token.rfind("n_y=", 0) == 0)
                    declared_ny = std::stoul(token.substr(4));
            }
            continue;
        }
        auto fields = split_csv_line(line, line_no);
        if (names.empty()) {
            names = fields;
            if (names.size() < 2)
                throw DimensionTooSmall("need at least 2 parts, got " +
                                        std::to_string(names.size()));
            continue;
        }
        if (fields.size() != names.size())
            throw ParseError("line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(names.size()));
        std::vector<double> row(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            row[j] = parse_number(fields[j], line_no);
            if (row[j] < 0.0)
                throw NegativeEntry("negative entry on line " + std::to_string(line_no));
        }
        raw.push_back(std::move(row));
    }
    if (names.empty()) throw ParseError("'" + path + "' has no header row");
    if (raw.empty()) throw ParseError("'" + path + "' has no data rows");

    const std::size_t d = names.size();

    // Structural-zero column set: declared explicitly or detected as every
    // column that is zero in some row.
    std::vector<bool> zero_col(d, false);
    if (opts.zero_parts) {
        for (const auto& part : *opts.zero_parts) {
            bool found = false;
            for (std::size_t j = 0; j < d; ++j)
                if (names[j] == part) { zero_col[j] = true; found = true; }
            if (!found)
                throw ConfigError("declared zero part '" + part + "' is not a column");
        }
    } else {
        for (const auto& row : raw)
            for (std::size_t j = 0; j < d; ++j)
                if (row[j] == 0.0) zero_col[j] = true;
    }
    std::size_t q = 0;
    for (bool z : zero_col) q += z ? 1 : 0;
    if (declared_q && *declared_q != q)
        throw InconsistentZeroPattern("file declares q=" + std::to_string(*declared_q) +
                                      " but the zero pattern gives q=" + std::to_string(q));
    if (q > d - 2)
        throw DimensionTooSmall("Y block must keep at least 2 positive parts (q <= D-2)");

    // Column order: positive parts first, zero parts last, relative order kept.
    std::vector<std::size_t> order;
    order.reserve(d);
    for (std::size_t j = 0; j < d; ++j)
        if (!zero_col[j]) order.push_back(j);
    for (std::size_t j = 0; j < d; ++j)
        if (zero_col[j]) order.push_back(j);

    std::vector<std::vector<double>> y_raw, z_raw;
    for (std::size_t r = 0; r < raw.size(); ++r) {
        std::size_t zeros_in_set = 0, zeros_outside = 0;
        for (std::size_t j = 0; j < d; ++j) {
            if (raw[r][j] != 0.0) continue;
            if (zero_col[j]) ++zeros_in_set;
            else ++zeros_outside;
        }
        if (zeros_outside > 0)
            throw InconsistentZeroPattern("data row " + std::to_string(r + 1) +
                                          " is zero outside the structural-zero set");
        if (zeros_in_set == 0) {
            std::vector<double> row(d);
            for (std::size_t j = 0; j < d; ++j) row[j] = raw[r][order[j]];
            z_raw.push_back(std::move(row));
        } else if (zeros_in_set == q) {
            std::vector<double> row(d - q);
            for (std::size_t j = 0; j < d - q; ++j) row[j] = raw[r][order[j]];
            y_raw.push_back(std::move(row));
        } else {
            throw InconsistentZeroPattern(
                "data row " + std::to_string(r + 1) + " is zero on " +
                std::to_string(zeros_in_set) + " of the " + std::to_string(q) +
                " structural-zero parts");
        }
    }

    // With no zero columns the split is not encoded in the data; honor the
    // n_y annotation written by write_csv so q=0 datasets round-trip.
    if (q == 0 && declared_ny && *declared_ny > 0) {
        if (*declared_ny > z_raw.size())
            throw ParseError("n_y annotation exceeds the number of rows");
        y_raw.assign(z_raw.begin(), z_raw.begin() + static_cast<long>(*declared_ny));
        z_raw.erase(z_raw.begin(), z_raw.begin() + static_cast<long>(*declared_ny));
    }
    if (q >= 1 && declared_ny && *declared_ny != y_raw.size())
        throw InconsistentZeroPattern("file declares n_y=" + std::to_string(*declared_ny) +
                                      " but " + std::to_string(y_raw.size()) +
                                      " rows carry the zero pattern");

    auto to_matrix = [](const std::vector<std::vector<double>>& rows, std::size_t cols) {
        Matrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t j = 0; j < cols; ++j) m(r, j) = rows[r][j];
        return m;
    };

    std::vector<std::string> ordered_names(d);
    for (std::size_t j = 0; j < d; ++j) ordered_names[j] = names[order[j]];

    return make_dataset(to_matrix(y_raw, d - q), to_matrix(z_raw, d), q,
                        std::move(ordered_names), path);
}

void write_csv(const CompositionalDataset& ds, std::ostream& out) {
    out << "# q=" << ds.q << "\n";
    out << "# n_y=" << ds.n_y() << "\n";
    for (std::size_t j = 0; j < ds.n_parts(); ++j)
        out << (j ? "," : "") << csv_quote(ds.part_names[j]);
    out << "\n";
    const std::size_t d = ds.n_parts();
    for (std::size_t r = 0; r < ds.n_y(); ++r) {
        for (std::size_t j = 0; j < d - ds.q; ++j)
            out << (j ? "," : "") << format_double(ds.y_rows(r, j));
        for (std::size_t j = 0; j < ds.q; ++j) out << ",0";
        out << "\n";
    }
    for (std::size_t r = 0; r < ds.n_z(); ++r) {
        for (std::size_t j = 0; j < d; ++j)
            out << (j ? "," : "") << format_double(ds.z_rows(r, j));
        out << "\n";
    }
}

void write_csv(const CompositionalDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_csv(ds, out);
}

IlrDatasets ilr_transform_split(const CompositionalDataset& ds) {
    IlrDatasets out;
    const std::size_t py = ds.n_parts() - ds.q - 1;
    out.y_tilde = Matrix(ds.n_y(), py);
    for (std::size_t r = 0; r < ds.n_y(); ++r) {
        const auto coords = detail::pivot_coords(ds.y_rows.row(r));
        for (std::size_t j = 0; j < py; ++j) out.y_tilde(r, j) = coords[j];
    }
    const std::size_t pz = ds.n_parts() - 1;
    out.z_tilde = Matrix(ds.n_z(), pz);
    for (std::size_t r = 0; r < ds.n_z(); ++r) {
        const auto coords = detail::pivot_coords(ds.z_rows.row(r));
        for (std::size_t j = 0; j < pz; ++j) out.z_tilde(r, j) = coords[j];
    }
    return out;
}

CompositionalDataset dataset_from_ilr(const Matrix& y_tilde, const Matrix& z_tilde,
                                      std::size_t q,
                                      std::vector<std::string> part_names,
                                      std::string provenance) {
    const std::size_t d = z_tilde.cols() + 1;
    if (y_tilde.rows() > 0 && y_tilde.cols() + q + 1 != d)
        throw DimensionMismatch("ilr block widths are inconsistent with q");
    Matrix y(y_tilde.rows(), d - q);
    for (std::size_t r = 0; r < y_tilde.rows(); ++r) {
        const auto parts = detail::pivot_inverse(y_tilde.row(r));
        for (std::size_t j = 0; j < d - q; ++j) y(r, j) = parts[j];
    }
    Matrix z(z_tilde.rows(), d);
    for (std::size_t r = 0; r < z_tilde.rows(); ++r) {
        const auto parts = detail::pivot_inverse(z_tilde.row(r));
        for (std::size_t j = 0; j < d; ++j) z(r, j) = parts[j];
    }
    return make_dataset(std::move(y), std::move(z), q, std::move(part_names),
                        std::move(provenance));
}

}  // namespace coda
