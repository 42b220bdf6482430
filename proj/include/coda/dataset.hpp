#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coda/matrix.hpp"

namespace coda {

// Two-block compositional dataset: the Y block holds observations whose last
// q parts are structural zeros (stored as closed subcompositions over the
// remaining D-q parts), the Z block holds full D-part observations. Part
// names are kept in the reordered layout (zero parts last).
struct CompositionalDataset {
    Matrix y_rows;                        // n_y x (D-q), each row sums to 1
    Matrix z_rows;                        // n_z x D, each row sums to 1
    std::size_t q = 0;                    // number of structural-zero parts
    std::vector<std::string> part_names;  // size D, zero parts last
    std::string provenance;
    std::vector<std::string> warnings;    // e.g. rows were closed from counts

    std::size_t n_parts() const { return part_names.size(); }
    std::size_t n_y() const { return y_rows.rows(); }
    std::size_t n_z() const { return z_rows.rows(); }
};

// Pivot-coordinate images of the two blocks.
struct IlrDatasets {
    Matrix y_tilde;  // n_y x (D-q-1)
    Matrix z_tilde;  // n_z x (D-1)
};

struct LoadOptions {
    // Explicit structural-zero part set (by column name). When given, the
    // detected zero pattern must match it exactly.
    std::optional<std::vector<std::string>> zero_parts;
};

// Validating constructor for in-memory data; rows are closed to unit sum and
// checked against the block invariants.
CompositionalDataset make_dataset(Matrix y_rows, Matrix z_rows, std::size_t q,
                                  std::vector<std::string> part_names = {},
                                  std::string provenance = "memory");

// Reads a dataset from CSV (header of part names, one observation per row,
// nonnegative entries). Columns that are zero in some row form the
// structural-zero set; every row must be zero on all of that set or none of
// it. Columns are reordered so zero parts come last and each row is closed
// to unit sum on its positive parts.
CompositionalDataset load_csv(const std::string& path, const LoadOptions& opts = {});

// Writes the reordered layout back to CSV with `# q=` / `# n_y=` comments;
// load_csv(write_csv(ds)) reproduces ds.
void write_csv(const CompositionalDataset& ds, const std::string& path);
void write_csv(const CompositionalDataset& ds, std::ostream& out);

// Maps the Y block by the (D-q)-part pivot transform and the Z block by the
// D-part pivot transform.
IlrDatasets ilr_transform_split(const CompositionalDataset& ds);

// Rebuilds compositions from pivot coordinates (used by fixture generation
// and the CLI inverse transform).
CompositionalDataset dataset_from_ilr(const Matrix& y_tilde, const Matrix& z_tilde,
                                      std::size_t q,
                                      std::vector<std::string> part_names = {},
                                      std::string provenance = "ilr");

}  // namespace coda
