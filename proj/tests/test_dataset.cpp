#include <cmath>
#include <string>

#include "doctest.h"

#include "coda/dataset.hpp"
#include "coda/errors.hpp"
#include "coda/rng.hpp"
#include "coda/simgen.hpp"
#include "coda/simplex.hpp"
#include "test_util.hpp"

using namespace coda;
using doctest::Approx;

namespace {

// A dataset in the shape of the simulation study: D parts, q of them zero for
// the first block.
CompositionalDataset study_shaped_dataset(std::size_t d, std::size_t q, std::size_t n_y,
                                          std::size_t n_z, std::uint64_t seed) {
    RandomStream rng(seed);
    const IlrDatasets ilr = testutil::random_ilr_pair(d, q, n_y, n_z, rng);
    return dataset_from_ilr(ilr.y_tilde, ilr.z_tilde, q);
}

bool datasets_close(const CompositionalDataset& a, const CompositionalDataset& b,
                    double tol) {
    if (a.q != b.q || a.n_y() != b.n_y() || a.n_z() != b.n_z()) return false;
    if (a.part_names != b.part_names) return false;
    return testutil::max_abs_diff(a.y_rows, b.y_rows) <= tol &&
           testutil::max_abs_diff(a.z_rows, b.z_rows) <= tol;
}

}  // namespace

TEST_CASE("load_csv without zeros puts everything in the Z block") {
    const std::string path = testutil::scratch_file("plain.csv");
    testutil::write_file(path,
                         "a,b,c\n"
                         "0.2,0.3,0.5\n"
                         "0.1,0.1,0.8\n"
                         "0.25,0.25,0.5\n"
                         "0.3,0.4,0.3\n");
    const CompositionalDataset ds = load_csv(path);
    CHECK(ds.q == 0);
    CHECK(ds.n_y() == 0);
    CHECK(ds.n_z() == 4);
    CHECK(ds.part_names == std::vector<std::string>{"a", "b", "c"});
    CHECK(ds.warnings.empty());
}

TEST_CASE("load_csv detects the structural-zero block") {
    const CompositionalDataset made = study_shaped_dataset(8, 2, 20, 20, 5);
    const std::string path = testutil::scratch_file("study.csv");
    write_csv(made, path);
    const CompositionalDataset ds = load_csv(path);
    CHECK(ds.q == 2);
    CHECK(ds.n_y() == 20);
    CHECK(ds.n_z() == 20);
    CHECK(datasets_close(made, ds, 1e-9));
}

TEST_CASE("zero columns are moved to the end") {
    const std::string path = testutil::scratch_file("reorder.csv");
    // Zero column in the middle; two Y rows, two Z rows.
    testutil::write_file(path,
                         "a,b,c,d\n"
                         "0.5,0,0.2,0.3\n"
                         "0.4,0,0.3,0.3\n"
                         "0.25,0.25,0.25,0.25\n"
                         "0.1,0.2,0.3,0.4\n");
    const CompositionalDataset ds = load_csv(path);
    CHECK(ds.q == 1);
    CHECK(ds.part_names == std::vector<std::string>{"a", "c", "d", "b"});
    CHECK(ds.n_y() == 2);
    CHECK(ds.y_rows(0, 0) == Approx(0.5).epsilon(1e-12));
    CHECK(ds.y_rows(0, 1) == Approx(0.2).epsilon(1e-12));
    // Z rows are reordered the same way.
    CHECK(ds.z_rows(1, 0) == Approx(0.1).epsilon(1e-12));
    CHECK(ds.z_rows(1, 1) == Approx(0.3).epsilon(1e-12));
    CHECK(ds.z_rows(1, 3) == Approx(0.2).epsilon(1e-12));
}

TEST_CASE("inconsistent zero patterns are rejected") {
    const std::string path = testutil::scratch_file("bad_pattern.csv");
    // Second Y-like row is zero on only one of the two zero columns.
    testutil::write_file(path,
                         "a,b,c,d,e\n"
                         "0.5,0.3,0.2,0,0\n"
                         "0.4,0.3,0.2,0.1,0\n"
                         "0.2,0.2,0.2,0.2,0.2\n"
                         "0.1,0.2,0.3,0.2,0.2\n");
    CHECK_THROWS_AS(load_csv(path), InconsistentZeroPattern);
}

TEST_CASE("declared zero parts act as a contract") {
    const std::string path = testutil::scratch_file("declared.csv");
    testutil::write_file(path,
                         "a,b,c,d\n"
                         "0.5,0.2,0.3,0\n"
                         "0.6,0.2,0.2,0\n"
                         "0.25,0.25,0.25,0.25\n"
                         "0.1,0.2,0.3,0.4\n");
    LoadOptions opts;
    opts.zero_parts = std::vector<std::string>{"d"};
    const CompositionalDataset ds = load_csv(path, opts);
    CHECK(ds.q == 1);
    CHECK(ds.n_y() == 2);

    // Declaring a different column makes the actual zeros violations.
    opts.zero_parts = std::vector<std::string>{"b"};
    CHECK_THROWS_AS(load_csv(path, opts), InconsistentZeroPattern);

    // Declaring a column that never vanishes leaves the Y block empty.
    const std::string no_zero_path = testutil::scratch_file("declared_none.csv");
    testutil::write_file(no_zero_path,
                         "a,b,c,d\n"
                         "0.25,0.25,0.25,0.25\n"
                         "0.1,0.2,0.3,0.4\n");
    opts.zero_parts = std::vector<std::string>{"d"};
    CHECK_THROWS_AS(load_csv(no_zero_path, opts), EmptyBlock);

    opts.zero_parts = std::vector<std::string>{"nope"};
    CHECK_THROWS_AS(load_csv(no_zero_path, opts), ConfigError);
}

TEST_CASE("parse and validation errors") {
    const std::string negative = testutil::scratch_file("negative.csv");
    testutil::write_file(negative, "a,b\n0.5,0.5\n-0.1,1.1\n");
    CHECK_THROWS_AS(load_csv(negative), NegativeEntry);

    const std::string ragged = testutil::scratch_file("ragged.csv");
    testutil::write_file(ragged, "a,b,c\n0.2,0.3,0.5\n0.5,0.5\n");
    CHECK_THROWS_AS(load_csv(ragged), ParseError);

    const std::string text = testutil::scratch_file("text.csv");
    testutil::write_file(text, "a,b\n0.5,half\n");
    CHECK_THROWS_AS(load_csv(text), ParseError);

    const std::string empty = testutil::scratch_file("empty.csv");
    testutil::write_file(empty, "");
    CHECK_THROWS_AS(load_csv(empty), ParseError);

    CHECK_THROWS_AS(load_csv(testutil::scratch_file("does_not_exist.csv")), ParseError);

    // All rows carrying zeros leaves the Z block empty.
    const std::string all_zero = testutil::scratch_file("all_zero.csv");
    testutil::write_file(all_zero, "a,b,c\n0.5,0.5,0\n0.6,0.4,0\n");
    CHECK_THROWS_AS(load_csv(all_zero), EmptyBlock);

    // A single Z row is not enough for a covariance.
    const std::string one_z = testutil::scratch_file("one_z.csv");
    testutil::write_file(one_z, "a,b,c\n0.5,0.5,0\n0.6,0.4,0\n0.2,0.3,0.5\n");
    CHECK_THROWS_AS(load_csv(one_z), TooFewRows);
}

TEST_CASE("raw counts are closed with a warning") {
    const std::string path = testutil::scratch_file("counts.csv");
    testutil::write_file(path,
                         "a,b,c\n"
                         "200,300,500\n"
                         "100,100,800\n");
    const CompositionalDataset ds = load_csv(path);
    REQUIRE(ds.warnings.size() == 1);
    CHECK(ds.z_rows(0, 0) == Approx(0.2).epsilon(1e-12));
    CHECK(ds.z_rows(1, 2) == Approx(0.8).epsilon(1e-12));
}

TEST_CASE("q annotation mismatch is an error") {
    const std::string path = testutil::scratch_file("bad_q.csv");
    testutil::write_file(path,
                         "# q=1\n"
                         "a,b,c\n"
                         "0.2,0.3,0.5\n"
                         "0.1,0.1,0.8\n");
    CHECK_THROWS_AS(load_csv(path), InconsistentZeroPattern);
}

TEST_CASE("round trip through write_csv is the identity") {
    for (std::uint64_t seed : {1ULL, 2ULL}) {
        const CompositionalDataset ds = study_shaped_dataset(6, 1, 8, 10, seed);
        const std::string path = testutil::scratch_file("rt_" + std::to_string(seed) + ".csv");
        write_csv(ds, path);
        CHECK(datasets_close(ds, load_csv(path), 1e-9));
    }

    // q=0 with a nonempty Y block survives via the n_y annotation.
    RandomStream rng(9);
    const IlrDatasets ilr = testutil::random_ilr_pair(5, 1, 6, 7, rng);
    // Rebuild with q=0: both blocks live on all 5 parts.
    const Matrix z_all = ilr.z_tilde;
    const CompositionalDataset ds0 = dataset_from_ilr(z_all, z_all, 0);
    const std::string path0 = testutil::scratch_file("rt_q0.csv");
    write_csv(ds0, path0);
    const CompositionalDataset back = load_csv(path0);
    CHECK(back.q == 0);
    CHECK(back.n_y() == ds0.n_y());
    CHECK(datasets_close(ds0, back, 1e-9));
}

TEST_CASE("ilr_transform_split shapes and values") {
    const CompositionalDataset ds = study_shaped_dataset(8, 2, 12, 15, 3);
    const IlrDatasets ilr = ilr_transform_split(ds);
    CHECK(ilr.y_tilde.rows() == 12);
    CHECK(ilr.y_tilde.cols() == 5);  // D-q-1
    CHECK(ilr.z_tilde.rows() == 15);
    CHECK(ilr.z_tilde.cols() == 7);  // D-1

    // Uniform rows map to the origin.
    Matrix uy(2, 2), uz(2, 3);
    for (std::size_t r = 0; r < 2; ++r) {
        uy(r, 0) = uy(r, 1) = 0.5;
        uz(r, 0) = uz(r, 1) = uz(r, 2) = 1.0 / 3.0;
    }
    const CompositionalDataset uniform = make_dataset(uy, uz, 1);
    const IlrDatasets u = ilr_transform_split(uniform);
    CHECK(u.y_tilde.max_abs() <= 1e-14);
    CHECK(u.z_tilde.max_abs() <= 1e-14);

    // D=3, q=1: the Y row (0.8, 0.2) has the scalar pivot coordinate.
    Matrix y1(2, 2), z1(2, 3);
    y1(0, 0) = 0.8; y1(0, 1) = 0.2;
    y1(1, 0) = 0.5; y1(1, 1) = 0.5;
    z1(0, 0) = 0.2; z1(0, 1) = 0.3; z1(0, 2) = 0.5;
    z1(1, 0) = 0.3; z1(1, 1) = 0.3; z1(1, 2) = 0.4;
    const IlrDatasets small = ilr_transform_split(make_dataset(y1, z1, 1));
    CHECK(small.y_tilde(0, 0) == Approx(0.980258143468547).epsilon(1e-10));

    // Per-row inverse reproduces the stored compositions.
    for (std::size_t r = 0; r < ds.n_y(); ++r) {
        const auto parts = detail::pivot_inverse(ilr.y_tilde.row(r));
        for (std::size_t j = 0; j < parts.size(); ++j)
            CHECK(std::fabs(parts[j] - ds.y_rows(r, j)) <= 1e-10);
    }
}

TEST_CASE("make_dataset rejects invalid block structure") {
    Matrix y(2, 3), z(3, 4);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t j = 0; j < 3; ++j) y(r, j) = 1.0 / 3.0;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t j = 0; j < 4; ++j) z(r, j) = 0.25;
    CHECK_NOTHROW(make_dataset(y, z, 1));
    CHECK_THROWS_AS(make_dataset(y, z, 3), DimensionTooSmall);   // q > D-2
    CHECK_THROWS_AS(make_dataset(Matrix(0, 3), z, 1), EmptyBlock);
    CHECK_THROWS_AS(make_dataset(y, Matrix(0, 4), 1), EmptyBlock);
    Matrix y1(1, 3);
    for (std::size_t j = 0; j < 3; ++j) y1(0, j) = 1.0 / 3.0;
    CHECK_THROWS_AS(make_dataset(y1, z, 1), TooFewRows);
}
