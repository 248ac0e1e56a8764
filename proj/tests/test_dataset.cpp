#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "mgm/dataset.hpp"
#include "mgm/util.hpp"

using namespace mgm;
using namespace mgm::test;

namespace {

const char* kSchema3 =
    "variable a continuous\n"
    "variable b continuous\n"
    "variable g discrete levels no,yes baseline no\n";

Dataset small_dataset(const std::string& csv, const std::string& schema_text = kSchema3) {
    const auto dir = temp_dir("dataset");
    write_file(dir / "schema.txt", schema_text);
    write_file(dir / "data.csv", csv);
    return load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string());
}

}  // namespace

TEST_CASE("load keeps complete rows") {
    const Dataset ds = small_dataset("a,b,g\n1,2,no\n2,3,yes\n3,4,no\n4,5,yes\n5,6,no\n");
    CHECK(ds.n() == 5);
    CHECK(ds.p() == 2);
    CHECK(ds.q() == 1);
    CHECK(ds.y()(1, 0) == 1);
    CHECK(ds.transform_log().front().params == "rows=0");
}

TEST_CASE("a blank cell drops the row and is counted") {
    const Dataset ds = small_dataset("a,b,g\n1,2,no\n2,,yes\n3,4,no\n4,5,yes\n5,6,no\n");
    CHECK(ds.n() == 4);
    CHECK(ds.transform_log().front().op == "drop_missing");
    CHECK(ds.transform_log().front().params == "rows=1");
}

TEST_CASE("cohort-scale missingness: 5217 rows, 3705 complete") {
    // mirrors the cohort counts: 1512 rows carry a missing cell
    std::ostringstream csv;
    csv << "a,b,g\n";
    Rng rng(7);
    int incomplete = 0;
    for (int i = 0; i < 5217; ++i) {
        const bool damage = incomplete < 1512 && (5217 - i <= 1512 - incomplete || rng.bernoulli(0.29));
        if (damage) {
            ++incomplete;
            csv << i << ",," << (i % 2 ? "yes" : "no") << "\n";
        } else {
            csv << i << "," << i * 2 << "," << (i % 2 ? "yes" : "no") << "\n";
        }
    }
    REQUIRE(incomplete == 1512);
    const Dataset ds = small_dataset(csv.str());
    CHECK(ds.n() == 3705);
}

TEST_CASE("unknown column and undeclared level are fatal") {
    CHECK_THROWS_WITH_AS(small_dataset("a,b,g,zz\n1,2,no,3\n"),
                         doctest::Contains("unknown column"), DataError);
    CHECK_THROWS_WITH_AS(small_dataset("a,b,g\n1,2,maybe\n"),
                         doctest::Contains("undeclared level 'maybe'"), DataError);
    CHECK_THROWS_WITH_AS(small_dataset("a,b,g\n1,,no\n,2,yes\n"),
                         doctest::Contains("empty dataset"), DataError);
}

TEST_CASE("preprocess applies log2 before scaling") {
    const auto dir = temp_dir("prep");
    write_file(dir / "schema.txt",
               "variable v continuous log2\nvariable w continuous\n");
    write_file(dir / "data.csv", "v,w\n1,-1\n2,0\n4,1\n8,2\n");
    Dataset ds = load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string());
    const Dataset out = preprocess(ds);
    CHECK(out.has_transform("v", "log2"));
    // log2 gives 0,1,2,3; standardization then matches the z-scores of that
    const double m = 1.5, sd = std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0);
    for (int i = 0; i < 4; ++i)
        CHECK(out.x()(i, 0) == doctest::Approx((i - m) / sd).epsilon(1e-12));
}

TEST_CASE("a column already in standard units is unchanged") {
    const auto dir = temp_dir("prep_su");
    write_file(dir / "schema.txt", "variable v continuous\nvariable w continuous\n");
    write_file(dir / "data.csv", "v,w\n-1,5\n0,6\n1,7\n");
    const Dataset out = preprocess(load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string()));
    CHECK(out.x()(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));  // sample sd of [-1,0,1] is 1
    CHECK(out.x()(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.x()(2, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant column fails standardization") {
    const auto dir = temp_dir("prep_const");
    write_file(dir / "schema.txt", "variable v continuous\nvariable w continuous\n");
    write_file(dir / "data.csv", "v,w\n3,1\n3,2\n3,3\n");
    CHECK_THROWS_WITH_AS(
        preprocess(load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string())),
        doctest::Contains("zero variance under standardization"), DataError);
}

TEST_CASE("log2 of a non-positive cell is fatal and names the cell") {
    const auto dir = temp_dir("prep_log");
    write_file(dir / "schema.txt", "variable v continuous log2\nvariable w continuous\n");
    write_file(dir / "data.csv", "v,w\n1,1\n0,2\n4,3\n");
    CHECK_THROWS_WITH_AS(
        preprocess(load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string())),
        doctest::Contains("column v, row 2"), DataError);
}

TEST_CASE("preprocess standardization is idempotent") {
    const auto dir = temp_dir("prep_idem");
    write_file(dir / "schema.txt",
               "variable v continuous log2 center\nvariable w continuous\n");
    write_file(dir / "data.csv", "v,w\n1,4\n2,9\n4,1\n8,7\n3,2\n");
    const Dataset once =
        preprocess(load_dataset((dir / "data.csv").string(), (dir / "schema.txt").string()));
    const Dataset twice = preprocess(once);
    CHECK((twice.x() - once.x()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("split sizes follow the floor rule") {
    std::ostringstream csv;
    csv << "a,b,g\n";
    for (int i = 0; i < 3705; ++i) csv << i << "," << 2 * i + 1 << "," << (i % 3 ? "yes" : "no") << "\n";
    const Dataset ds = preprocess(small_dataset(csv.str()));
    const auto [train, test] = split_train_test(ds, {2.0 / 3.0, 11});
    CHECK(train.n() == 2470);
    CHECK(test.n() == 1235);

    const Dataset tiny = small_dataset("a,b,g\n1,4,no\n2,5,yes\n3,7,no\n");
    const auto [tr3, te3] = split_train_test(tiny, {2.0 / 3.0, 5});
    CHECK(tr3.n() == 2);
    CHECK(te3.n() == 1);
}

TEST_CASE("split is deterministic and rescales the test split with training statistics") {
    std::ostringstream csv;
    csv << "a,b,g\n";
    Rng rng(3);
    for (int i = 0; i < 200; ++i)
        csv << rng.normal(5.0, 2.0) << "," << rng.normal(-1.0, 0.5) << ","
            << (rng.bernoulli(0.4) ? "yes" : "no") << "\n";
    const Dataset ds = small_dataset(csv.str());
    const auto [tr1, te1] = split_train_test(ds, {0.7, 99});
    const auto [tr2, te2] = split_train_test(ds, {0.7, 99});
    CHECK(tr1.x() == tr2.x());
    CHECK(te1.y() == te2.y());

    // training columns are exactly standardized, test columns only through
    // the training statistics
    CHECK(std::abs(tr1.x().col(0).mean()) < 1e-12);
    CHECK(tr1.column_sds()[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(te1.x().col(0).mean()) > 1e-12);
    bool recorded = false;
    for (const auto& rec : te1.transform_log())
        if (rec.op == "standardize_train_stats") recorded = true;
    CHECK(recorded);
}

TEST_CASE("fraction outside (0,1) is rejected") {
    const Dataset ds = small_dataset("a,b,g\n1,4,no\n2,5,yes\n3,7,no\n");
    CHECK_THROWS_AS(split_train_test(ds, {1.0, 0}), UsageError);
    CHECK_THROWS_AS(split_train_test(ds, {0.0, 0}), UsageError);
}

TEST_CASE("csv round-trip preserves values") {
    std::ostringstream csv;
    csv << "a,b,g\n";
    Rng rng(17);
    for (int i = 0; i < 50; ++i)
        csv << format_double(rng.normal()) << "," << format_double(rng.normal() * 1e-7) << ","
            << (rng.bernoulli(0.5) ? "yes" : "no") << "\n";
    const Dataset ds = small_dataset(csv.str());
    const auto dir = temp_dir("roundtrip");
    write_file(dir / "schema.txt", kSchema3);
    ds.save_csv((dir / "copy.csv").string());
    const Dataset back = load_dataset((dir / "copy.csv").string(), (dir / "schema.txt").string());
    CHECK(back.y() == ds.y());  // level indices bit-for-bit
    CHECK((back.x() - ds.x()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("level frequencies and sds") {
    const Dataset ds = small_dataset("a,b,g\n1,2,no\n2,3,yes\n3,4,yes\n4,5,yes\n");
    const auto freq = ds.level_frequencies();
    CHECK(freq[0][0] == doctest::Approx(0.25));
    CHECK(freq[0][1] == doctest::Approx(0.75));
    CHECK(ds.column_sds()[0] == doctest::Approx(std::sqrt(5.0 / 3.0)));
}
