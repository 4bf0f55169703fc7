#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "bkmr/csv.hpp"
#include "bkmr/rng.hpp"

using namespace bkmr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("bkmrvi_csv_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("written doubles round-trip exactly") {
    TempDir tmp;
    Rng rng(3);
    la::Matrix m(17, 3);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(i, j) = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform_below(8)) - 4.0);
    m(0, 0) = 0.1;            // classic non-representable decimal
    m(1, 1) = 1.0 / 3.0;
    m(2, 2) = 1e-300;

    const std::string path = tmp.file("roundtrip.csv");
    csv::write_numeric_csv(path, {"a", "b", "c"}, m);
    const csv::NumericTable t = csv::read_numeric_csv(path);
    REQUIRE(t.row_count() == m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            CHECK(t.columns[j][i] == m(i, j)); // bitwise equal
}

TEST_CASE("missing and malformed cells are rejected with line numbers") {
    TempDir tmp;
    const std::string path = tmp.file("bad.csv");
    {
        std::ofstream out(path);
        out << "a,b\n1,2\n3,\n4,notanumber\n5,6\n";
    }
    try {
        csv::read_numeric_csv(path);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("4") != std::string::npos);
    }
}

TEST_CASE("ragged rows and duplicate headers are rejected") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("ragged.csv"));
        out << "a,b\n1,2,3\n";
    }
    CHECK_THROWS_AS(csv::read_numeric_csv(tmp.file("ragged.csv")), InputError);
    {
        std::ofstream out(tmp.file("dup.csv"));
        out << "a,a\n1,2\n";
    }
    CHECK_THROWS_AS(csv::read_numeric_csv(tmp.file("dup.csv")), InputError);
    {
        std::ofstream out(tmp.file("empty.csv"));
        out << "a,b\n";
    }
    CHECK_THROWS_AS(csv::read_numeric_csv(tmp.file("empty.csv")), InputError);
    CHECK_THROWS_AS(csv::read_numeric_csv(tmp.file("missing.csv")), InputError);
}

TEST_CASE("column lookup by name") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("cols.csv"));
        out << "x,y,z\n1,2,3\n";
    }
    const csv::NumericTable t = csv::read_numeric_csv(tmp.file("cols.csv"));
    CHECK(t.column("y") == 1);
    CHECK_THROWS_AS(t.column("w"), InputError);
}

TEST_CASE("infinities are rejected as non-numeric data") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("inf.csv"));
        out << "a\ninf\n";
    }
    CHECK_THROWS_AS(csv::read_numeric_csv(tmp.file("inf.csv")), InputError);
}
