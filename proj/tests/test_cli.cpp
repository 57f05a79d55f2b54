#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ovlb/ovlb.hpp"
#include "ovlb/serialize.hpp"

using namespace ovlb;
namespace fs = std::filesystem;

namespace {

struct Cli {
    fs::path dir;
    std::string bin;

    Cli() {
        const char* env = std::getenv("OVLB_CLI_BIN");
        REQUIRE(env != nullptr);
        bin = env;
        dir = fs::temp_directory_path() /
              ("ovlb_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~Cli() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    int run(const std::string& args, const std::string& env_prefix = "") {
        const std::string cmd = "cd '" + dir.string() + "' && " + env_prefix + " '" + bin +
                                "' " + args + " > stdout.txt 2> stderr.txt";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(static_cast<unsigned>(rc));
    }

    std::string stdout_text() const { return read_text_file(path("stdout.txt")); }
    std::string stderr_text() const { return read_text_file(path("stderr.txt")); }

    static inline int counter = 0;
};

// Parse a bound/sweep CSV, skipping comment and header lines.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        rows.push_back(std::move(fields));
    }
    return rows;
}

void write_s3(const std::string& path) {
    SpectralModel S;
    S.eigenvalues = {-1.0, 0.0, 1.0};
    S.overlaps = {0.5, 0.3, 0.2};
    save_model(path, S);
}

} // namespace

TEST_CASE("gen-model writes ingestible self-described fixtures", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("gen-model --out fig1.json") == 0);
    const SpectralModel S = load_model(cli.path("fig1.json"));
    CHECK(S.levels() == 30);
    CHECK(S.eigenvalues.front() == -1.0);
    CHECK(S.overlaps.front() == Catch::Approx(0.4).margin(1e-12));

    const nlohmann::json j = parse_json(read_text_file(cli.path("fig1.json")), "fig1");
    REQUIRE(j.contains("metadata"));
    CHECK(j["metadata"]["generator"] == "cluster");
    CHECK(j["metadata"]["params"]["grid_count"] == 19);

    REQUIRE(cli.run("gen-model --gap 0.4 --out gap.json") == 0);
    const SpectralModel G = load_model(cli.path("gap.json"));
    CHECK(G.eigenvalues[1] - G.eigenvalues[0] == Catch::Approx(0.4).margin(1e-12));

    CHECK(cli.run("gen-model --gap 0.0 --out bad.json") == 2);
}

TEST_CASE("moments subcommand reproduces reference values", "[cli]") {
    Cli cli;
    {
        std::ofstream(cli.path("two.mat")) << "2\n0 0\n0 1\n";
        std::ofstream(cli.path("two.vec")) << "0.8660254037844386\n0.5\n";
    }
    REQUIRE(cli.run("moments --matrix two.mat --state two.vec --order 2 "
                    "--basis monomial --window none --out m.json") == 0);
    const MomentVector M = load_moments(cli.path("m.json"));
    CHECK(M.values[0] == 1.0);
    CHECK(M.values[1] == Catch::Approx(0.25).margin(1e-12));
    CHECK(M.values[2] == Catch::Approx(0.25).margin(1e-12));
    CHECK(cli.stdout_text().find("hankel") != std::string::npos);

    write_s3(cli.path("s3.json"));
    REQUIRE(cli.run("moments --model s3.json --order 3 --basis monomial "
                    "--window none --out s3m.json") == 0);
    const MomentVector S3 = load_moments(cli.path("s3m.json"));
    const std::vector<double> want{1.0, -0.3, 0.7, -0.3};
    for (std::size_t k = 0; k < want.size(); ++k)
        CHECK(S3.values[k] == Catch::Approx(want[k]).margin(1e-12));

    REQUIRE(cli.run("moments --model s3.json --order 0 --basis monomial "
                    "--window none --out m0.json") == 0);
    CHECK(load_moments(cli.path("m0.json")).values == std::vector<double>{1.0});
}

TEST_CASE("bound reproduces the exact-grid reference rows", "[cli]") {
    Cli cli;
    write_s3(cli.path("s3.json"));
    REQUIRE(cli.run("bound --model s3.json --degrees 1,2 --out b.csv") == 0);
    const auto rows = csv_rows(read_text_file(cli.path("b.csv")));
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[0][3]) == Catch::Approx(0.3).margin(1e-9));
    CHECK(std::stod(rows[1][3]) == Catch::Approx(0.65).margin(1e-9));
    CHECK(std::stod(rows[2][3]) == Catch::Approx(0.5).margin(1e-9));
    CHECK(std::stod(rows[3][3]) == Catch::Approx(0.5).margin(1e-9));
    for (const auto& r : rows) {
        CHECK(r[5] == "optimal");
        CHECK(r[4] == "0.0");  // exact grids certify trivially
    }

    // Sidecar carries config and coefficients for every row.
    const nlohmann::json side = parse_json(read_text_file(cli.path("b.json")), "sidecar");
    CHECK(side["config"]["command"] == "bound");
    REQUIRE(side["results"].size() == 4);
    CHECK(side["results"][0]["coefficients"].size() == 2);
}

TEST_CASE("generated models round-trip through the CLI pipeline", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("gen-model --out m.json") == 0);
    REQUIRE(cli.run("bound --model m.json --degrees 1..4 --out b.csv") == 0);

    // Same computation through the library must give identical numbers.
    const SpectralModel S = load_model(cli.path("m.json"));
    const ScalingWindow w =
        round_window_outward(S.eigenvalues.front(), S.eigenvalues.back());
    const MomentVector M = moments_from_spectrum(S, 4, MomentBasis::chebyshev, w);
    const ConstraintGrid grid = discretize(build_exact_indicator(S, {0}), w);
    const std::vector<BoundResult> lib = degree_sweep(M, grid, {1, 2, 3, 4});

    const auto rows = csv_rows(read_text_file(cli.path("b.csv")));
    REQUIRE(rows.size() == lib.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k][2] == format_double(lib[k].raw_value));
        CHECK(rows[k][3] == format_double(lib[k].clamped_value));
    }
}

TEST_CASE("targeting every level pins the bound at one", "[cli]") {
    Cli cli;
    write_s3(cli.path("s3.json"));
    REQUIRE(cli.run("bound --model s3.json --targets 0,1,2 --degrees 1,2 --out b.csv") == 0);
    for (const auto& r : csv_rows(read_text_file(cli.path("b.csv"))))
        CHECK(std::stod(r[3]) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("interval mode certifies end to end", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("gen-model --out m.json") == 0);
    REQUIRE(cli.run("bound --model m.json --mode intervals --degrees 1..5 --out iv.csv") == 0);
    const auto rows = csv_rows(read_text_file(cli.path("iv.csv")));
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) {
        CHECK(r[5] == "optimal");
        const double margin = std::stod(r[4]);
        CHECK(margin <= 1e-6);
        CHECK(margin >= 0.0);
    }
}

TEST_CASE("identical runs produce byte-identical outputs", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("gen-model --out m.json") == 0);
    const std::string args = "bound --model m.json --mode intervals --degrees 1..4";
    REQUIRE(cli.run(args + " --out a.csv --json a.json") == 0);
    REQUIRE(cli.run(args + " --out b.csv --json b.json") == 0);
    CHECK(read_text_file(cli.path("a.csv")) == read_text_file(cli.path("b.csv")));
    CHECK(read_text_file(cli.path("a.json")) == read_text_file(cli.path("b.json")));

    REQUIRE(cli.run("sweep --degrees 1..3 --out s1.csv") == 0);
    REQUIRE(cli.run("sweep --degrees 1..3 --out s2.csv") == 0);
    CHECK(read_text_file(cli.path("s1.csv")) == read_text_file(cli.path("s2.csv")));

    // Thread fan-out must not change a single value row.
    REQUIRE(cli.run("sweep --degrees 1..3 --out s3.csv", "OVLB_THREADS=4") == 0);
    CHECK(csv_rows(read_text_file(cli.path("s3.csv"))) ==
          csv_rows(read_text_file(cli.path("s1.csv"))));
}

TEST_CASE("sweep emits the long-form error table", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("sweep --gaps 0.1,0.4 --degrees 1..4 --out s.csv") == 0);
    const auto rows = csv_rows(read_text_file(cli.path("s.csv")));
    REQUIRE(rows.size() == 2 * 4 * 2);
    CHECK(rows[0][0] == "cluster-0.1");
    // Exact-grid sweeps: error non-increasing in degree per (system, direction).
    for (std::size_t k = 2; k < rows.size(); ++k) {
        if (rows[k][0] != rows[k - 2][0]) continue;
        CHECK(std::stod(rows[k][5]) <= std::stod(rows[k - 2][5]) + 1e-9);
    }
}

TEST_CASE("classic prints the comparator table", "[cli]") {
    Cli cli;
    REQUIRE(cli.run("classic --mean -0.3 --second 0.7 --e0 -1 --e1 0 --ed 1") == 0);
    const std::string out = cli.stdout_text();
    CHECK(out.find("eckart,0.3\n") != std::string::npos);
    CHECK(out.find("mora,0.4016") != std::string::npos);
    CHECK(out.find("first_order_upper,0.65\n") != std::string::npos);
    CHECK(out.find("trivial_lower,false\n") != std::string::npos);

    // Eigenstate input: zero variance is reported, not thrown.
    REQUIRE(cli.run("classic --mean -1 --second 1 --e0 -1 --e1 0 --ed 1") == 0);
    CHECK(cli.stdout_text().find("mora,undefined (zero variance)") != std::string::npos);

    write_s3(cli.path("s3.json"));
    REQUIRE(cli.run("classic --model s3.json --out t.csv") == 0);
    CHECK(read_text_file(cli.path("t.csv")).find("s,0.3\n") != std::string::npos);
}

TEST_CASE("failure paths use the documented exit codes", "[cli]") {
    Cli cli;
    CHECK(cli.run("bound --model nope.json --out b.csv") == 2);

    std::ofstream(cli.path("broken.json")) << "{ not json";
    CHECK(cli.run("bound --model broken.json --out b.csv") == 2);
    CHECK_FALSE(cli.stderr_text().empty());

    write_s3(cli.path("s3.json"));
    std::ofstream(cli.path("free.json"))
        << R"({"basis":"monomial","values":[1.0,-0.15,0.15,0.0]})";
    CHECK(cli.run("bound --moments free.json --model s3.json --degrees 3 --out u.csv") == 3);
    CHECK(cli.stderr_text().find("refine") != std::string::npos);

    CHECK(cli.run("bound --model s3.json --mode intervals --gamma-minus 0.7 --out g.csv") == 2);
    CHECK(cli.run("") == 2);  // a subcommand is required
}
