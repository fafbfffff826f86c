#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ergphase/model.hpp"
#include "ergphase/phase.hpp"

using Catch::Matchers::WithinAbs;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the command-line tool through the shell, capturing both streams.
CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const std::string stem = "/tmp/ergphase_io_" + std::to_string(counter++);
    const std::string cmd = env_prefix + ERGPHASE_CLI_PATH " " + args + " >" + stem +
                            ".out 2>" + stem + ".err";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(stem + ".out");
    r.err = read_file(stem + ".err");
    std::filesystem::remove(stem + ".out");
    std::filesystem::remove(stem + ".err");
    return r;
}

// Last non-empty line of a CSV payload, split on commas.
std::vector<std::string> last_row(const std::string& csv) {
    std::vector<std::string> lines;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    REQUIRE(!lines.empty());
    std::vector<std::string> cells;
    std::istringstream row(lines.back());
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

TEST_CASE("free energy command prints frozen values", "[io]") {
    const CliResult origin = run_cli("free-energy --beta 0,0,0");
    REQUIRE(origin.exit_code == 0);
    CHECK(origin.out.find("# artifact=ergphase") == 0);
    CHECK(origin.out.find("# subcommand=free-energy") != std::string::npos);
    CHECK(origin.out.find("psi,u,value,second_derivative,global") != std::string::npos);
    const auto row = last_row(origin.out);
    REQUIRE(row.size() == 5);
    CHECK_THAT(std::stod(row[0]), WithinAbs(0.34657359027997264, 1e-12));
    CHECK_THAT(std::stod(row[1]), WithinAbs(0.5, 1e-10));
    CHECK(row[4] == "1");

    const CliResult edge = run_cli("free-energy --beta 1,0,0");
    REQUIRE(edge.exit_code == 0);
    CHECK_THAT(std::stod(last_row(edge.out)[1]),
               WithinAbs(0.88079707797788244406, 1e-10));
}

TEST_CASE("free energy command reports hypothesis violations", "[io]") {
    const CliResult r = run_cli("free-energy --beta 0,-1,0");
    CHECK(r.exit_code == 3);
    CHECK(r.out.empty());
    CHECK(r.err.find("error: kind=HypothesisViolation message=") == 0);
}

TEST_CASE("exact command at two vertices", "[io]") {
    const CliResult r = run_cli("exact --n 2 --beta 0,0,0");
    REQUIRE(r.exit_code == 0);
    const auto row = last_row(r.out);
    REQUIRE(row.size() == 4);
    CHECK_THAT(std::stod(row[0]), WithinAbs(0.17328679513998633, 1e-12));

    const CliResult custom = run_cli(
        "exact --n 3 --beta 0.3,-0.2,0.4 --h2 '3; 0-1,1-2,0-2' "
        "--h3 '5; 0-1,1-2,2-3,3-4,0-4'");
    REQUIRE(custom.exit_code == 0);
    CHECK_THAT(std::stod(last_row(custom.out)[0]),
               WithinAbs(0.34718021658726734566, 1e-12));

    const CliResult too_big = run_cli("exact --n 7 --beta 0,0,0");
    CHECK(too_big.exit_code == 5);
    CHECK(too_big.err.find("kind=ResourceError") != std::string::npos);
}

TEST_CASE("figure catalogue bounds", "[io]") {
    const CliResult r = run_cli("figure --id 9");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error: kind=UnknownFigure") == 0);
    CHECK(run_cli("figure --id 0").exit_code == 2);
}

TEST_CASE("figure eight resolves the tie", "[io]") {
    const CliResult r = run_cli("figure --id 8 --resolution 2000 --format json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["manifest"]["beta2_nominal"] == "-2.95");
    const double resolved = std::stod(j["manifest"]["beta2"].get<std::string>());
    CHECK_THAT(resolved, WithinAbs(-2.9438937606636477259, 1e-6));

    // The library places two tied global maximizers at the resolved value.
    const ergphase::ModelSpec spec = ergphase::validate_spec(3, 5);
    const ergphase::MaximizerSet ms =
        ergphase::find_maximizers({2.0, resolved, 2.0}, spec);
    REQUIRE(ms.locals.size() == 2);
    CHECK(ms.globals.size() == 2);

    // The sampled profile shows both competing humps at nearly equal height.
    const auto& rows = j["rows"];
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double prev = rows[i - 1][1].get<double>();
        const double here = rows[i][1].get<double>();
        const double next = rows[i + 1][1].get<double>();
        if (here > prev && here > next) peaks.push_back(i);
    }
    REQUIRE(peaks.size() == 2);
    const double v0 = rows[peaks[0]][1].get<double>();
    const double v1 = rows[peaks[1]][1].get<double>();
    CHECK(std::fabs(v0 - v1) < 1e-4);
}

TEST_CASE("figure five shows the subdominant branch", "[io]") {
    const CliResult r = run_cli("figure --id 5 --format json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["manifest"]["beta2_nominal"] == "-3.24");
    const double resolved = std::stod(j["manifest"]["beta2"].get<std::string>());
    CHECK_THAT(resolved, WithinAbs(-3.2292396752176754253, 1e-6));

    double low_side = -1e300, high_side = -1e300;
    for (const auto& row : j["rows"]) {
        const double u = row[0].get<double>();
        const double value = row[1].get<double>();
        (u <= 0.8 ? low_side : high_side) = std::max(u <= 0.8 ? low_side : high_side, value);
    }
    CHECK(high_side < low_side);
}

TEST_CASE("sample command reruns byte for byte", "[io]") {
    const std::string args =
        "sample --n 6 --beta 0.2,0.1,0.1 --sweeps 30 --burn-in 5 --seed 42";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("# seed=42") != std::string::npos);
    CHECK(a.out.find("# rng=splitmix64") != std::string::npos);
    CHECK(a.out.find("sweep,t_edge,t_h2,t_h3") != std::string::npos);

    const CliResult c = run_cli(
        "sample --n 6 --beta 0.2,0.1,0.1 --sweeps 30 --burn-in 5 --seed 43");
    CHECK(a.out != c.out);
}

TEST_CASE("json output parses and echoes the manifest", "[io]") {
    const CliResult r = run_cli("free-energy --beta 0.2,0.1,0.1 --format json");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["manifest"]["artifact"] == "ergphase");
    CHECK(j["manifest"]["subcommand"] == "free-energy");
    CHECK(j["manifest"]["p"] == "3");
    CHECK(j["manifest"]["q"] == "5");
    CHECK(j["manifest"]["beta1"] == "0.2");
    CHECK(j["manifest"]["tol_tie_rel"] == "1e-09");
    CHECK_THAT(j["psi"].get<double>(), WithinAbs(0.497269658448972938, 1e-12));

    const CliResult again = run_cli("free-energy --beta 0.2,0.1,0.1 --format json");
    CHECK(r.out == again.out);
}

TEST_CASE("output destinations", "[io]") {
    const std::string out_path = "/tmp/ergphase_io_explicit.csv";
    std::filesystem::remove(out_path);
    const CliResult direct = run_cli("free-energy --beta 0,0,0 --out " + out_path);
    REQUIRE(direct.exit_code == 0);
    CHECK(direct.out.empty());
    CHECK(read_file(out_path).find("psi,u,value") != std::string::npos);
    std::filesystem::remove(out_path);

    const std::string dir = "/tmp/ergphase_io_outdir";
    std::filesystem::create_directories(dir);
    std::filesystem::remove(dir + "/free-energy.csv");
    const CliResult via_env =
        run_cli("free-energy --beta 0,0,0", "ERGPHASE_OUT_DIR=" + dir + " ");
    REQUIRE(via_env.exit_code == 0);
    CHECK(via_env.out.empty());
    CHECK(read_file(dir + "/free-energy.csv").find("psi,u,value") != std::string::npos);
    std::filesystem::remove_all(dir);

    const CliResult bad = run_cli("free-energy --beta 0,0,0 --out /nonexistent/x.csv");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("usage errors exit with code two", "[io]") {
    CHECK(run_cli("free-energy").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("no-such-command").exit_code == 2);

    const CliResult short_beta = run_cli("free-energy --beta 1,2");
    CHECK(short_beta.exit_code == 2);
    CHECK(short_beta.err.find("kind=UsageError") != std::string::npos);

    const CliResult text_beta = run_cli("free-energy --beta a,b,c");
    CHECK(text_beta.exit_code == 2);

    CHECK(run_cli("figure --id 4 --resolution 1").exit_code == 2);
    CHECK(run_cli("free-energy --beta 0,0,0 --format yaml").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("classify and observables records", "[io]") {
    const CliResult off = run_cli("classify --beta 2,-4,2");
    REQUIRE(off.exit_code == 0);
    CHECK(off.out.find("region,u_star,u_low,u_high,u0,transition") != std::string::npos);
    const auto row = last_row(off.out);
    CHECK(row[0] == "OffSurface");
    CHECK_THAT(std::stod(row[1]), WithinAbs(0.45876831405323235404, 1e-9));
    CHECK_THAT(std::stod(row[5]), WithinAbs(-2.9438937606636477259, 1e-6));

    const CliResult obs = run_cli("observables --beta 2,-4,2");
    REQUIRE(obs.exit_code == 0);
    CHECK(obs.out.find("hess_11") != std::string::npos);
    const auto obs_row = last_row(obs.out);
    REQUIRE(obs_row.size() == 15);
    CHECK(obs_row[0] == "OffSurface");
    CHECK(obs_row[1] == "0");

    const CliResult bad = run_cli("classify --beta 2,-4,-1");
    CHECK(bad.exit_code == 3);
    CHECK(bad.err.find("kind=DomainError") != std::string::npos);
}

TEST_CASE("surface and critical curve datasets", "[io]") {
    const CliResult surf =
        run_cli("surface --beta3 2,0 --beta1-min -3 --beta1-max -1 --beta1-count 3");
    REQUIRE(surf.exit_code == 0);
    std::istringstream in(surf.out);
    std::string line;
    std::vector<std::vector<double>> rows;
    bool past_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!past_header) {
            CHECK(line == "beta3,beta1,beta2,u_low,u_high,jump1,jump2,jump3");
            past_header = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 6);  // both slice values clear all three grid points
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool ordered = rows[i - 1][0] < rows[i][0] ||
                             (rows[i - 1][0] == rows[i][0] && rows[i - 1][1] < rows[i][1]);
        CHECK(ordered);
    }

    const CliResult rerun =
        run_cli("surface --beta3 2,0 --beta1-min -3 --beta1-max -1 --beta1-count 3");
    CHECK(surf.out == rerun.out);

    const CliResult curve = run_cli("critical-curve --samples 10 --format json");
    REQUIRE(curve.exit_code == 0);
    const auto j = nlohmann::json::parse(curve.out);
    REQUIRE(j["rows"].size() == 10);
    CHECK_THAT(j["rows"][0][3].get<double>(), WithinAbs(0.0, 1e-13));  // beta3 start
    CHECK_THAT(j["rows"][9][2].get<double>(), WithinAbs(0.0, 1e-13));  // beta2 end
}

TEST_CASE("universality record matches the library", "[io]") {
    const CliResult r = run_cli("universality --beta1 -5 --beta3 0");
    REQUIRE(r.exit_code == 0);
    const auto row = last_row(r.out);
    REQUIRE(row.size() == 4);
    CHECK_THAT(std::stod(row[3]), WithinAbs(2.269841964e-5, 5e-8));

    const CliResult above = run_cli("universality --beta1 0 --beta3 0");
    CHECK(above.exit_code == 3);
    CHECK(above.err.find("kind=DomainError") != std::string::npos);
}
