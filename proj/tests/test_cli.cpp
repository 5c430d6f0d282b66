#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ladreg/csv.hpp"
#include "ladreg/curves.hpp"
#include "ladreg/dataset.hpp"
#include "ladreg/errors.hpp"

using namespace ladreg;
namespace fs = std::filesystem;

namespace {

std::string workdir() {
    const char* env = std::getenv("LADREG_WORKDIR");
    const std::string dir = env ? env : "cli_scratch";
    fs::create_directories(dir);
    return dir;
}

const char* cli_path() { return std::getenv("LADREG_CLI"); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace

TEST_CASE("csv round trip preserves the dataset") {
    const ErrorModel model = make_iid();
    const Dataset data =
        synthesize_dataset(uniform_design(4, 15), default_test_curves(model), model, 77);
    const std::string path = workdir() + "/roundtrip.csv";
    export_csv(data, path);
    const Dataset back = ingest_csv(path);

    REQUIRE(back.subjects.size() == data.subjects.size());
    CHECK(back.a == data.a);
    CHECK(back.b == doctest::Approx(data.b));
    for (std::size_t i = 0; i < data.subjects.size(); ++i) {
        REQUIRE(back.subjects[i].x.size() == data.subjects[i].x.size());
        CHECK(back.subjects[i].id == data.subjects[i].id);
        for (std::size_t j = 0; j < data.subjects[i].x.size(); ++j) {
            CHECK(back.subjects[i].x[j] == data.subjects[i].x[j]);
            CHECK(back.subjects[i].y[j] == data.subjects[i].y[j]);
        }
    }
}

TEST_CASE("ingest canonicalizes shuffled rows") {
    const std::string sorted_path = workdir() + "/sorted.csv";
    const std::string shuffled_path = workdir() + "/shuffled.csv";
    write_file(sorted_path, "subject_id,x,y\na,0.1,1\na,0.5,2\nb,0.2,3\nb,0.9,4\n");
    write_file(shuffled_path, "subject_id,x,y\nb,0.9,4\na,0.5,2\nb,0.2,3\na,0.1,1\n");
    const Dataset a = ingest_csv(sorted_path);
    const Dataset b = ingest_csv(shuffled_path);
    REQUIRE(a.subjects.size() == b.subjects.size());
    for (std::size_t i = 0; i < a.subjects.size(); ++i) {
        CHECK(a.subjects[i].id == b.subjects[i].id);
        CHECK(a.subjects[i].x == b.subjects[i].x);
        CHECK(a.subjects[i].y == b.subjects[i].y);
    }
    CHECK(a.subjects[0].id == "a");  // subjects sorted by id
    CHECK(a.subjects[0].x[0] == 0.1);
}

TEST_CASE("ingest reports malformed rows with line numbers") {
    const std::string path = workdir() + "/bad.csv";
    write_file(path, "subject_id,x,y\na,0.1,1\na,zzz,2\n");
    try {
        ingest_csv(path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    write_file(path, "subject_id,x,y\na,0.1,inf\n");
    CHECK_THROWS_AS(ingest_csv(path), DataError);
    write_file(path, "subject_id,x,y\n");
    CHECK_THROWS_AS(ingest_csv(path), DataError);
    write_file(path, "x,y\na,1\n");
    CHECK_THROWS_AS(ingest_csv(path), DataError);
    CHECK_THROWS_AS(ingest_csv(workdir() + "/does_not_exist.csv"), DataError);
}

TEST_CASE("cli exit codes and status lines") {
    if (!cli_path()) {
        MESSAGE("LADREG_CLI not set; skipping");
        return;
    }
    const std::string dir = workdir();

    // Config errors -> 2.
    CHECK(run_cli("fit --input " + dir + "/none.csv --kernel gaussian --output " + dir +
                  "/x.csv") == 2);
    CHECK(run_cli("verify --target nonsense --output " + dir + "/x.csv") == 2);
    // Data errors -> 3.
    CHECK(run_cli("fit --input " + dir + "/none.csv --output " + dir + "/x.csv") == 3);
    // Help -> 0.
    CHECK(run_cli("--help") == 0);

    // Success path ends the file with STATUS=ok.
    const std::string sim = dir + "/sim_status.csv";
    CHECK(run_cli("simulate --subjects 3 --points 10 --seed 2 --output " + sim) == 0);
    const std::string content = slurp(sim);
    CHECK(content.find("STATUS=ok\n") == content.size() - 10);

    // Data error still leaves a STATUS line in the (partial) output.
    const std::string failed = dir + "/failed_out.csv";
    CHECK(run_cli("fit --input " + dir + "/none.csv --output " + failed) == 3);
    const std::string failed_content = slurp(failed);
    CHECK(failed_content.find("STATUS=error") != std::string::npos);
}

TEST_CASE("cli fit recovers a noise-free curve") {
    if (!cli_path()) {
        MESSAGE("LADREG_CLI not set; skipping");
        return;
    }
    const std::string dir = workdir();
    const std::string data_path = dir + "/noise_free.csv";
    {
        std::ostringstream rows;
        rows << "subject_id,x,y\n";
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 100; ++j) {
                const double x = (i + 4.0 * j + 1.0) / 401.0;
                rows << "s" << i << ',' << format_double(x) << ','
                     << format_double(std::sin(6.283185307179586 * x)) << '\n';
            }
        write_file(data_path, rows.str());
    }
    const std::string fit_path = dir + "/noise_free_fit.csv";
    REQUIRE(run_cli("fit --input " + data_path +
                    " --bandwidth-mu 0.08 --bandwidth-s 0.08 --grid 21 --output " + fit_path) ==
            0);

    std::ifstream in(fit_path);
    std::string line;
    std::getline(in, line);  // header
    int rows_checked = 0;
    while (std::getline(in, line) && line.rfind("STATUS", 0) != 0) {
        std::stringstream ss(line);
        std::string fx, fmu;
        std::getline(ss, fx, ',');
        std::getline(ss, fmu, ',');
        const double x = std::stod(fx);
        const double mu = std::stod(fmu);
        const double wb = 0.08 * 1.4142135623730951;
        double modulus = 0.0;
        for (double u = -wb; u <= wb; u += wb / 40.0)
            modulus = std::max(modulus, std::abs(std::sin(6.283185307179586 * (x + u)) -
                                                 std::sin(6.283185307179586 * x)));
        CHECK(std::abs(mu - std::sin(6.283185307179586 * x)) <= 3.0 * modulus + 1e-10);
        ++rows_checked;
    }
    CHECK(rows_checked == 21);
}

TEST_CASE("config file provides defaults, flags win") {
    if (!cli_path()) {
        MESSAGE("LADREG_CLI not set; skipping");
        return;
    }
    const std::string dir = workdir();
    const std::string cfg = dir + "/run.cfg";
    const std::string out_flag = dir + "/flag_wins.csv";
    write_file(cfg,
               "subjects = 4\npoints = 12\nseed = 9\noutput = " + dir + "/from_config.csv\n");

    // Output set by config.
    CHECK(run_cli("simulate --config " + cfg) == 0);
    CHECK(fs::exists(dir + "/from_config.csv"));
    const Dataset from_config = ingest_csv(dir + "/from_config.csv");
    CHECK(from_config.subjects.size() == 4);
    CHECK(from_config.subjects[0].x.size() == 12);

    // Explicit flag overrides the config value.
    CHECK(run_cli("simulate --config " + cfg + " --subjects 6 --output " + out_flag) == 0);
    const Dataset overridden = ingest_csv(out_flag);
    CHECK(overridden.subjects.size() == 6);

    // Same config + seed twice: byte identical.
    const std::string o1 = dir + "/det1.csv", o2 = dir + "/det2.csv";
    CHECK(run_cli("simulate --config " + cfg + " --output " + o1) == 0);
    CHECK(run_cli("simulate --config " + cfg + " --output " + o2) == 0);
    CHECK(slurp(o1) == slurp(o2));
}
