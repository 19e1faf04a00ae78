#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "torrank/census.hpp"
#include "torrank/cli.hpp"

using namespace torrank;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "torrank");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> tsv(const std::string& s) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string x;
        while (std::getline(ls, x, '\t')) f.push_back(x);
        rows.push_back(f);
    }
    return rows;
}

std::string tmpdir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("torrank-cli-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d.string();
}

}  // namespace

TEST_CASE("prime range parsing") {
    CHECK(parse_prime_range("5..60") == std::pair<i64, i64>{5, 60});
    CHECK(parse_prime_range("7") == std::pair<i64, i64>{7, 7});
    CHECK_THROWS_AS(parse_prime_range("5..x"), UsageError);
    CHECK_THROWS_AS(parse_prime_range(""), UsageError);
    CHECK_THROWS_AS(parse_prime_range("..9"), UsageError);
}

TEST_CASE("weights: Z/8 rows") {
    auto r = run({"weights", "--group", "8", "--primes", "5..60"});
    CHECK(r.code == kOk);
    auto rows = tsv(r.out);
    REQUIRE(rows.size() > 1);
    int checked = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const i64 p = std::stoll(rows[i][1]);
        CHECK(rows[i][4] != "FAIL");
        if (rows[i][3] == "-") continue;
        const i64 e = std::stoll(rows[i][3]);
        CHECK((e == 6 * p - 5 || e == 4 * p - 3));
        if (p == 17) CHECK(e == 6 * p - 5);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("weights: F_5 example and usage errors") {
    auto r = run({"weights", "--group", "7", "--primes", "5"});
    CHECK(r.code == kOk);
    CHECK(r.out.find("example\t7\t5\tW(2,1)=0 W(2,4)=12\tPASS") != std::string::npos);
    CHECK(run({"weights", "--group", "7", "--primes", "9..5"}).code == kUsageError);
    CHECK(run({"weights", "--group", "7", "--primes", "8..10"}).code == kUsageError);
    CHECK(run({"weights", "--group", "7", "--primes", "3..7"}).code == kUsageError);
    CHECK(run({"weights", "--group", "7"}).code == kUsageError);
    CHECK(run({"weights", "--group", "11", "--primes", "5"}).code == kUsageError);
    CHECK(run({"weights", "--group", "7", "--primes", "5", "--workers", "0"}).code == kUsageError);
    CHECK(run({"frobnicate"}).code == kUsageError);
}

TEST_CASE("weights: full tables to --out") {
    const auto d = tmpdir("w");
    auto r = run({"weights", "--group", "2", "--primes", "7", "--out", d + "/w.tsv"});
    CHECK(r.code == kOk);
    std::ifstream in(d + "/w.tsv");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == 49);
}

TEST_CASE("census: Z/2 summary, determinism and persistence") {
    const auto d = tmpdir("c");
    auto a = run({"census", "--group", "2", "--X", "1e6", "--cache", d});
    REQUIRE(a.code == kOk);
    auto j = nlohmann::json::parse(a.out);
    const auto& c = j["censuses"][0];
    CHECK(c["group"] == "2");
    CHECK(c["count"] == 3832);
    CHECK(c["ratio"].get<double>() == doctest::Approx(3832 / 3934.7104).epsilon(1e-5));
    CHECK(fs::exists(d + "/census-2-1000000.txt"));
    auto b = run({"census", "--group", "2", "--X", "1e6", "--cache", d});
    CHECK(b.out == a.out);
    // a damaged cache file is reported with its line
    {
        std::ofstream f(d + "/census-2-1000000.txt", std::ios::app);
        f << "12 oops\n";
    }
    auto e = run({"census", "--group", "2", "--X", "1e6", "--cache", d});
    CHECK(e.code == kUsageError);
    CHECK(e.err.find("census-2-1000000.txt:3833") != std::string::npos);
    CHECK(run({"census", "--group", "2", "--X", "0", "--cache", d}).code == kUsageError);
    CHECK(run({"census", "--group", "2", "--cache", d}).code == kUsageError);
}

TEST_CASE("census: local tallies at p = 7") {
    const auto d = tmpdir("l");
    auto r = run({"census", "--group", "5", "--X", "1e9", "--local", "7", "--cache", d});
    REQUIRE(r.code == kOk);
    auto j = nlohmann::json::parse(r.out);
    const auto& c = j["censuses"][0];
    std::map<std::string, i64> n;
    for (const auto& row : c["local"]) {
        CHECK(row["p"] == 7);
        n[row["condition"].get<std::string>()] = row["count"].get<i64>();
    }
    CHECK(n.size() == 6);
    CHECK(n["good"] + n["mult"] + n["additive"] == c["count"].get<i64>());
    CHECK(n["split"] + n["nonsplit"] == n["mult"]);
    CHECK(fs::exists(d + "/ap-cache.txt"));
    auto again = run({"census", "--group", "5", "--X", "1e9", "--local", "7", "--cache", d});
    CHECK(again.out == r.out);
    CHECK(run({"census", "--group", "5", "--X", "1e9", "--local", "9", "--cache", d}).code == kUsageError);
}

TEST_CASE("census: trivial group is every minimal curve") {
    const auto d = tmpdir("t");
    auto r = run({"census", "--group", "0", "--X", "1e4", "--cache", d});
    REQUIRE(r.code == kOk);
    i64 brute = 0;
    for (i64 A = -21; A <= 21; ++A)
        for (i64 B = -100; B <= 100; ++B)
            if (height_at_most(A, B, 10000) && is_minimal(A, B) && !is_singular(A, B)) ++brute;
    CHECK(nlohmann::json::parse(r.out)["censuses"][0]["count"].get<i64>() == brute);
}

TEST_CASE("rank-bounds rows") {
    auto m = tsv(run({"rank-bounds", "--moments", "1..4", "--group", "2"}).out);
    REQUIRE(m.size() == 5);
    CHECK(m[1][0] == "moment_bound");
    CHECK(m[1][3] == "19/2");
    CHECK(m[1][4] == "9.5");
    auto t = tsv(run({"rank-bounds", "--tail", "23", "--group", "2"}).out);
    CHECK(t[1][3] == "7/300");
    CHECK(t[1][4] == "0.0233333333333");
    auto v = run({"rank-bounds", "--tail", "10", "--group", "2"});
    CHECK(v.code == kOk);
    CHECK(v.out.find("vacuous") != std::string::npos);
    auto a = tsv(run({"rank-bounds", "--average", "--group", "7"}).out);
    CHECK(a[2][0] == "average_rank_bound");
    CHECK(a[2][3] == "121/2");
    CHECK(a[2][4] == "60.5");
    auto b = tsv(run({"rank-bounds", "--average", "--group", "2x2"}).out);
    CHECK(b[1][3] == "21/2");
    CHECK(run({"rank-bounds", "--moments", "1..4", "--group", "3"}).code == kUsageError);
    CHECK(run({"rank-bounds", "--tail", "x/y", "--group", "2"}).code == kUsageError);
}

TEST_CASE("rank-bounds: empirical sums from a census") {
    const auto d = tmpdir("s");
    auto r = run({"rank-bounds", "--group", "2", "--X", "1e6", "--cache", d});
    CHECK(r.code == kOk);
    CHECK(r.out.find("S2_target\t2\tX=1000000\t-\t-0.00154320987654") != std::string::npos);
}

TEST_CASE("verify: exit status follows the criteria") {
    const auto d = tmpdir("v");
    auto ok = run({"verify", "--quick", "--only", "4", "7", "9", "--cache", d, "--out", d + "/v.json"});
    CHECK(ok.code == kOk);
    CHECK(tsv(ok.out).size() == 3);
    auto j = nlohmann::json::parse(std::ifstream(d + "/v.json"));
    CHECK(j["pass"] == true);
    CHECK(j["criteria"].size() == 3);
    auto bad = run({"verify", "--quick", "--only", "13", "--cache", d});
    CHECK(bad.code == kVerifyFailed);
    CHECK(bad.out.rfind("criterion\t13\tFAIL", 0) == 0);
    CHECK(run({"verify", "--only", "16"}).code == kUsageError);
}
