#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "pgt/bounds.hpp"
#include "pgt/design.hpp"
#include "pgt/dist.hpp"

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PGT_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) {
        result.out.append(buf, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

TEST_CASE("bounds subcommand prints library values bit for bit") {
    const auto res = run_cli("bounds --lambda 10 --n 1000");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "name,value,unit,assumptions");

    const pgt::TruncatedPoissonModel model(10.0, 1000);
    const auto regime = pgt::RegimeSpec::unbounded(0.1);

    // every printed value must round-trip to the exact library double
    const auto value_of = [&](const std::string& name) -> double {
        for (const auto& line : lines) {
            if (line.rfind(name + ",", 0) == 0) {
                const auto a = line.find(',');
                const auto b = line.find(',', a + 1);
                return std::strtod(line.substr(a + 1, b - a - 1).c_str(), nullptr);
            }
        }
        FAIL("row not found: " << name);
        return 0.0;
    };

    CHECK(value_of("fano_lb_asymptotic") == pgt::fano_lower_bound(10.0, 1000, 0.1)[0].value);
    CHECK(value_of("fano_lb_finite") == pgt::fano_lower_bound(10.0, 1000, 0.1)[1].value);
    const auto cons = pgt::constructive_upper_bounds(model, regime, 0);
    CHECK(value_of("method1_m") == cons[0].value);
    CHECK(value_of("method1_noisy_m") == cons[1].value);
    CHECK(value_of("method2_m") == cons[2].value);
    CHECK(value_of("source_entropy") == pgt::source_entropy(model).value);
    CHECK(value_of("adaptive_lb") == pgt::adaptive_lower_bound(10.0, 1000).value);
    CHECK(value_of("semiadaptive_ub") ==
          pgt::semiadaptive_upper_bound(model.mean(), 1000).value);
}

TEST_CASE("huffman subcommand") {
    const auto res = run_cli("huffman --lambda 1 --n 2");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].rfind("source_entropy,1.9219280948873", 0) == 0);
    CHECK(lines[2].rfind("huffman_expected_length,", 0) == 0);

    // n too large for the exact code
    CHECK(run_cli("huffman --lambda 1 --n 25").exit_code == 1);
}

TEST_CASE("exponent subcommand") {
    const auto res = run_cli("exponent --rho 0.5 --i 2 --d 3 --p 0.3 --m 500 --n 50");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].rfind("error_exponent,", 0) == 0);
    CHECK(lines[2].rfind("mutual_info_t1,", 0) == 0);
    CHECK(lines[3].rfind("ml_error_bound,", 0) == 0);

    const double eo = std::strtod(lines[1].substr(std::string("error_exponent,").size()).c_str(),
                                  nullptr);
    CHECK(eo == pgt::error_exponent(0.5, 2, 3, 0.3).value);
}

TEST_CASE("check-disjunct subcommand") {
    const auto id_path = temp_file("pgt_cli_identity.txt");
    pgt::identity_matrix(6).save_text(id_path.string());
    const auto yes = run_cli("check-disjunct --matrix " + id_path.string() + " --delta 2");
    CHECK(yes.exit_code == 0);
    CHECK(yes.out == "true\n");

    pgt::TestMatrix dup(2, 2);
    dup.set(0, 0, true);
    dup.set(0, 1, true);
    const auto dup_path = temp_file("pgt_cli_dup.txt");
    dup.save_text(dup_path.string());
    const auto no = run_cli("check-disjunct --matrix " + dup_path.string() + " --delta 1");
    CHECK(no.exit_code == 0);
    CHECK(no.out == "false\n");

    // error tolerance flag
    const auto tol = run_cli("check-disjunct --matrix " + id_path.string() + " --delta 2 --v 1");
    CHECK(tol.exit_code == 0);
    CHECK(tol.out == "false\n");

    // missing file is a diagnosed failure
    CHECK(run_cli("check-disjunct --matrix /nonexistent.txt --delta 1").exit_code == 1);

    // infeasible brute force budget
    const auto big_path = temp_file("pgt_cli_big.txt");
    pgt::bernoulli_matrix(10, 120, 0.2, 3).save_text(big_path.string());
    CHECK(run_cli("check-disjunct --matrix " + big_path.string() + " --delta 12").exit_code == 1);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("bounds --lambda 10").exit_code == 2);                 // missing --n
    CHECK(run_cli("frobnicate").exit_code == 2);                         // unknown subcommand
    CHECK(run_cli("bounds --lambda 10 --n 100 --bogus 1").exit_code == 2);
    CHECK(run_cli("simulate-semiadaptive --lambda 10 --n 100 --trials 5").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("simulation commands are deterministic and honor the CSV schema") {
    const std::string cmd =
        "simulate-nonadaptive --lambda 3 --n 60 --scheme method2 --trials 50 --seed 4";
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    const auto lines = split_lines(a.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] ==
          "scheme,lambda,n,m,trials,error_rate,ci_lo,ci_hi,mean_tests,"
          "fano_lb,adaptive_lb,semiadaptive_ub,seed");
    CHECK(lines[1].rfind("method2,3,60,", 0) == 0);

    const auto sa = run_cli("simulate-semiadaptive --lambda 10 --n 1000 --trials 100 --seed 1");
    const auto sb = run_cli("simulate-semiadaptive --lambda 10 --n 1000 --trials 100 --seed 1");
    REQUIRE(sa.exit_code == 0);
    CHECK(sa.out == sb.out);
    CHECK(split_lines(sa.out)[1].rfind("semiadaptive,10,1000,0,100,0.000000000,", 0) == 0);
}

TEST_CASE("trace files hold one JSON object per trial") {
    const auto trace_path = temp_file("pgt_cli_trace.jsonl");
    std::filesystem::remove(trace_path);
    const auto res = run_cli(
        "simulate-semiadaptive --lambda 5 --n 100 --trials 20 --seed 2 --trace " +
        trace_path.string());
    REQUIRE(res.exit_code == 0);

    std::ifstream is(trace_path);
    REQUIRE(is.good());
    std::string line;
    std::size_t count = 0;
    while (std::getline(is, line)) {
        const auto obj = nlohmann::json::parse(line);
        CHECK(obj.contains("trial"));
        CHECK(obj.contains("d_true"));
        CHECK(obj.contains("ok"));
        CHECK(obj.contains("tests"));
        CHECK(obj.contains("stages"));
        CHECK(obj.at("ok").get<bool>());
        ++count;
    }
    CHECK(count == 20);

    // nonadaptive traces carry the observed syndrome as a 0/1 string
    const auto na_trace = temp_file("pgt_cli_trace_na.jsonl");
    std::filesystem::remove(na_trace);
    const auto na = run_cli(
        "simulate-nonadaptive --lambda 2 --n 30 --scheme method1 --trials 5 --seed 3 --trace " +
        na_trace.string());
    REQUIRE(na.exit_code == 0);
    std::ifstream nis(na_trace);
    REQUIRE(nis.good());
    std::size_t na_count = 0;
    while (std::getline(nis, line)) {
        const auto obj = nlohmann::json::parse(line);
        REQUIRE(obj.contains("syndrome"));
        const auto syn = obj.at("syndrome").get<std::string>();
        CHECK(syn.size() == obj.at("tests").get<std::size_t>());
        CHECK(syn.find_first_not_of("01") == std::string::npos);
        ++na_count;
    }
    CHECK(na_count == 5);
}

TEST_CASE("json config files merge with flags, flags win") {
    const auto cfg_path = temp_file("pgt_cli_config.json");
    {
        std::ofstream os(cfg_path);
        os << R"({"lambda": 3.0, "n": 60, "scheme": "method2", "trials": 50})";
    }
    const auto from_file =
        run_cli("simulate-nonadaptive --seed 4 --config " + cfg_path.string());
    const auto from_flags =
        run_cli("simulate-nonadaptive --lambda 3 --n 60 --scheme method2 --trials 50 --seed 4");
    REQUIRE(from_file.exit_code == 0);
    CHECK(from_file.out == from_flags.out);

    // an explicit flag overrides the file value
    const auto overridden = run_cli("simulate-nonadaptive --seed 4 --trials 25 --config " +
                                    cfg_path.string());
    REQUIRE(overridden.exit_code == 0);
    const auto ofields = csv_fields(split_lines(overridden.out)[1]);
    CHECK(ofields[0] == "method2");
    CHECK(ofields[2] == "60");
    CHECK(ofields[4] == "25");

    // an array of configs becomes a multi-row sweep
    const auto sweep_path = temp_file("pgt_cli_sweep.json");
    {
        std::ofstream os(sweep_path);
        os << R"({"configs": [
            {"lambda": 3.0, "n": 60, "scheme": "method2", "trials": 30},
            {"lambda": 3.0, "n": 60, "scheme": "method2", "trials": 30, "m": 108}
        ]})";
    }
    const auto swept = run_cli("simulate-nonadaptive --seed 4 --config " + sweep_path.string());
    REQUIRE(swept.exit_code == 0);
    const auto lines = split_lines(swept.out);
    REQUIRE(lines.size() == 3);
    const auto r1 = csv_fields(lines[1]);
    const auto r2 = csv_fields(lines[2]);
    CHECK(r1[0] == "method2");
    CHECK(r1[4] == "30");
    CHECK(r2[3] == "108");  // the per-config override lands in the m column
    CHECK(r1[3] == csv_fields(split_lines(from_file.out)[1])[3]);
}
