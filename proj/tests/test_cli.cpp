#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "engset/cli.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = engset::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json run_json(std::vector<std::string> args)
{
    auto r = run(std::move(args));
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("laplace with the resolvent check")
    {
        auto j = run_json({"laplace", "--process", "engset", "--n", "25", "--c", "15", "--nu", "0.4",
                           "--from", "15", "--to", "0", "--alpha", "1", "--check"});
        CHECK(j["schema_version"] == 1);
        CHECK(j["command"] == "laplace");
        CHECK(j["resolved_params"]["c"] == 15);
        CHECK(j["resolved_params"]["time_scale"] == 1.0);
        CHECK(j["results"]["relative_gap"].get<double>() <= 1e-8);
        CHECK(j["results"]["lt"].get<double>() ==
              doctest::Approx(j["results"]["oracle_lt"].get<double>()).epsilon(1e-8));
        CHECK(j["results"]["family"] == "G");
        CHECK(j.contains("diagnostics"));
    }

    TEST_CASE("oracle cap")
    {
        auto j = run_json({"laplace", "--n", "50", "--nu", "0.5", "--from", "0", "--to", "50", "--check",
                           "--oracle-cap", "10"});
        CHECK_FALSE(j["results"].contains("oracle_lt"));
        CHECK(j["diagnostics"].contains("oracle"));
    }

    TEST_CASE("regime report")
    {
        auto j = run_json({"regime", "--n", "400", "--c", "120", "--nu", "0.6"});
        CHECK(j["results"]["regime"] == "SuperCritical");
        CHECK(j["results"]["t_star"].get<double>() == doctest::Approx(std::log(2.0)));
        CHECK(j["results"]["limit_variance"].get<double>() == doctest::Approx(7.0 / 3.0));
        CHECK(j["resolved_params"]["process"] == "engset");
    }

    TEST_CASE("simulate single source")
    {
        auto j = run_json({"simulate", "--n", "1", "--c", "1", "--nu", "0.5", "--from", "1", "--hit", "0",
                           "--paths", "100000", "--seed", "7"});
        double mean = j["results"]["summary"]["mean"];
        double se = j["results"]["summary"]["std_error"];
        CHECK(std::fabs(mean - 2.0) <= 4.0 * se);
        CHECK(j["resolved_params"]["seed"] == 7);
        CHECK(j["resolved_params"]["config_digest"].get<std::string>().size() == 16);
    }

    TEST_CASE("csv samples are identical across thread counts")
    {
        std::vector<std::string> base{"simulate", "--n", "25", "--c", "15", "--nu", "0.4", "--from", "15",
                                      "--hit", "0", "--horizon", "100", "--paths", "2000", "--seed", "5",
                                      "--format", "csv"};
        auto one = base;
        one.insert(one.end(), {"--threads", "1"});
        auto four = base;
        four.insert(four.end(), {"--threads", "4"});
        auto a = run(one);
        auto b = run(four);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out.rfind("# schema_version=1", 0) == 0);
    }

    TEST_CASE("empirical transform from simulate")
    {
        auto j = run_json({"simulate", "--n", "20", "--nu", "0.5", "--from", "0", "--hit", "20", "--paths",
                           "5000", "--seed", "3", "--horizon", "80", "--alpha", "1", "--alpha", "0.5"});
        REQUIRE(j["results"]["empirical_lt"].size() == 2);
        CHECK(j["results"]["empirical_lt"][0]["alpha"] == 1.0);
    }

    TEST_CASE("mean")
    {
        auto j = run_json({"mean", "--n", "10", "--nu", "0.5", "--from", "0", "--to", "10", "--check"});
        CHECK(j["results"]["relative_gap"].get<double>() <= 1e-6);
        auto k = run_json({"mean", "--n", "1", "--nu", "2", "--mu", "3", "--from", "1", "--to", "0"});
        CHECK(k["results"]["mean"].get<double>() == doctest::Approx(1.0 / 3.0));
        CHECK(k["resolved_params"]["nu"].get<double>() == doctest::Approx(0.4));
        CHECK(k["resolved_params"]["time_scale"].get<double>() == doctest::Approx(5.0));
    }

    TEST_CASE("limit-check table")
    {
        auto j = run_json({"limit-check", "--law", "SubCritEmptyExp", "--nu", "0.4", "--eta", "0.6",
                           "--n-list", "40,80", "--alpha-list", "1"});
        REQUIRE(j["results"]["rows"].size() == 2);
        CHECK(j["results"]["trend"][0]["gap_decreased"] == true);
        auto r = run({"limit-check", "--law", "SubCritFullExp", "--nu", "0.5", "--n-list", "20,40",
                      "--alpha-list", "1", "--format", "csv"});
        CHECK(r.code == 0);
        CHECK(r.out.rfind("n,alpha,exact_lt,limit_lt,gap\n", 0) == 0);
    }

    TEST_CASE("output file")
    {
        const std::string path = "engset_cli_test_output.json";
        auto r = run({"regime", "--n", "1000", "--c", "500", "--nu", "0.3", "--output", path});
        CHECK(r.code == 0);
        CHECK(r.out.empty());
        std::ifstream in(path);
        auto j = json::parse(in);
        CHECK(j["results"]["regime"] == "SubCritical");
        std::remove(path.c_str());
    }

    TEST_CASE("usage errors exit with 1")
    {
        CHECK(run({}).code == 1);
        CHECK(run({"laplace", "--n", "5"}).code == 1);
        CHECK(run({"laplace", "--n", "5", "--nu", "0.5", "--from", "6", "--to", "0"}).code == 1);
        CHECK(run({"laplace", "--n", "5", "--nu", "1.5", "--from", "0", "--to", "1"}).code == 1);
        CHECK(run({"regime", "--n", "5", "--nu", "0.5", "--format", "xml"}).code == 1);
        CHECK(run({"simulate", "--n", "5", "--nu", "0.5", "--from", "0"}).code == 1);
        CHECK(run({"limit-check", "--law", "SuperCriticalNormal", "--nu", "0.3", "--eta", "0.6"}).code == 1);
        auto r = run({"bogus"});
        CHECK(r.code == 1);
    }

    TEST_CASE("numerical failures exit with 2 and a payload")
    {
        auto r = run({"simulate", "--n", "20", "--nu", "0.5", "--from", "0", "--hit", "20", "--paths", "50",
                      "--max-events", "3"});
        CHECK(r.code == 2);
        auto j = json::parse(r.out);
        CHECK(j["diagnostics"]["error"]["code"] == "censored");

        auto h = run({"simulate", "--n", "20", "--nu", "0.5", "--from", "0", "--hit", "20", "--paths", "50",
                      "--horizon", "1", "--alpha", "0.1"});
        CHECK(h.code == 2);
        CHECK(json::parse(h.out)["results"]["empirical_lt"][0]["error"]["code"] == "censored");
    }

    TEST_CASE("verify")
    {
        auto j = run_json({"verify"});
        CHECK(j["results"]["failed"] == 0);
        CHECK(j["results"]["suites"].size() == 8);
        auto r = run({"verify", "--format", "csv"});
        CHECK(r.code == 0);
        CHECK(r.out.find("suite") < r.out.find('\n'));
    }
}
