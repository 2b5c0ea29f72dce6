#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"

using namespace rpoly;

namespace {

const char* kBase = R"({
  "experiment": "variance_scaling",
  "body": {"kind": "ball", "dim": 2},
  "n_grid": [20, 40],
  "trials": 30,
  "master_seed": 11
})";

nlohmann::json base() { return nlohmann::json::parse(kBase); }

void expect_config_error(const nlohmann::json& j) { CHECK_THROWS_AS(parse_config(j.dump()), ConfigError); }

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n' ? 1 : 0;
    return n;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("a minimal config parses with defaults") {
    const ExperimentConfig c = parse_config(kBase);
    CHECK(c.kind == ExperimentKind::variance_scaling);
    CHECK(c.dim == 2);
    CHECK(c.functional.is_volume());
    CHECK(c.model == Model::uniform);
    CHECK(c.constants.nu == 5.0);
    CHECK(c.constants.A == 4.0);
    CHECK(c.master_seed == 11);
}

TEST_CASE("config errors") {
    auto j = base();
    j["colour"] = "blue";
    expect_config_error(j);

    j = base();
    j["body"]["radius"] = 1;
    expect_config_error(j);

    j = base();
    j["options"] = {{"no_such_option", 1}};
    expect_config_error(j);

    j = base();
    j.erase("master_seed");
    expect_config_error(j);

    j = base();
    j["master_seed"] = -1;
    expect_config_error(j);

    j = base();
    j["n_grid"] = {40, 40};
    expect_config_error(j);

    j = base();
    j["n_grid"] = {2, 40};  // below d + 1
    expect_config_error(j);

    j = base();
    j["trials"] = 0;
    expect_config_error(j);

    j = base();
    j["experiment"] = "clt";
    j["trials"] = 1;
    expect_config_error(j);

    j = base();
    j["functional"] = "f2";
    expect_config_error(j);

    j = base();
    j["experiment"] = "clt";
    j["model"] = "coupled";
    expect_config_error(j);

    j = base();
    j["d"] = 3;
    expect_config_error(j);

    j = base();
    j["experiment"] = "spectral";
    expect_config_error(j);

    j = base();
    j["constants"] = {{"lambda_grid", {0.0, 1.0}}};
    expect_config_error(j);

    CHECK_THROWS_AS(parse_config("{\"experiment\": "), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
}

TEST_CASE("functional names") {
    CHECK(Functional::parse("volume").is_volume());
    CHECK(Functional::parse("f0").face_dim == 0);
    CHECK(Functional::parse("f_1").face_dim == 1);
    CHECK(Functional::parse("f1").name() == "f1");
    CHECK_THROWS(Functional::parse("area"));
}

TEST_CASE("coupled sample size") {
    for (std::int64_t n : {10, 100, 1000, 12345}) {
        for (double A : {0.5, 1.0, 4.0}) {
            const double target = static_cast<double>(n) + A * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
            const std::int64_t np = coupled_n_prime(n, A);
            CHECK(static_cast<double>(np) >= target - 1e-6);
            CHECK(static_cast<double>(np - 1) < target);
        }
    }
    CHECK(coupled_n_prime(100, 4.0) == 186);  // 100 + 4 * sqrt(100 ln 100) = 185.84
    CHECK(coupled_n_prime(50, 0.0) == 50);
}

TEST_CASE("the config echo leaves out workers and output") {
    auto j = base();
    j["workers"] = 3;
    j["output"] = "somewhere";
    const auto echo = config_echo(parse_config(j.dump()));
    CHECK(!echo.contains("workers"));
    CHECK(!echo.contains("output"));
    CHECK(echo["master_seed"] == 11);
}

TEST_CASE("json numbers keep 17 significant digits") {
    nlohmann::ordered_json doc;
    doc["a"] = 0.1;
    doc["b"] = std::nan("");
    doc["c"] = {1.0 / 3.0, 2};
    const std::string text = to_json_text(doc);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"b\": null") != std::string::npos);
    CHECK(text.find("0.33333333333333331") != std::string::npos);
    CHECK(nlohmann::json::parse(text)["a"].get<double>() == 0.1);
}

TEST_CASE("outputs of a small variance run") {
    const Report r = run_experiment(parse_config(kBase), 2);
    CHECK(r.failed_trials == 0);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].n == 20);
    CHECK(r.rows[0].var > 0);

    const std::string summary = summary_csv(r);
    CHECK(first_line(summary) ==
          "n,mean,var,var_stderr,M3,M4,M5,M6,ks,mean_slope,mean_slope_stderr,var_slope,var_slope_stderr,ks_slope,ks_slope_stderr");
    CHECK(line_count(summary) == 3);

    const std::string raw = raw_csv(r);
    CHECK(first_line(raw) == "n,trial,value");
    CHECK(line_count(raw) == 1 + 2 * 30);

    const auto doc = nlohmann::json::parse(to_json_text(r.doc));
    CHECK(doc["experiment"] == "variance_scaling");
    CHECK(doc["per_n"].size() == 2);
}

TEST_CASE("results do not depend on the worker count") {
    for (const char* kind : {"clt", "expectation", "tail", "poisson_vs_uniform"}) {
        auto j = base();
        j["experiment"] = kind;
        if (std::string(kind) == "poisson_vs_uniform") j["options"] = {{"bootstrap_resamples", 50}};
        const ExperimentConfig c = parse_config(j.dump());
        const std::string one = to_json_text(run_experiment(c, 1).doc);
        const std::string three = to_json_text(run_experiment(c, 3).doc);
        CHECK_MESSAGE(one == three, kind);
    }
}

TEST_CASE("coupling with A = 0 has identical pairs") {
    auto j = base();
    j["experiment"] = "coupling";
    j["n_grid"] = {200};
    j["trials"] = 10;
    j["constants"] = {{"A", 0.0}};
    j["options"] = {{"g_probes", 2}, {"g_samples", 200}};
    const Report r = run_experiment(parse_config(j.dump()), 1);
    const auto& diff = r.doc["per_n"][0]["difference"];
    CHECK(diff["min"].get<double>() == 0.0);
    CHECK(diff["max"].get<double>() == 0.0);
    CHECK(diff["negative_count"] == 0);
}

TEST_CASE("the tail profile starts at one") {
    auto j = base();
    j["experiment"] = "tail";
    j["n_grid"] = {50};
    j["trials"] = 200;
    const Report r = run_experiment(parse_config(j.dump()), 1);
    const auto& profile = r.doc["per_n"][0]["profile"];
    REQUIRE(profile.size() > 0);
    CHECK(profile[0]["lambda"].get<double>() == 0.0);
    CHECK(profile[0]["exceedance"].get<double>() == 1.0);
}
