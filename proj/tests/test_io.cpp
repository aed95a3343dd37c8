#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "cusp/errors.hpp"
#include "cusp/io.hpp"
#include "cusp/sim.hpp"
#include "oracles.hpp"

using namespace cusp;
using io::Json;

namespace {

std::string error_of(const Json& j) {
    try {
        (void)io::model_from_json(j);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("random valid models survive a JSON round trip") {
    std::mt19937_64 g(61);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double delta = 0.05 + u(g);
        const double lo = delta * (1.0 + u(g));
        const double hi = lo + 0.1 + 3.0 * u(g);
        const double tau = hi + 2.0 * delta + u(g);
        const double s = 0.1 + 5.0 * u(g);
        const ModelSpec spec{s, -s * 0.9 + 4.0 * u(g), 0.1 + 3.0 * u(g), 0.01 + 0.48 * u(g),
                             delta, tau, lo + (hi - lo) * u(g), {lo, hi}};
        const ModelParams p(spec);
        const Json j = io::to_json(p);
        CHECK(io::model_from_json(Json::parse(j.dump())) == p);
    }
}

TEST_CASE("model JSON errors name the field") {
    Json j = io::to_json(oracle::reference(0.5));
    j.erase("kappa");
    CHECK(error_of(j).find("model.kappa") != std::string::npos);

    j = io::to_json(oracle::reference(0.5));
    j["delta"] = "wide";
    CHECK(error_of(j).find("model.delta") != std::string::npos);

    j = io::to_json(oracle::reference(0.5));
    j["theta_window"] = Json::array({0.4, 3.5});
    CHECK(error_of(j).find("model.theta_window") != std::string::npos);

    j = io::to_json(oracle::reference(0.5));
    j["theta0_window"] = Json::array({1.0});
    CHECK(error_of(j).find("model.theta0_window") != std::string::npos);

    j = io::to_json(oracle::reference(0.5));
    j["kappa"] = 0.6;
    CHECK(error_of(j).find("kappa") != std::string::npos);
}

TEST_CASE("theta_window is optional on input") {
    Json j = io::to_json(oracle::reference(0.5));
    j.erase("theta_window");
    CHECK(io::model_from_json(j) == oracle::reference(0.5));
}

TEST_CASE("datasets survive a JSON round trip bit-exactly") {
    const Dataset d = simulate(oracle::reference(0.5), 25, 62);
    const Json j = io::to_json(d);
    CHECK(j.at("format") == "cusp-dataset/1");
    const Dataset back = io::dataset_from_json(Json::parse(j.dump()));
    CHECK(back == d);
}

TEST_CASE("malformed datasets are rejected") {
    Json j = io::to_json(simulate(oracle::reference(0.5), 2, 63));
    j["format"] = "other/1";
    CHECK_THROWS_AS((void)io::dataset_from_json(j), ValidationError);
    j = io::to_json(simulate(oracle::reference(0.5), 2, 63));
    j["replicates"][0] = Json::array({2.0, 1.0});
    CHECK_THROWS_AS((void)io::dataset_from_json(j), ValidationError);
    j.erase("replicates");
    CHECK_THROWS_AS((void)io::dataset_from_json(j), ValidationError);
}

TEST_CASE("dataset CSV layout") {
    const ModelParams p = oracle::reference(0.5);
    const Dataset d{{ProcessSample({0.5, 1.25}, 5.0), ProcessSample({}, 5.0), ProcessSample({3.0}, 5.0)}, p, 1};
    std::ostringstream os;
    io::write_dataset_csv(os, d);
    CHECK(os.str() == "replicate_id,event_time\n0,0.5\n0,1.25\n2,3\n");
}

TEST_CASE("doubles are written in shortest round-trip form") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 2.5, -7.25e12}) {
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("KL profile CSV marks the divergent curvature") {
    const KlProfile prof = kl_profile(oracle::reference(0.5), 3);
    std::ostringstream os;
    io::write_profile_csv(os, prof);
    const std::string s = os.str();
    CHECK(s.rfind("theta,j,j1,j2\n", 0) == 0);
    CHECK(s.find("\n2,") != std::string::npos);
    CHECK(s.find(",inf\n") != std::string::npos);
}

TEST_CASE("run config accepts a bare model or sections") {
    const Json model = io::to_json(oracle::reference(0.5));
    const io::RunConfig bare = io::run_config_from_json(model);
    REQUIRE(bare.model.has_value());
    CHECK(*bare.model == oracle::reference(0.5));
    CHECK_FALSE(bare.experiment.has_value());

    const Json full = Json::parse(R"({
        "model": )" + model.dump() + R"(,
        "experiment": {"n_values": [200, 400], "replications": 7, "seed": 3, "coarse_step": 0.01,
                       "likelihood_domain": "full", "thresholds": {"ks_max": 0.1}},
        "limit": {"u_max": 4, "step": 0.125, "draws": 100, "seed": 9},
        "output_dir": "out"
    })");
    const io::RunConfig c = io::run_config_from_json(full);
    REQUIRE(c.experiment.has_value());
    CHECK(c.experiment->n_values == std::vector<std::size_t>{200, 400});
    CHECK(c.experiment->replications == 7);
    CHECK(c.experiment->estimator.domain == LikelihoodDomain::full);
    CHECK(c.experiment->thresholds.ks_max == 0.1);
    CHECK_FALSE(c.experiment->thresholds.slope_tolerance.has_value());
    CHECK(c.limit->draws == 100);
    CHECK(c.output_dir == "out");

    // Resolved configs round-trip.
    const io::RunConfig again = io::run_config_from_json(io::to_json(c));
    CHECK(io::to_json(again) == io::to_json(c));
}

TEST_CASE("run config errors carry field paths") {
    auto message = [](const std::string& text) {
        try {
            (void)io::run_config_from_json(Json::parse(text));
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message(R"({"experiment": {"replications": -1}})").find("experiment.replications") !=
          std::string::npos);
    CHECK(message(R"({"experiment": {"likelihood_domain": "half"}})").find("experiment.likelihood_domain") !=
          std::string::npos);
    CHECK(message(R"({"limit": {"step": "x"}})").find("limit.step") != std::string::npos);
    CHECK(message(R"([1, 2])").find("config") != std::string::npos);
}

TEST_CASE("SHA-256 digest of a known string") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
