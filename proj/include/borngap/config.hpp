#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "borngap/common.hpp"
#include "borngap/params.hpp"

namespace borngap {

/// Everything a run needs, fully serialized into every output (threads and
/// file paths excluded: they do not affect the computed bytes, and output
/// files must be identical across parallelism degrees).
struct RunConfig {
    std::string subcommand;

    // model parameters
    int n = 5;
    int m = 1;
    double alpha = 0.0;
    double p = std::numeric_limits<double>::infinity();
    double delta = 0.1;
    double c_ball = 64.0;

    // grids
    double L_min = 64.0;   // born/holder dyadic L grid
    double L_max = 1024.0;
    double t_min = 1e-2;
    double t_max = 1e2;
    int t_points = 17;
    int r_points = 25;
    double band_L_min = 0.0;  // dispersive L grid start; 0 = pick by m
    int band_L_points = 5;
    double sigma = 0.0;
    std::vector<double> sigmas = {0.0, 2.0, 4.0, 8.0, 16.0};

    // kernel subcommand point
    double lambda = 1.0;
    double r = 1.0;
    std::string sign = "+";

    // born-growth potential choice: "vl" (tuned) or "rho" (contrast)
    std::string potential = "vl";

    // quadrature
    double rel_tol = 1e-9;

    // execution / outputs (not embedded)
    std::string out;
    std::string summary;
    int threads = 0;
    double tol_slope = -1.0;  // < 0: subcommand default

    ModelParams model() const {
        ModelParams mp;
        mp.n = n;
        mp.m = m;
        mp.alpha = alpha;
        mp.p = p;
        mp.delta = delta;
        mp.c_ball = c_ball;
        return mp;
    }
};

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["subcommand"] = c.subcommand;
    j["n"] = c.n;
    j["m"] = c.m;
    j["alpha"] = c.alpha;
    if (std::isinf(c.p))
        j["p"] = "inf";
    else
        j["p"] = c.p;
    j["delta"] = c.delta;
    j["c_ball"] = c.c_ball;
    j["L_min"] = c.L_min;
    j["L_max"] = c.L_max;
    j["t_min"] = c.t_min;
    j["t_max"] = c.t_max;
    j["t_points"] = c.t_points;
    j["r_points"] = c.r_points;
    j["band_L_min"] = c.band_L_min;
    j["band_L_points"] = c.band_L_points;
    j["sigma"] = c.sigma;
    j["sigmas"] = c.sigmas;
    j["lambda"] = c.lambda;
    j["r"] = c.r;
    j["sign"] = c.sign;
    j["potential"] = c.potential;
    j["rel_tol"] = c.rel_tol;
    j["tol_slope"] = c.tol_slope;
    return j;
}

inline void config_from_json(const nlohmann::json& j, RunConfig& c) {
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("subcommand", c.subcommand);
    get("n", c.n);
    get("m", c.m);
    get("alpha", c.alpha);
    if (j.contains("p")) {
        if (j["p"].is_string()) {
            const std::string s = j["p"].get<std::string>();
            if (s != "inf") throw validation_error("config: p must be a number or \"inf\"");
            c.p = std::numeric_limits<double>::infinity();
        } else {
            c.p = j["p"].get<double>();
        }
    }
    get("delta", c.delta);
    get("c_ball", c.c_ball);
    get("L_min", c.L_min);
    get("L_max", c.L_max);
    get("t_min", c.t_min);
    get("t_max", c.t_max);
    get("t_points", c.t_points);
    get("r_points", c.r_points);
    get("band_L_min", c.band_L_min);
    get("band_L_points", c.band_L_points);
    get("sigma", c.sigma);
    get("sigmas", c.sigmas);
    get("lambda", c.lambda);
    get("r", c.r);
    get("sign", c.sign);
    get("potential", c.potential);
    get("rel_tol", c.rel_tol);
    get("tol_slope", c.tol_slope);
}

inline std::string config_line(const RunConfig& c) { return config_to_json(c).dump(); }

}  // namespace borngap
