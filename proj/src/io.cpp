#include "cusp/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cusp/errors.hpp"

namespace cusp::io {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) bad(path, "expected a JSON object");
    const auto it = obj.find(key);
    if (it == obj.end()) bad(path + "." + key, "missing required field");
    return *it;
}

double number(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_number()) bad(path + "." + key, "expected a number");
    return v.get<double>();
}

double number_or(const Json& obj, const std::string& key, const std::string& path, double dflt) {
    return obj.contains(key) ? number(obj, key, path) : dflt;
}

std::uint64_t unsigned_int(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    if (!ok) bad(path + "." + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

std::uint64_t unsigned_or(const Json& obj, const std::string& key, const std::string& path,
                          std::uint64_t dflt) {
    return obj.contains(key) ? unsigned_int(obj, key, path) : dflt;
}

std::optional<double> optional_number(const Json& obj, const std::string& key,
                                      const std::string& path) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return number(obj, key, path);
}

Window window(const Json& obj, const std::string& key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        bad(path + "." + key, "expected a [lo, hi] pair of numbers");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

Json window_json(Window w) { return Json::array({w.lo, w.hi}); }

Json moment_json(const Moment& m) {
    return Json{{"p", m.p}, {"mean", m.mean}, {"std_err", m.std_err}};
}

Json nullable(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

Json to_json(const ModelParams& p) {
    return Json{{"S", p.signal()},
                {"h", p.contamination()},
                {"lambda0", p.lambda0()},
                {"kappa", p.kappa()},
                {"delta", p.delta()},
                {"tau", p.tau()},
                {"theta0", p.theta0()},
                {"theta0_window", window_json(p.theta0_window())},
                {"theta_window", window_json(p.theta_window())}};
}

ModelParams model_from_json(const Json& j, const std::string& path) {
    ModelSpec s;
    s.signal = number(j, "S", path);
    s.contamination = number(j, "h", path);
    s.lambda0 = number(j, "lambda0", path);
    s.kappa = number(j, "kappa", path);
    s.delta = number(j, "delta", path);
    s.tau = number(j, "tau", path);
    s.theta0 = number(j, "theta0", path);
    s.theta0_window = window(j, "theta0_window", path);
    ModelParams p = [&] {
        try {
            return ModelParams(s);
        } catch (const ValidationError& e) {
            bad(path, e.what());
        }
    }();
    if (j.contains("theta_window")) {
        const Window given = window(j, "theta_window", path);
        const Window derived = p.theta_window();
        const double tol = 1e-12 * std::max(1.0, std::abs(p.tau()));
        if (std::abs(given.lo - derived.lo) > tol || std::abs(given.hi - derived.hi) > tol) {
            bad(path + ".theta_window", "must equal theta0_window widened by delta on each side");
        }
    }
    return p;
}

Json to_json(const Dataset& d) {
    Json reps = Json::array();
    for (const auto& r : d.replicates) reps.push_back(r.events());
    return Json{{"format", "cusp-dataset/1"},
                {"params", to_json(d.params)},
                {"seed", d.seed},
                {"replicates", std::move(reps)}};
}

Dataset dataset_from_json(const Json& j) {
    const std::string path = "dataset";
    if (j.contains("format") && j.at("format") != "cusp-dataset/1") {
        bad(path + ".format", "unsupported dataset format");
    }
    ModelParams p = model_from_json(field(j, "params", path), path + ".params");
    const std::uint64_t seed = unsigned_or(j, "seed", path, 0);
    const Json& reps = field(j, "replicates", path);
    if (!reps.is_array()) bad(path + ".replicates", "expected an array of arrays");
    Dataset d{{}, p, seed};
    d.replicates.reserve(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const std::string rp = path + ".replicates[" + std::to_string(i) + "]";
        if (!reps[i].is_array()) bad(rp, "expected an array of event times");
        std::vector<double> ev;
        ev.reserve(reps[i].size());
        for (const auto& t : reps[i]) {
            if (!t.is_number()) bad(rp, "event times must be numbers");
            ev.push_back(t.get<double>());
        }
        try {
            d.replicates.emplace_back(std::move(ev), p.tau());
        } catch (const ValidationError& e) {
            bad(rp, e.what());
        }
    }
    if (d.replicates.empty()) bad(path + ".replicates", "need at least one replicate");
    return d;
}

void write_dataset_csv(std::ostream& os, const Dataset& d) {
    os << "replicate_id,event_time\n";
    for (std::size_t i = 0; i < d.replicates.size(); ++i) {
        for (double t : d.replicates[i].events()) os << i << ',' << format_double(t) << '\n';
    }
}

Json to_json(const EstimationResult& r) {
    return Json{{"theta_n", r.theta_n},
                {"loglik", r.loglik},
                {"grid_step_final", r.grid_step_final},
                {"evaluations", r.evaluations},
                {"degenerate", r.degenerate}};
}

Json to_json(const LimitConstants& c) {
    return Json{{"A", c.a}, {"gamma_kappa", c.gamma_kappa}, {"b", c.b}, {"hurst", c.hurst}};
}

Json to_json(const RateReport& r) {
    Json per_n = Json::array();
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        per_n.push_back(Json{{"n", r.n_values[i]},
                             {"rmse", r.rmse[i]},
                             {"median_error", r.median_error[i]},
                             {"phi_n", r.phi_n[i]}});
    }
    return Json{{"kind", "rate"},
                {"seed", r.seed},
                {"replications", r.replications},
                {"theta_hat", r.theta_hat},
                {"constants", to_json(r.constants)},
                {"expected_slope", r.expected_slope},
                {"fitted_slope", r.fitted_slope},
                {"per_n", std::move(per_n)}};
}

Json to_json(const DistReport& r) {
    Json moments = Json::array();
    for (const auto& m : r.moment_table) {
        moments.push_back(Json{{"p", m.p},
                               {"normalized_error", moment_json(m.errors)},
                               {"limit", moment_json(m.limit)},
                               {"gap_in_std", nullable(m.gap_in_std())}});
    }
    return Json{{"kind", "limit"},
                {"seed", r.seed},
                {"n", r.n},
                {"replications", r.replications},
                {"theta_hat", r.theta_hat},
                {"constants", to_json(r.constants)},
                {"limit_draws", r.limit_draws.size()},
                {"ks_statistic", r.ks_statistic},
                {"moments", std::move(moments)}};
}

Json to_json(const ContrastSummary& s) {
    return Json{{"kind", "contrast"},
                {"seed", s.seed},
                {"n", s.n},
                {"replications", s.replications},
                {"theta0", s.theta0},
                {"theta_hat", s.theta_hat},
                {"fraction_closer_to_pseudo_true", s.fraction_closer_to_pseudo_true}};
}

Json to_json(const std::vector<ExponentRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        arr.push_back(Json{{"kappa", r.kappa},
                           {"gamma_well", r.gamma_well},
                           {"gamma_mis", r.gamma_mis},
                           {"gamma_regular", r.gamma_regular}});
    }
    return Json{{"kind", "exponents"}, {"rows", std::move(arr)}};
}

void write_profile_csv(std::ostream& os, const KlProfile& profile) {
    os << "theta,j,j1,j2\n";
    for (std::size_t i = 0; i < profile.grid.size(); ++i) {
        os << format_double(profile.grid[i]) << ',' << format_double(profile.j[i]) << ','
           << format_double(profile.j1[i]) << ',' << format_double(profile.j2[i].as_double())
           << '\n';
    }
}

void write_rate_errors_csv(std::ostream& os, const RateReport& r) {
    os << "n,replicate,theta_n,error\n";
    for (std::size_t i = 0; i < r.n_values.size(); ++i) {
        for (std::size_t k = 0; k < r.estimates[i].size(); ++k) {
            os << r.n_values[i] << ',' << k << ',' << format_double(r.estimates[i][k]) << ','
               << format_double(r.errors[i][k]) << '\n';
        }
    }
}

void write_column_csv(std::ostream& os, std::string_view header, const std::vector<double>& values) {
    os << header << '\n';
    for (double v : values) os << format_double(v) << '\n';
}

void write_exponents_csv(std::ostream& os, const std::vector<ExponentRow>& rows) {
    os << "kappa,gamma_well,gamma_mis,gamma_regular\n";
    for (const auto& r : rows) {
        os << format_double(r.kappa) << ',' << format_double(r.gamma_well) << ','
           << format_double(r.gamma_mis) << ',' << format_double(r.gamma_regular) << '\n';
    }
}

Json limit_summary(const LimitSample& s) {
    constexpr double powers[] = {1.0, 2.0, 4.0};
    Json moments = Json::array();
    for (const auto& m : limit_moments(s.draws, powers)) moments.push_back(moment_json(m));
    return Json{{"kappa", s.grid.hurst() - 0.5},
                {"hurst", s.grid.hurst()},
                {"u_max", s.grid.u_max()},
                {"step", s.grid.step()},
                {"draws", s.draws.size()},
                {"seed", s.seed},
                {"moments", std::move(moments)},
                {"boundary_mass", s.boundary_mass()},
                {"near_boundary_mass", s.near_boundary_mass()}};
}

RunConfig run_config_from_json(const Json& j) {
    if (!j.is_object()) bad("config", "expected a JSON object");
    RunConfig c;
    const bool sectioned = j.contains("model") || j.contains("experiment") || j.contains("limit") ||
                           j.contains("output_dir");
    if (!sectioned) {
        c.model = model_from_json(j, "model");
        return c;
    }
    if (j.contains("model")) c.model = model_from_json(j.at("model"), "model");
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) bad("output_dir", "expected a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("limit")) {
        const Json& l = j.at("limit");
        const std::string path = "limit";
        if (!l.is_object()) bad(path, "expected a JSON object");
        LimitConfig lc;
        lc.u_max = number_or(l, "u_max", path, lc.u_max);
        lc.step = number_or(l, "step", path, lc.step);
        lc.draws = unsigned_or(l, "draws", path, lc.draws);
        lc.seed = unsigned_or(l, "seed", path, lc.seed);
        c.limit = lc;
    }
    if (j.contains("experiment")) {
        const Json& e = j.at("experiment");
        const std::string path = "experiment";
        if (!e.is_object()) bad(path, "expected a JSON object");
        ExperimentConfig ec;
        if (e.contains("n_values")) {
            const Json& nv = e.at("n_values");
            if (!nv.is_array()) bad(path + ".n_values", "expected an array of integers");
            for (const auto& v : nv) {
                if (!v.is_number_unsigned()) bad(path + ".n_values", "expected positive integers");
                ec.n_values.push_back(v.get<std::size_t>());
            }
        }
        ec.n = unsigned_or(e, "n", path, ec.n);
        ec.replications = unsigned_or(e, "replications", path, ec.replications);
        ec.seed = unsigned_or(e, "seed", path, ec.seed);
        ec.estimator.coarse_step = number_or(e, "coarse_step", path, 0.0);
        ec.estimator.refinements =
            static_cast<int>(unsigned_or(e, "refinements", path, static_cast<std::uint64_t>(4)));
        if (e.contains("likelihood_domain")) {
            const Json& d = e.at("likelihood_domain");
            if (!d.is_string()) bad(path + ".likelihood_domain", "expected 'paper' or 'full'");
            try {
                ec.estimator.domain = parse_likelihood_domain(d.get<std::string>());
            } catch (const ValidationError& err) {
                bad(path + ".likelihood_domain", err.what());
            }
        }
        if (e.contains("kappa_grid")) {
            const Json& kg = e.at("kappa_grid");
            if (!kg.is_array()) bad(path + ".kappa_grid", "expected an array of numbers");
            for (const auto& v : kg) {
                if (!v.is_number()) bad(path + ".kappa_grid", "expected numbers");
                ec.kappa_grid.push_back(v.get<double>());
            }
        }
        if (e.contains("thresholds")) {
            const Json& t = e.at("thresholds");
            const std::string tp = path + ".thresholds";
            if (!t.is_object()) bad(tp, "expected a JSON object");
            ec.thresholds.slope_tolerance = optional_number(t, "slope_tolerance", tp);
            ec.thresholds.ks_max = optional_number(t, "ks_max", tp);
            ec.thresholds.moment_gap_max_std = optional_number(t, "moment_gap_max_std", tp);
            ec.thresholds.min_fraction = optional_number(t, "min_fraction", tp);
        }
        c.experiment = ec;
    }
    return c;
}

Json to_json(const RunConfig& c) {
    Json out = Json::object();
    if (c.model) out["model"] = to_json(*c.model);
    if (c.experiment) {
        const auto& e = *c.experiment;
        Json t = Json::object();
        if (e.thresholds.slope_tolerance) t["slope_tolerance"] = *e.thresholds.slope_tolerance;
        if (e.thresholds.ks_max) t["ks_max"] = *e.thresholds.ks_max;
        if (e.thresholds.moment_gap_max_std) t["moment_gap_max_std"] = *e.thresholds.moment_gap_max_std;
        if (e.thresholds.min_fraction) t["min_fraction"] = *e.thresholds.min_fraction;
        out["experiment"] = Json{{"n_values", e.n_values},
                                 {"n", e.n},
                                 {"replications", e.replications},
                                 {"seed", e.seed},
                                 {"coarse_step", e.estimator.coarse_step},
                                 {"refinements", e.estimator.refinements},
                                 {"likelihood_domain", std::string(to_string(e.estimator.domain))},
                                 {"kappa_grid", e.kappa_grid},
                                 {"thresholds", std::move(t)}};
    }
    if (c.limit) {
        out["limit"] = Json{{"u_max", c.limit->u_max},
                            {"step", c.limit->step},
                            {"draws", c.limit->draws},
                            {"seed", c.limit->seed}};
    }
    if (c.output_dir) out["output_dir"] = *c.output_dir;
    return out;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
}

std::string write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
    return sha256_hex(content);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
    return os.str();
}

}  // namespace cusp::io
