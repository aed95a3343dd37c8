#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cusp/errors.hpp"
#include "cusp/estimator.hpp"
#include "cusp/experiment.hpp"
#include "cusp/io.hpp"
#include "cusp/kl.hpp"
#include "cusp/limit.hpp"
#include "cusp/model.hpp"
#include "cusp/parallel.hpp"
#include "cusp/sim.hpp"

namespace cusp::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;
using Clock = std::chrono::steady_clock;

class ThresholdViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Collects artifact hashes and stage timings for manifest.json.
class Run {
public:
    Run(fs::path dir, std::span<const std::string> args) : dir_(std::move(dir)) {
        manifest_["command"] = Json(std::vector<std::string>(args.begin(), args.end()));
    }

    void set(const std::string& key, Json value) { manifest_[key] = std::move(value); }

    void write(const std::string& name, std::string_view content) {
        artifacts_[name] = io::write_text_file(dir_ / name, content);
    }

    void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    template <class F>
    auto timed(const std::string& stage, F&& f) {
        const auto t0 = Clock::now();
        auto result = f();
        runtimes_[stage] = std::chrono::duration<double>(Clock::now() - t0).count();
        return result;
    }

    void finish(int exit_code) {
        manifest_["threads"] = par::max_threads();
        manifest_["artifacts"] = artifacts_;
        manifest_["runtimes_s"] = runtimes_;
        manifest_["exit_code"] = exit_code;
        io::write_text_file(dir_ / "manifest.json", manifest_.dump(2) + "\n");
    }

private:
    fs::path dir_;
    Json manifest_ = Json::object();
    Json artifacts_ = Json::object();
    Json runtimes_ = Json::object();
};

struct Globals {
    int threads = 0;
    std::string out;
};

fs::path output_dir(const Globals& g, const std::optional<std::string>& from_config) {
    if (!g.out.empty()) return g.out;
    if (from_config) return *from_config;
    if (const char* env = std::getenv("CUSP_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

io::RunConfig load_config(const std::string& path) {
    return io::run_config_from_json(io::read_json_file(path));
}

const ModelParams& require_model(const io::RunConfig& c) {
    if (!c.model) throw ValidationError("model: missing required section");
    return *c.model;
}

const io::ExperimentConfig& require_experiment(const io::RunConfig& c) {
    if (!c.experiment) throw ValidationError("experiment: missing required section");
    return *c.experiment;
}

Json nullable(std::optional<double> x) { return x ? Json(*x) : Json(nullptr); }

// Pseudo-true point, constants and admissibility as one JSON object.
Json pseudo_true_json(const ModelParams& p) {
    const Admissibility adm = contamination_admissible(p);
    Json j;
    j["admissible"] = adm.admissible;
    j["threshold"] = adm.threshold;
    j["A"] = a_constant(p.signal(), p.lambda0());
    j["gamma_kappa"] = gamma_kappa(p.kappa());
    std::optional<double> theta_hat, curvature, b;
    bool divergent = false;
    if (adm.admissible) {
        theta_hat = find_pseudo_true(p);
        const Curvature c = kl_second_derivative(p, *theta_hat);
        divergent = c.is_divergent();
        if (!divergent) {
            curvature = c.value();
            b = limit_constants(p, *theta_hat).b;
        }
    }
    j["theta_hat"] = nullable(theta_hat);
    j["curvature_hat"] = nullable(curvature);
    j["curvature_divergent"] = divergent;
    j["b"] = nullable(b);
    return j;
}

struct Check {
    std::string name;
    double value;
    double limit;
    bool passed;
};

Json checks_json(const std::vector<Check>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) {
        arr.push_back(Json{{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
    }
    return arr;
}

void enforce(const std::vector<Check>& checks) {
    std::ostringstream os;
    bool failed = false;
    for (const auto& c : checks) {
        if (c.passed) continue;
        os << (failed ? "; " : "") << c.name << " = " << c.value << " (limit " << c.limit << ")";
        failed = true;
    }
    if (failed) throw ThresholdViolation("threshold violated: " + os.str());
}

std::string csv(const std::function<void(std::ostream&)>& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Misspecified cusp change-point estimation toolkit", "cusp"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--threads", g.threads, "Cap on worker threads")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "Output directory (default: $CUSP_OUTPUT_DIR or .)");

    std::function<void(Run&)> action;
    std::optional<std::string> config_out_dir;
    std::string config_path;

    // kl-analyze
    std::size_t points = 401;
    auto* kl_cmd = app.add_subcommand("kl-analyze", "Tabulate J, J', J'' over Theta");
    kl_cmd->add_option("--config", config_path, "Model config JSON")->required();
    kl_cmd->add_option("--points", points, "Grid points over Theta")->check(CLI::Range(2, 1000000));

    // pseudo-true
    auto* pt_cmd = app.add_subcommand("pseudo-true", "Print the pseudo-true point and constants");
    pt_cmd->add_option("--config", config_path, "Model config JSON")->required();

    // simulate
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 1;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset of n replicates");
    sim_cmd->add_option("--config", config_path, "Model config JSON")->required();
    sim_cmd->add_option("--n", sim_n, "Number of replicates")->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_seed, "Master seed");

    // estimate
    std::string dataset_path;
    double coarse_step = 0.0;
    int refinements = 4;
    std::string domain_name = "paper";
    auto* est_cmd = app.add_subcommand("estimate", "Pseudo-MLE of theta from a dataset");
    est_cmd->add_option("--dataset", dataset_path, "Dataset JSON")->required();
    est_cmd->add_option("--coarse-step", coarse_step, "Coarse grid step (0: delta/50)")
        ->check(CLI::NonNegativeNumber);
    est_cmd->add_option("--refinements", refinements, "Refinement rounds")->check(CLI::NonNegativeNumber);
    est_cmd->add_option("--likelihood-domain", domain_name, "paper | full");

    // limit-sample
    double kappa = 0.25;
    io::LimitConfig lc;
    auto* lim_cmd = app.add_subcommand("limit-sample", "Draw the argmax of W^H(u) - u^2/2");
    lim_cmd->add_option("--kappa", kappa, "Cusp order in (0, 1/2)")->required();
    lim_cmd->add_option("--u-max", lc.u_max, "Truncation of the u range");
    lim_cmd->add_option("--step", lc.step, "Grid step");
    lim_cmd->add_option("--draws", lc.draws, "Number of draws");
    lim_cmd->add_option("--seed", lc.seed, "Master seed");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo experiments");
    exp_cmd->require_subcommand(1);
    auto* rate_cmd = exp_cmd->add_subcommand("rate", "RMSE against n and fitted slope");
    auto* law_cmd = exp_cmd->add_subcommand("limit", "Normalized errors against the limit law");
    auto* con_cmd = exp_cmd->add_subcommand("contrast", "Closer to theta_hat than to theta0");
    auto* expo_cmd = exp_cmd->add_subcommand("exponents", "MSE exponents against kappa");
    for (auto* c : {rate_cmd, law_cmd, con_cmd}) {
        c->add_option("--config", config_path, "Config JSON with model and experiment sections")->required();
    }
    expo_cmd->add_option("--config", config_path, "Config JSON with an experiment.kappa_grid");

    kl_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        action = [&, cfg, p](Run& run) {
            run.set("config", io::to_json(cfg));
            const KlProfile profile = run.timed("kl_profile", [&] { return kl_profile(p, points); });
            const Json summary = run.timed("summary", [&] { return pseudo_true_json(p); });
            run.write("kl_profile.csv", csv([&](std::ostream& os) { io::write_profile_csv(os, profile); }));
            run.write_json("kl_summary.json", summary);
            out << summary.dump(2) << "\n";
        };
    });

    pt_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        action = [&, cfg, p](Run& run) {
            run.set("config", io::to_json(cfg));
            const Json summary = run.timed("pseudo_true", [&] { return pseudo_true_json(p); });
            run.write_json("pseudo_true.json", summary);
            out << summary.dump(2) << "\n";
        };
    });

    sim_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        action = [&, cfg, p](Run& run) {
            run.set("config", io::to_json(cfg));
            run.set("seed", sim_seed);
            run.set("n", sim_n);
            const Dataset d = run.timed("simulate", [&] { return simulate(p, sim_n, sim_seed); });
            run.write_json("dataset.json", io::to_json(d));
            run.write("dataset.csv", csv([&](std::ostream& os) { io::write_dataset_csv(os, d); }));
            out << "simulated " << d.replicates.size() << " replicates, " << d.total_events()
                << " events\n";
        };
    });

    est_cmd->callback([&] {
        EstimatorOptions opts;
        opts.coarse_step = coarse_step;
        opts.refinements = refinements;
        opts.domain = parse_likelihood_domain(domain_name);
        const Dataset d = io::dataset_from_json(io::read_json_file(dataset_path));
        action = [&, opts, d](Run& run) {
            run.set("dataset", dataset_path);
            run.set("config", Json{{"model", io::to_json(d.params)},
                                   {"coarse_step", opts.coarse_step},
                                   {"refinements", opts.refinements},
                                   {"likelihood_domain", std::string(to_string(opts.domain))}});
            run.set("seed", d.seed);
            const EstimationResult r = run.timed("pmle", [&] { return pmle(d.params, d, opts); });
            const Json j = io::to_json(r);
            run.write_json("estimate.json", j);
            out << j.dump(2) << "\n";
        };
    });

    lim_cmd->callback([&] {
        if (!(kappa > 0.0 && kappa < 0.5)) throw ValidationError("kappa: must lie in (0, 1/2)");
        const FbmGrid grid(lc.u_max, lc.step, kappa + 0.5);
        action = [&, grid](Run& run) {
            run.set("config", Json{{"kappa", kappa},
                                   {"limit", Json{{"u_max", lc.u_max},
                                                  {"step", lc.step},
                                                  {"draws", lc.draws},
                                                  {"seed", lc.seed}}}});
            run.set("seed", lc.seed);
            const LimitSample s =
                run.timed("sample", [&] { return sample_limit_argmax(grid, lc.draws, lc.seed); });
            run.write("limit_draws.csv",
                      csv([&](std::ostream& os) { io::write_column_csv(os, "u_hat", s.draws); }));
            const Json summary = io::limit_summary(s);
            run.write_json("limit_summary.json", summary);
            out << summary.dump(2) << "\n";
        };
    });

    rate_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        const io::ExperimentConfig e = require_experiment(cfg);
        action = [&, cfg, p, e](Run& run) {
            run.set("config", io::to_json(cfg));
            run.set("seed", e.seed);
            const RateReport r = run.timed("rate", [&] {
                return run_rate_experiment(p, e.n_values, e.replications, e.seed, e.estimator);
            });
            std::vector<Check> checks;
            if (e.thresholds.slope_tolerance) {
                const double gap = std::abs(r.fitted_slope - r.expected_slope);
                checks.push_back({"slope_gap", gap, *e.thresholds.slope_tolerance,
                                  gap <= *e.thresholds.slope_tolerance});
            }
            Json report = io::to_json(r);
            report["checks"] = checks_json(checks);
            run.write("rate_errors.csv", csv([&](std::ostream& os) { io::write_rate_errors_csv(os, r); }));
            run.write_json("rate_report.json", report);
            out << "fitted slope " << io::format_double(r.fitted_slope) << " (expected "
                << io::format_double(r.expected_slope) << ")\n";
            enforce(checks);
        };
    });

    law_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        const io::ExperimentConfig e = require_experiment(cfg);
        const io::LimitConfig l = cfg.limit.value_or(io::LimitConfig{});
        const FbmGrid grid(l.u_max, l.step, p.hurst());
        action = [&, cfg, p, e, l, grid](Run& run) {
            run.set("config", io::to_json(cfg));
            run.set("seed", e.seed);
            const LimitSample s =
                run.timed("limit_sample", [&] { return sample_limit_argmax(grid, l.draws, l.seed); });
            const DistReport r = run.timed("estimates", [&] {
                return run_limit_experiment(p, e.n, e.replications, s, e.seed, e.estimator);
            });
            std::vector<Check> checks;
            if (e.thresholds.ks_max) {
                checks.push_back({"ks_statistic", r.ks_statistic, *e.thresholds.ks_max,
                                  r.ks_statistic < *e.thresholds.ks_max});
            }
            if (e.thresholds.moment_gap_max_std) {
                for (const auto& m : r.moment_table) {
                    if (m.p != 2.0) continue;
                    const double gap = m.gap_in_std();
                    checks.push_back({"second_moment_gap_std", gap, *e.thresholds.moment_gap_max_std,
                                      gap < *e.thresholds.moment_gap_max_std});
                }
            }
            Json report = io::to_json(r);
            report["limit_sample"] = io::limit_summary(s);
            report["checks"] = checks_json(checks);
            run.write("limit_errors.csv", csv([&](std::ostream& os) {
                          io::write_column_csv(os, "normalized_error", r.normalized_errors);
                      }));
            run.write("limit_draws.csv",
                      csv([&](std::ostream& os) { io::write_column_csv(os, "u_hat", s.draws); }));
            run.write_json("limit_report.json", report);
            out << "KS statistic " << io::format_double(r.ks_statistic) << "\n";
            enforce(checks);
        };
    });

    con_cmd->callback([&] {
        const auto cfg = load_config(config_path);
        config_out_dir = cfg.output_dir;
        const ModelParams p = require_model(cfg);
        const io::ExperimentConfig e = require_experiment(cfg);
        action = [&, cfg, p, e](Run& run) {
            run.set("config", io::to_json(cfg));
            run.set("seed", e.seed);
            const ContrastSummary s = run.timed("contrast", [&] {
                return consistency_contrast(p, e.n, e.replications, e.seed, e.estimator);
            });
            std::vector<Check> checks;
            if (e.thresholds.min_fraction) {
                checks.push_back({"fraction_closer_to_pseudo_true", s.fraction_closer_to_pseudo_true,
                                  *e.thresholds.min_fraction,
                                  s.fraction_closer_to_pseudo_true >= *e.thresholds.min_fraction});
            }
            Json report = io::to_json(s);
            report["checks"] = checks_json(checks);
            run.write("contrast_estimates.csv",
                      csv([&](std::ostream& os) { io::write_column_csv(os, "theta_n", s.estimates); }));
            run.write_json("contrast_report.json", report);
            out << "fraction closer to pseudo-true " << io::format_double(s.fraction_closer_to_pseudo_true)
                << "\n";
            enforce(checks);
        };
    });

    expo_cmd->callback([&] {
        std::vector<double> grid;
        io::RunConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
            config_out_dir = cfg.output_dir;
            if (cfg.experiment) grid = cfg.experiment->kappa_grid;
        }
        if (grid.empty()) {
            for (int i = 0; i <= 50; ++i) grid.push_back(0.01 * i);
        }
        const auto rows = rate_exponent_curves(grid);
        action = [&, cfg, grid, rows](Run& run) {
            Json c = io::to_json(cfg);
            c["kappa_grid"] = grid;
            run.set("config", c);
            run.write("exponents.csv", csv([&](std::ostream& os) { io::write_exponents_csv(os, rows); }));
            run.write_json("exponents.json", io::to_json(rows));
            out << "wrote " << rows.size() << " rows\n";
        };
    });

    std::optional<Run> run;
    try {
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--threads" || a == "--out") {
                ++i;
                continue;
            }
            if (a.starts_with("-")) continue;
            if (!app.get_subcommand_no_throw(a)) throw ValidationError("unknown subcommand '" + a + "'");
            break;
        }
        std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
        std::reverse(rev.begin(), rev.end());
        app.parse(rev);
        par::set_threads(g.threads);
        run.emplace(output_dir(g, config_out_dir), args);
        action(*run);
        run->finish(kOk);
        return kOk;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ThresholdViolation& e) {
        err << e.what() << "\n";
        if (run) run->finish(kThreshold);
        return kThreshold;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        if (run) run->finish(kNumerical);
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace cusp::cli
