#include <cstdlib>
#include <iostream>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "corrtensor/dualreg.hpp"
#include "corrtensor/harness.hpp"
#include "corrtensor/json_io.hpp"
#include "corrtensor/localreg.hpp"
#include "corrtensor/maxcorr.hpp"
#include "corrtensor/prob.hpp"
#include "corrtensor/ribbon.hpp"
#include "corrtensor/twoway.hpp"

namespace {

using namespace corrtensor;

constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;
constexpr int kExitParse = 4;
constexpr int kExitDomain = 5;

void write_or_print(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output);
    if (!out) throw FileError("cannot open " + output + " for writing");
    out << text;
}

std::vector<std::vector<double>> ray_directions(int count, int dim) {
    std::vector<std::vector<double>> rays;
    for (int r = 0; r < count; ++r) {
        std::vector<double> d = halton_point(r, dim, 1.0);
        double top = 0.0;
        for (double& x : d) {
            x += 1e-3;  // keep rays off the axes
            top = std::max(top, x);
        }
        for (double& x : d) x /= top;
        rays.push_back(std::move(d));
    }
    return rays;
}

std::string csv_row(const std::vector<double>& values, const std::string& tail = "") {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) row += ",";
        row += format_double(values[i]);
    }
    if (!tail.empty()) row += "," + tail;
    return row + "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"correlation-measure and rate-region toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for all randomized searches")->capture_default_str();
    if (const char* threads = std::getenv("CORRTENSOR_THREADS")) (void)threads;

    // ---- compute -----------------------------------------------------------
    auto* compute = app.add_subcommand("compute", "evaluate a measure");
    compute->require_subcommand(1);
    std::string dist_path, channel_path, method = "direct", form = "corner", output;
    int var_i = 0, var_j = 1, helper = -1;
    double lambda1 = 1.0, lambda2 = 1.0, lambda_scalar = 1.0;
    std::vector<double> lambdas;
    bool use_grid = false;

    auto* c_rho = compute->add_subcommand("rho", "maximal correlation");
    c_rho->add_option("--dist", dist_path)->required();
    c_rho->add_option("--i", var_i);
    c_rho->add_option("--j", var_j);

    auto* c_sstar = compute->add_subcommand("sstar", "initial efficiency s*");
    c_sstar->add_option("--dist", dist_path)->required();
    c_sstar->add_option("--i", var_i);
    c_sstar->add_option("--j", var_j);
    c_sstar->add_option("--method", method, "direct|ribbon|lce");

    auto* c_gz = compute->add_subcommand("gz", "two-way channel functional");
    c_gz->add_option("--channel", channel_path)->required();
    c_gz->add_option("--lambda1", lambda1)->required();
    c_gz->add_option("--lambda2", lambda2)->required();
    c_gz->add_flag("--grid", use_grid, "add the exhaustive channel grid");

    auto* c_gh = compute->add_subcommand("ghelper", "helper dual");
    c_gh->add_option("--dist", dist_path)->required();
    c_gh->add_option("--i", var_i);
    c_gh->add_option("--j", var_j);
    c_gh->add_option("--lambda", lambda_scalar)->required();

    auto* c_gs = compute->add_subcommand("gsideinfo", "side-information dual");
    c_gs->add_option("--dist", dist_path)->required();
    c_gs->add_option("--helper", helper, "-1 conditions on the full tuple");
    c_gs->add_option("--lambda", lambdas, "one weight per non-helper variable")->required();

    auto* c_gf = compute->add_subcommand("gfork", "fork dual, two leaves");
    c_gf->add_option("--dist", dist_path)->required();
    c_gf->add_option("--lambda1", lambda1)->required();
    c_gf->add_option("--lambda2", lambda2)->required();
    c_gf->add_option("--form", form, "corner|alternative");

    // ---- region ------------------------------------------------------------
    auto* region = app.add_subcommand("region", "trace a region boundary to CSV");
    region->require_subcommand(1);
    int directions = 16;
    double resolution = 1e-3;
    auto* r_hc = region->add_subcommand("hc", "hypercontractivity ribbon");
    r_hc->add_option("--dist", dist_path)->required();
    r_hc->add_option("--directions", directions);
    r_hc->add_option("--resolution", resolution);
    r_hc->add_option("--output", output);
    auto* r_lambda = region->add_subcommand("lambda", "spectral local region");
    r_lambda->add_option("--dist", dist_path)->required();
    r_lambda->add_option("--directions", directions);
    r_lambda->add_option("--helper", helper, "-1 conditions on the full tuple");
    r_lambda->add_option("--output", output);

    // ---- check -------------------------------------------------------------
    auto* check = app.add_subcommand("check", "property suites; exit 1 on failure");
    check->require_subcommand(1);
    std::string measure_str = "rho", dist2_path;
    std::vector<std::string> channel_paths;
    int samples = 16, power = 2;
    double tol = -1.0;
    for (const char* name : {"tensorization", "dataproc", "additivity"}) {
        auto* sub = check->add_subcommand(name);
        sub->add_option("--measure", measure_str, "rho|hc_aux|lambda_region|g_helper|g_side_info|g_fork")
            ->required();
        sub->add_option("--dist", dist_path)->required();
        sub->add_option("--samples", samples);
        sub->add_option("--tol", tol, "default depends on the measure");
        sub->add_option("--output", output);
        if (std::string(name) == "tensorization") sub->add_option("--power", power);
        if (std::string(name) == "dataproc")
            sub->add_option("--channel", channel_paths, "one per variable; defaults to random");
        if (std::string(name) == "additivity") sub->add_option("--dist2", dist2_path)->required();
    }

    // ---- twoway ------------------------------------------------------------
    auto* twoway = app.add_subcommand("twoway", "two-way channel tools");
    twoway->require_subcommand(1);
    double eta = 0.5;
    std::string from_path, to_path;
    auto* t_pr = twoway->add_subcommand("prbox", "emit the PR-box channel");
    t_pr->add_option("--eta", eta)->required();
    t_pr->add_option("--output", output);
    auto* t_sim = twoway->add_subcommand("simcheck", "simulation impossibility witness");
    t_sim->add_option("--from", from_path)->required();
    t_sim->add_option("--to", to_path)->required();

    // ---- securesim ---------------------------------------------------------
    auto* secsim = app.add_subcommand("securesim", "secure-simulation precondition");
    std::string source_path, target_path;
    int sim_grid = 21;
    secsim->add_option("--source", source_path, "tripartite (X1, X2, Z) distribution")->required();
    secsim->add_option("--target", target_path, "bipartite target distribution")->required();
    secsim->add_option("--grid", sim_grid, "lambda grid points per axis");

    CLI11_PARSE(app, argc, argv);
    OptimOptions base;
    base.seed = seed;

    if (c_rho->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        std::cout << format_double(rho(dist, var_i, var_j)) << "\n";
    } else if (c_sstar->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        double v = s_star(dist, var_i, var_j, s_star_method_from_string(method), base);
        std::cout << format_double(v) << "\n";
    } else if (c_gz->parsed()) {
        Channel channel = load_channel(channel_path);
        GzEvaluation eval = use_grid
                                ? g_z_channel_grid(channel, lambda1, lambda2, default_gz_grid(), base)
                                : g_z_channel(channel, lambda1, lambda2, base);
        std::cout << format_double(eval.value) << " argmax_input=" << eval.argmax_input[0] << ","
                  << eval.argmax_input[1] << "\n";
    } else if (c_gh->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        std::cout << format_double(g_helper(dist, var_i, var_j, lambda_scalar, base).value) << "\n";
    } else if (c_gs->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        std::cout << format_double(g_side_info(dist, helper, lambdas, base).value) << "\n";
    } else if (c_gf->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        ForkForm f = form == "alternative" ? ForkForm::Alternative : ForkForm::Corner;
        std::cout << format_double(g_fork_k2(dist, lambda1, lambda2, f, base).value) << "\n";
    } else if (r_hc->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        auto rays = ray_directions(directions, dist.num_variables());
        std::string csv = "direction...,crossing,margin_below,margin_above,monotone\n";
        for (const BoundaryPoint& bp : hc_boundary_sample(dist, rays, resolution, base)) {
            std::vector<double> row = bp.direction;
            row.push_back(bp.crossing);
            row.push_back(bp.margin_below);
            row.push_back(bp.margin_above);
            csv += csv_row(row, bp.monotone ? "1" : "0");
        }
        write_or_print(csv, output);
    } else if (r_lambda->parsed()) {
        JointDistribution dist = load_distribution(dist_path);
        int dim = helper < 0 ? dist.num_variables() : dist.num_variables() - 1;
        std::string csv = "direction...,crossing\n";
        for (const auto& ray : ray_directions(directions, dim)) {
            std::vector<double> row = ray;
            row.push_back(lambda_boundary(dist, helper, ray));
            csv += csv_row(row);
        }
        write_or_print(csv, output);
    } else if (check->parsed()) {
        Measure measure = measure_from_string(measure_str);
        JointDistribution dist = load_distribution(dist_path);
        if (tol < 0.0) tol = measure == Measure::Rho ? 1e-8 : 2e-3;
        PropertyReport report;
        if (check->get_subcommands()[0]->get_name() == "tensorization") {
            report = check_tensorization(measure, dist, power, samples, tol, seed);
        } else if (check->get_subcommands()[0]->get_name() == "dataproc") {
            std::vector<Channel> channels;
            if (channel_paths.empty()) {
                std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 29);
                for (int i = 0; i < dist.num_variables(); ++i) {
                    bool is_helper = measure != Measure::Rho && measure != Measure::HcAux &&
                                     i == dist.num_variables() - 1;
                    channels.push_back(is_helper
                                           ? Channel::identity(dist.cardinality(i))
                                           : random_local_channel(rng, dist.cardinality(i),
                                                                  dist.cardinality(i)));
                }
            } else {
                for (const std::string& path : channel_paths) channels.push_back(load_channel(path));
            }
            report = check_data_processing(measure, dist, channels, samples, tol, seed);
        } else {
            report = check_additivity(measure, dist, load_distribution(dist2_path), samples, tol,
                                      seed);
        }
        write_or_print(report_to_json(report), output);
        return report.passed ? 0 : 1;
    } else if (t_pr->parsed()) {
        Channel box = pr_box(eta);
        if (output.empty()) {
            std::cout << "pr_box eta=" << format_double(eta) << " zero_capacity="
                      << (zero_capacity_check(box).zero_capacity ? "true" : "false") << "\n";
            for (const auto& row : box.kernel()) std::cout << csv_row(row);
        } else {
            save_channel(box, output);
        }
    } else if (t_sim->parsed()) {
        SimulationCheck result =
            simulation_precondition(load_channel(from_path), load_channel(to_path), {}, seed);
        if (result.witness_found) {
            std::cout << "witness lambda=" << format_double(result.witness_lambda[0]) << ","
                      << format_double(result.witness_lambda[1])
                      << " g_from=" << format_double(result.g_from)
                      << " g_to=" << format_double(result.g_to) << "\n";
        } else {
            std::cout << "pass: no impossibility witness found\n";
        }
    } else if (secsim->parsed()) {
        JointDistribution source = load_distribution(source_path);
        JointDistribution target = load_distribution(target_path);
        std::vector<std::vector<double>> lambdas2;
        for (int i = 0; i < sim_grid; ++i)
            for (int j = 0; j < sim_grid; ++j)
                lambdas2.push_back({static_cast<double>(i) / (sim_grid - 1),
                                    static_cast<double>(j) / (sim_grid - 1)});
        SecureSimResult result = secure_sim_precondition(source, target, lambdas2, base);
        if (result.witness_found) {
            std::cout << "witness lambda=" << format_double(result.witness_lambda[0]) << ","
                      << format_double(result.witness_lambda[1])
                      << " source_margin=" << format_double(result.source_margin)
                      << " target_margin=" << format_double(result.target_margin) << "\n";
        } else {
            std::cout << "pass: no impossibility witness found\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const corrtensor::FileError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kExitFile;
    } catch (const corrtensor::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const corrtensor::ProbError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
