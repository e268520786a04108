#include <optional>
#include <string>

#include "CLI11.hpp"

#include "legodo/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Leg-odometry toolkit: simulate gait datasets, run the "
        "contact-aware filter, and evaluate trajectories."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";

    auto* sim = app.add_subcommand("sim", "Generate a synthetic dataset");
    sim->add_option("--config", config_path, "JSON configuration file");
    sim->add_option("--out", out_dir, "Output dataset directory");
    std::optional<std::uint64_t> seed;
    sim->add_option("--seed", seed, "Override the RNG seed");

    auto* run = app.add_subcommand("run", "Run the estimator on a dataset");
    std::string dataset_dir;
    run->add_option("dataset", dataset_dir, "Dataset directory")->required();
    run->add_option("--config", config_path, "JSON configuration file");
    run->add_option("--out", out_dir, "Output directory");
    std::string detector = "fused";
    run->add_option("--detector", detector,
                    "Contact detector: fsm, glrt, or fused")
        ->check(CLI::IsMember({"fsm", "glrt", "fused"}));
    std::optional<double> sigma_base;
    run->add_option("--sigma-base", sigma_base,
                    "Measurement noise scale at full contact confidence");

    auto* eval = app.add_subcommand("eval", "Compare an estimate against "
                                            "ground truth");
    std::string est_path;
    std::string gt_path;
    eval->add_option("est", est_path, "Estimated trajectory file")
        ->required();
    eval->add_option("gt", gt_path, "Ground-truth trajectory file")
        ->required();
    eval->add_option("--out", out_dir, "Output directory");
    bool svg = false;
    eval->add_flag("--svg", svg, "Also write a 2-D overlay SVG");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        return legodo::cmd_sim(config_path, out_dir, seed);
    }
    if (run->parsed()) {
        legodo::RunOptions opts;
        opts.detector = legodo::parse_detector(detector);
        opts.sigma_base = sigma_base;
        return legodo::cmd_run(dataset_dir, config_path, out_dir, opts);
    }
    if (eval->parsed()) {
        return legodo::cmd_eval(est_path, gt_path, out_dir, svg);
    }
    return 1;
}
