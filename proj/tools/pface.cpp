// Copyright 2026 The pface Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pface/error.hpp"
#include "pface/geometry.hpp"
#include "pface/gradcheck.hpp"
#include "pface/io.hpp"
#include "pface/metrics.hpp"
#include "pface/pnp.hpp"
#include "pface/regressor.hpp"
#include "pface/synth.hpp"
#include "pface/topology.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace pface;

namespace {

struct GlobalOptions
{
    bool verbose = false;
};

void require_file(const fs::path& p, const char* what)
{
    if (!fs::is_regular_file(p))
        throw IoError(std::string(what) + " not found: " + p.string());
}

void require_dir(const fs::path& p, const char* what)
{
    if (!fs::is_directory(p))
        throw IoError(std::string(what) + " is not a directory: " + p.string());
}

int cmd_score(const fs::path& gt_dir, const fs::path& pred_dir, const fs::path& out)
{
    require_dir(gt_dir, "--gt-dir");
    require_dir(pred_dir, "--pred-dir");
    const ScoreReport report = score_submission(load_instances(gt_dir), load_instances(pred_dir));
    io::write_text(out, report_csv(report));
    std::printf("instances %zu\nmean_l_error_mm %s\n", report.instances.size(),
                io::format_9g(report.mean_l_error_mm).c_str());
    return 0;
}

int cmd_fit_pnp(const fs::path& vertices, const fs::path& landmarks, const fs::path& intrinsics, const fs::path& out,
                const GlobalOptions& g)
{
    require_file(vertices, "--vertices");
    require_file(landmarks, "--landmarks");
    require_file(intrinsics, "--intrinsics");
    const PnPResult r =
        solve_pnp(io::load_vertices(vertices), io::load_landmarks(landmarks), io::load_intrinsics(intrinsics));
    if (!out.empty())
        io::save_pose(out, r.pose);
    std::printf("rms_px %s\n", io::format_9g(r.rms_reprojection_error).c_str());
    if (g.verbose)
        std::fprintf(stderr, "iterations %d converged %d initial_cost %s final_cost %s\n", r.iterations,
                     r.converged ? 1 : 0, io::format_9g(r.initial_cost).c_str(),
                     io::format_9g(r.final_cost).c_str());
    return 0;
}

int cmd_project(const fs::path& vertices, const fs::path& pose, const fs::path& intrinsics, const fs::path& out)
{
    require_file(vertices, "--vertices");
    require_file(pose, "--pose");
    require_file(intrinsics, "--intrinsics");
    io::save_landmarks(out, project_world(io::load_vertices(vertices), io::load_pose(pose),
                                          io::load_intrinsics(intrinsics)));
    return 0;
}

int cmd_synth(const DatasetConfig& cfg, const fs::path& out)
{
    const SyntheticDataset data = generate_dataset(cfg);
    write_dataset(data, out);
    std::printf("instances %zu\nvertices %lld\ntriangles %lld\n", data.instances.size(),
                static_cast<long long>(data.model.topology.n_vertices()),
                static_cast<long long>(data.model.topology.n_triangles()));
    return 0;
}

int cmd_train(const fs::path& data_dir, const fs::path& out, const TrainConfig& cfg)
{
    require_dir(data_dir, "--data");
    const TrainResult result = train_on_dataset(load_dataset(data_dir), cfg);
    save_model(out, result.model);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        std::printf("epoch %zu loss %s\n", e + 1, io::format_9g(result.epoch_loss[e]).c_str());
    return 0;
}

int cmd_predict(const fs::path& model_path, const fs::path& data_dir, const fs::path& out, bool baseline,
                const GlobalOptions& g)
{
    require_file(model_path, "--model");
    require_dir(data_dir, "--data");
    const RegressorModel model = load_model(model_path);
    const Dataset data = load_dataset(data_dir);
    if (data.instances.empty())
        throw EmptyDataset("no instances in " + data_dir.string());
    fs::create_directories(out);
    for (const auto& inst : data.instances) {
        const Eigen::VectorXd features = model.encoding.encode(inst.landmarks);
        const PosedPrediction pred = baseline ? predict_template_baseline(model, features, inst.intrinsics)
                                              : predict_with_pose(model, features, inst.intrinsics);
        save_instance(out, inst.id, {pred.vertices, pred.pnp.pose});
        if (g.verbose)
            std::fprintf(stderr, "%s rms_px %s\n", inst.id.c_str(),
                         io::format_9g(pred.pnp.rms_reprojection_error).c_str());
    }
    std::printf("instances %zu\n", data.instances.size());
    return 0;
}

int cmd_gradcheck(const GradcheckOptions& opt)
{
    bool ok = true;
    for (const GradcheckResult& r : run_gradchecks(opt)) {
        std::printf("%-22s max_rel_error %-14s tol %-8s %s\n", r.name.c_str(),
                    io::format_9g(r.max_relative_error).c_str(), io::format_9g(r.tolerance).c_str(),
                    r.passed() ? "ok" : "FAIL");
        ok = ok && r.passed();
    }
    return ok ? 0 : 1;
}

int cmd_export_obj(const fs::path& vertices, const fs::path& topology, const fs::path& out)
{
    require_file(vertices, "--vertices");
    require_file(topology, "--topology");
    export_obj(io::load_vertices(vertices), load_topology(topology), out);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pface: face mesh, landmark and pose toolkit"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_flag("-v,--verbose", global.verbose, "Diagnostics on stderr");

    std::function<int()> run;

    fs::path gt_dir, pred_dir, out;
    auto* score = app.add_subcommand("score", "Score predictions against ground truth");
    score->add_option("--gt-dir", gt_dir)->required();
    score->add_option("--pred-dir", pred_dir)->required();
    score->add_option("--out", out, "Report CSV")->required();
    score->callback([&] { run = [&] { return cmd_score(gt_dir, pred_dir, out); }; });

    fs::path vertices, landmarks, intrinsics, pose;
    auto* fit = app.add_subcommand("fit-pnp", "Recover a pose from vertices and their projections");
    fit->add_option("--vertices", vertices)->required();
    fit->add_option("--landmarks", landmarks)->required();
    fit->add_option("--intrinsics", intrinsics)->required();
    fit->add_option("--out", out, "Pose JSON");
    fit->callback([&] { run = [&] { return cmd_fit_pnp(vertices, landmarks, intrinsics, out, global); }; });

    auto* project = app.add_subcommand("project", "Project world vertices to pixels");
    project->add_option("--vertices", vertices)->required();
    project->add_option("--pose", pose)->required();
    project->add_option("--intrinsics", intrinsics)->required();
    project->add_option("--out", out, "Landmark file (.json or .csv)")->required();
    project->callback([&] { run = [&] { return cmd_project(vertices, pose, intrinsics, out); }; });

    DatasetConfig synth_cfg;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--n", synth_cfg.n_instances, "Instance count")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_cfg.seed);
    synth->add_option("--out", out, "Output directory")->required();
    synth->add_option("--sigma-px", synth_cfg.sigma_px, "Landmark noise")->check(CLI::NonNegativeNumber);
    synth->add_option("--n-vertices", synth_cfg.n_vertices);
    synth->add_option("--n-basis", synth_cfg.n_basis);
    synth->add_option("--model-seed", synth_cfg.model_seed);
    synth->add_option("--depth-min", synth_cfg.ranges.depth_min);
    synth->add_option("--depth-max", synth_cfg.ranges.depth_max);
    synth->add_option("--yaw", synth_cfg.ranges.yaw_deg, "Yaw bound, degrees");
    synth->add_option("--pitch", synth_cfg.ranges.pitch_deg, "Pitch bound, degrees");
    synth->add_option("--roll", synth_cfg.ranges.roll_deg, "Roll bound, degrees");
    synth->add_option("--coeff-sigma", synth_cfg.ranges.coeff_sigma);
    synth->callback([&] { run = [&] { return cmd_synth(synth_cfg, out); }; });

    TrainConfig train_cfg;
    long warmup = -1;
    fs::path data_dir;
    auto* train = app.add_subcommand("train", "Train the joint mesh and landmark regressor");
    train->add_option("--data", data_dir)->required();
    train->add_option("--out", out, "Model file")->required();
    train->add_option("--epochs", train_cfg.epochs);
    train->add_option("--lr", train_cfg.learning_rate);
    train->add_option("--batch", train_cfg.batch_size);
    train->add_option("--seed", train_cfg.seed);
    train->add_option("--warmup", warmup, "Warmup steps (default min(1000, total/10))");
    train->add_option("--poly-power", train_cfg.poly_power);
    train->add_option("--hidden", train_cfg.hidden);
    train->add_option("--feature-points", train_cfg.feature_points);
    train->add_option("--feature-noise-px", train_cfg.feature_noise_px);
    train->add_option("--edge-weight", train_cfg.weights.edge);
    train->add_option("--landmark-weight", train_cfg.weights.landmark);
    train->callback([&] {
        if (warmup >= 0)
            train_cfg.warmup_steps = warmup;
        run = [&] { return cmd_train(data_dir, out, train_cfg); };
    });

    fs::path model_path;
    auto* predict = app.add_subcommand("predict", "Predict meshes and poses for a dataset");
    predict->add_option("--model", model_path)->required();
    predict->add_option("--data", data_dir)->required();
    predict->add_option("--out", out, "Prediction directory")->required();
    bool baseline = false;
    predict->add_flag("--baseline", baseline, "Template mesh posed by DLT on the feature points");
    predict->callback([&] { run = [&] { return cmd_predict(model_path, data_dir, out, baseline, global); }; });

    GradcheckOptions grad_opt;
    auto* grad = app.add_subcommand("gradcheck", "Finite-difference checks of all analytic gradients");
    grad->add_option("--seed", grad_opt.seed);
    grad->add_option("--points", grad_opt.n_points)->check(CLI::Range(9, 100000));
    grad->callback([&] { run = [&] { return cmd_gradcheck(grad_opt); }; });

    fs::path topology;
    auto* obj = app.add_subcommand("export-obj", "Write a mesh as Wavefront OBJ");
    obj->add_option("--vertices", vertices)->required();
    obj->add_option("--topology", topology)->required();
    obj->add_option("--out", out)->required();
    obj->callback([&] { run = [&] { return cmd_export_obj(vertices, topology, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* sub = nullptr;
        for (const CLI::App* s : app.get_subcommands())
            sub = s;
        std::cerr << (sub ? sub->help() : app.help());
        return 2;
    }

    try {
        return run();
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
