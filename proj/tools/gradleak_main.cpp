// Command-line driver: generate victim gradients, run the reconstruction
// attack, audit architectures, and score reconstructions.
//
// Exit codes: 0 success, 2 validation failure, 3 rank-deficient system,
// 4 all dense bias gradients zero, 1 unexpected error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradleak/attack.hpp"
#include "gradleak/audit.hpp"
#include "gradleak/errors.hpp"
#include "gradleak/image_io.hpp"
#include "gradleak/metrics.hpp"
#include "gradleak/serde.hpp"
#include "gradleak/victim.hpp"

namespace {

using gradleak::Tensor;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct GradgenArgs {
    std::string arch_path;
    std::string params_path;
    std::string params_out = "params.json";
    std::string input_path;
    std::string out_path;
    std::uint64_t seed = 0;
    std::size_t label = 0;
};

int run_gradgen(const GradgenArgs& args) {
    const auto arch = gradleak::parse_architecture(gradleak::read_text_file(args.arch_path));

    gradleak::ParameterSet params;
    const bool generated = args.params_path.empty();
    if (generated) {
        params = gradleak::init_parameters(arch, args.seed);
    } else {
        params = gradleak::parse_parameters(gradleak::read_text_file(args.params_path));
        gradleak::check_parameters(arch, params);
    }

    const Tensor input = gradleak::load_tensor_or_image(args.input_path);
    const auto grads = gradleak::compute_gradients(arch, params, input, args.label, args.seed);

    gradleak::write_text_file(args.out_path, gradleak::serialize_gradients(grads));
    if (generated)
        gradleak::write_text_file(args.params_out, gradleak::serialize_parameters(params));
    return 0;
}

struct AttackArgs {
    std::string arch_path;
    std::string params_path;
    std::string grads_path;
    std::string out_path;
    std::string report_path;
    std::string original_path;
    bool no_weight_constraints = false;
    bool fc_averaging = false;
};

nlohmann::ordered_json report_to_json(const gradleak::ReconstructionReport& report) {
    nlohmann::ordered_json doc;
    doc["input_shape"] = report.input.shape();
    doc["unknown_ordering"] = "channel,row,col row-major";
    auto& layers = doc["layers"] = nlohmann::ordered_json::array();
    for (const auto& state : report.layers) {
        const auto& d = state.diagnostics;
        nlohmann::ordered_json entry;
        entry["layer"] = d.layer_index;
        entry["type"] = d.layer_type;
        entry["n_weight_constraints"] = d.n_weight_constraints;
        entry["n_gradient_constraints"] = d.n_gradient_constraints;
        entry["n_unknowns"] = d.n_unknowns;
        entry["rank"] = d.matrix_rank;
        entry["residual"] = d.residual_norm;
        layers.push_back(std::move(entry));
    }
    if (report.mse) {
        doc["metrics"]["mse"] = *report.mse;
        doc["metrics"]["psnr"] = std::isfinite(*report.psnr)
                                     ? nlohmann::ordered_json(*report.psnr)
                                     : nlohmann::ordered_json("inf");
    }
    doc["wall_time_seconds"] = report.wall_time_seconds;
    return doc;
}

int run_attack_cmd(const AttackArgs& args) {
    const auto arch = gradleak::parse_architecture(gradleak::read_text_file(args.arch_path));
    const auto params = gradleak::parse_parameters(gradleak::read_text_file(args.params_path));
    const auto grads = gradleak::parse_gradients(gradleak::read_text_file(args.grads_path));

    gradleak::AttackOptions opts;
    opts.use_weight_constraints = !args.no_weight_constraints;
    opts.fc_averaging = args.fc_averaging;
    opts.rank_eps = gradleak::default_rank_eps();

    auto report = gradleak::run_attack(arch, params, grads, opts);

    if (!args.original_path.empty()) {
        const Tensor original = gradleak::load_tensor_or_image(args.original_path);
        const auto m = gradleak::evaluate_images(original, report.input);
        report.mse = m.mse;
        report.psnr = m.psnr;
    }

    gradleak::save_tensor_or_image(args.out_path, report.input);
    if (!args.report_path.empty())
        gradleak::write_text_file(args.report_path, report_to_json(report).dump(2) + "\n");
    return 0;
}

struct AuditArgs {
    std::string arch_path;
    std::string params_path;
    std::string grads_path;
    std::string out_path;
    bool as_json = false;
};

int run_audit(const AuditArgs& args) {
    const auto arch = gradleak::parse_architecture(gradleak::read_text_file(args.arch_path));

    std::vector<gradleak::LayerAudit> audits;
    if (!args.params_path.empty() && !args.grads_path.empty()) {
        const auto params = gradleak::parse_parameters(gradleak::read_text_file(args.params_path));
        const auto grads = gradleak::parse_gradients(gradleak::read_text_file(args.grads_path));
        audits = gradleak::audit_with_empirical(arch, params, grads, gradleak::default_rank_eps());
    } else if (args.params_path.empty() != args.grads_path.empty()) {
        std::cerr << "error: --params and --grads must be given together\n";
        return 2;
    } else {
        audits = gradleak::audit_architecture(arch);
    }

    const std::string text =
        args.as_json ? gradleak::audit_json(audits) : gradleak::audit_table(audits);
    if (args.out_path.empty())
        std::cout << text;
    else
        gradleak::write_text_file(args.out_path, text);
    return 0;
}

struct EvalArgs {
    std::string original_path;
    std::string reconstructed_path;
};

int run_eval(const EvalArgs& args) {
    const Tensor original = gradleak::load_tensor_or_image(args.original_path);
    const Tensor reconstructed = gradleak::load_tensor_or_image(args.reconstructed_path);
    const auto m = gradleak::evaluate_images(original, reconstructed);
    std::cout << "mse " << format_number(m.mse) << '\n';
    std::cout << "psnr " << (std::isfinite(m.psnr) ? format_number(m.psnr) : "inf") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analytic gradient-inversion attack toolkit"};
    app.require_subcommand(1);

    GradgenArgs gradgen;
    auto* cmd_gradgen =
        app.add_subcommand("gradgen", "run one victim training step and leak its gradients");
    cmd_gradgen->add_option("--arch", gradgen.arch_path, "architecture JSON")->required();
    cmd_gradgen->add_option("--params", gradgen.params_path,
                            "existing parameter file (omit to generate from --seed)");
    cmd_gradgen->add_option("--params-out", gradgen.params_out,
                            "where generated parameters are written");
    cmd_gradgen->add_option("--seed", gradgen.seed, "RNG seed for generated parameters");
    cmd_gradgen->add_option("--input", gradgen.input_path, "training image (.ppm/.pgm/.json)")
        ->required();
    cmd_gradgen->add_option("--label", gradgen.label, "class label of the sample")->required();
    cmd_gradgen->add_option("--out", gradgen.out_path, "gradient bundle output path")->required();

    AttackArgs attack;
    auto* cmd_attack =
        app.add_subcommand("attack", "reconstruct the training input from leaked gradients");
    cmd_attack->add_option("--arch", attack.arch_path, "architecture JSON")->required();
    cmd_attack->add_option("--params", attack.params_path, "parameter file")->required();
    cmd_attack->add_option("--grads", attack.grads_path, "gradient bundle")->required();
    cmd_attack->add_option("--out", attack.out_path, "reconstructed image path (.ppm/.pgm/.json)")
        ->required();
    cmd_attack->add_option("--report", attack.report_path, "per-layer diagnostics JSON");
    cmd_attack->add_option("--original", attack.original_path,
                           "original image; adds MSE/PSNR to the report");
    cmd_attack->add_flag("--no-weight-constraints", attack.no_weight_constraints,
                         "solve with gradient constraint rows only");
    cmd_attack->add_flag("--fc-averaging", attack.fc_averaging,
                         "average the dense recovery over all usable output nodes");

    AuditArgs audit;
    auto* cmd_audit = app.add_subcommand("audit", "rank/constraint vulnerability analysis");
    cmd_audit->add_option("--arch", audit.arch_path, "architecture JSON")->required();
    cmd_audit->add_option("--params", audit.params_path,
                          "parameter file (with --grads: adds measured ranks)");
    cmd_audit->add_option("--grads", audit.grads_path, "gradient bundle");
    cmd_audit->add_option("--out", audit.out_path, "write the report here instead of stdout");
    cmd_audit->add_flag("--json", audit.as_json, "emit JSON instead of the text table");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "MSE/PSNR between two images");
    cmd_eval->add_option("--original", eval.original_path, "reference image")->required();
    cmd_eval->add_option("--reconstructed", eval.reconstructed_path, "image under test")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_gradgen->parsed()) return run_gradgen(gradgen);
        if (cmd_attack->parsed()) return run_attack_cmd(attack);
        if (cmd_audit->parsed()) return run_audit(audit);
        return run_eval(eval);
    } catch (const gradleak::RankDeficientError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const gradleak::BiasGradientsZeroError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const gradleak::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
