// Command-line front end: analyze layer norms and amplification bounds,
// run DeepFool / random perturbation studies, estimate condition numbers,
// sweep input quantization bit-widths, and generate fixture data/models.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netcond/netcond.hpp"

namespace {

using namespace netcond;

constexpr int kExitOk = 0;
constexpr int kExitDegenerate = 1;
constexpr int kExitUsage = 2;

std::string join_command(int argc, char** argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i) cmd += ' ';
        cmd += argv[i];
    }
    return cmd;
}

std::vector<std::size_t> selected_indices(const Dataset& ds, const std::string& split) {
    if (split == "all") {
        std::vector<std::size_t> idx(ds.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return idx;
    }
    if (split == "train") return ds.indices_of(Split::train);
    if (split == "test") return ds.indices_of(Split::test);
    throw InvalidArgument("--split must be one of train, test, all");
}

struct OutputOptions {
    std::string out_path;  // empty: stdout only
    std::string format = "table";
};

// Reports always materialize both serializations when --out is given:
// the structured JSON at the given path and the flat table alongside it.
void emit_report(const json& structured, const Table& table, const OutputOptions& opts) {
    if (!opts.out_path.empty()) {
        write_structured(structured, opts.out_path);
        write_table(table, table_path_for(opts.out_path));
    }
    if (opts.format == "structured") {
        std::cout << structured.dump(2) << "\n";
    } else {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            std::cout << (i ? "\t" : "") << table.header[i];
        std::cout << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "\t" : "") << row[i];
            std::cout << "\n";
        }
    }
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Layer activation_from_name(const std::string& name, double alpha) {
    if (name == "relu") return Layer::relu();
    if (name == "leaky_relu") return Layer::leaky_relu(alpha);
    if (name == "elu") return Layer::elu(alpha);
    if (name == "sigmoid") return Layer::sigmoid();
    if (name == "tanh") return Layer::tanh();
    throw InvalidArgument("unknown activation '" + name + "'");
}

// --- analyze -------------------------------------------------------------

int cmd_analyze(const std::string& model_path, const OutputOptions& opts, double tol,
                int max_iter, const ReportMeta& meta) {
    const Network net = load_model(model_path);
    const std::vector<LayerBound> bounds = layer_bounds(net, tol, max_iter);
    const Bound product = product_bound(bounds);
    const Bound cumulative = cumulative_bound(bounds);

    json j;
    j["meta"] = meta_to_json(meta);
    j["params"] = {{"tol", tol}, {"max_iter", max_iter}};
    json jb = json::array();
    for (const LayerBound& b : bounds) jb.push_back(to_json(b));
    j["layer_bounds"] = jb;
    j["product_bound"] = {{"value", product.value}, {"converged", product.converged}};
    j["cumulative_bound"] = {{"value", cumulative.value}, {"converged", cumulative.converged}};

    Table table;
    table.header = {"layer_index", "kind", "operator_norm", "converged"};
    for (std::size_t i = 0; i < bounds.size(); ++i)
        table.rows.push_back({std::to_string(bounds[i].layer_index),
                              kind_name(net.layers()[i].kind), format_g17(bounds[i].operator_norm),
                              bounds[i].converged ? "1" : "0"});
    emit_report(j, table, opts);
    std::cout << "product_bound\t" << format_g17(product.value) << "\n"
              << "cumulative_bound\t" << format_g17(cumulative.value) << "\n";
    if (!product.converged || !cumulative.converged)
        std::cout << "warning: power iteration did not converge on every layer\n";
    return kExitOk;
}

// --- attack ----------------------------------------------------------------

struct AttackOutcome {
    std::vector<PerturbationResult> results;
    std::size_t skipped_misclassified = 0;
};

AttackOutcome run_attacks(const Network& net, const Dataset& ds,
                          const std::vector<std::size_t>& indices, double overshoot, int max_iter,
                          bool clamp01, std::size_t workers) {
    struct Row {
        bool attacked = false;
        PerturbationResult result;
    };
    const std::vector<Row> rows = parallel_map<Row>(indices.size(), workers, [&](std::size_t k) {
        Row row;
        const std::size_t i = indices[k];
        if (classify(net, ds.features[i]) != ds.labels[i]) return row; // already wrong
        row.attacked = true;
        row.result = deepfool(net, ds.features[i], overshoot, max_iter, clamp01, i);
        return row;
    });
    AttackOutcome outcome;
    for (const Row& row : rows) {
        if (row.attacked)
            outcome.results.push_back(row.result);
        else
            ++outcome.skipped_misclassified;
    }
    return outcome;
}

int cmd_attack(const std::string& model_path, const std::string& data_path,
               const OutputOptions& opts, double overshoot, int max_iter, bool clamp01,
               const std::string& split, std::size_t workers, const ReportMeta& meta) {
    const Network net = load_model(model_path);
    const Dataset ds = load_dataset(data_path);
    const std::vector<std::size_t> indices = selected_indices(ds, split);
    if (indices.empty()) throw EmptyResult("attack: no samples in split '" + split + "'");

    const AttackOutcome outcome =
        run_attacks(net, ds, indices, overshoot, max_iter, clamp01, workers);

    std::size_t successes = 0;
    std::vector<double> iteration_counts;
    for (const PerturbationResult& r : outcome.results) {
        if (r.success) ++successes;
        iteration_counts.push_back(static_cast<double>(r.iterations));
    }
    const MagnitudeProfile profile = magnitude_profile(outcome.results);

    json j;
    j["meta"] = meta_to_json(meta);
    j["params"] = {{"overshoot", overshoot},
                   {"max_iter", max_iter},
                   {"clamp01", clamp01},
                   {"split", split}};
    json jr = json::array();
    for (const PerturbationResult& r : outcome.results) jr.push_back(to_json(r));
    j["records"] = jr;
    j["summary"] = {{"attempted", outcome.results.size()},
                    {"skipped_misclassified", outcome.skipped_misclassified},
                    {"successes", successes},
                    {"success_rate", outcome.results.empty()
                                         ? 0.0
                                         : static_cast<double>(successes) /
                                               static_cast<double>(outcome.results.size())},
                    {"median_iterations", median_of(iteration_counts)},
                    {"magnitude_profile", {{"min", profile.min},
                                           {"mean", profile.mean},
                                           {"max", profile.max},
                                           {"excluded_zero_norm", profile.excluded_zero_norm}}}};

    Table table;
    table.header = {"input_id",        "norm_x",     "norm_r",  "original_class",
                    "perturbed_class", "iterations", "success", "log10_x_over_r"};
    for (const PerturbationResult& r : outcome.results)
        table.rows.push_back({std::to_string(r.input_id), format_g17(r.norm_x),
                              format_g17(r.norm_r), std::to_string(r.original_class),
                              std::to_string(r.perturbed_class), std::to_string(r.iterations),
                              r.success ? "1" : "0",
                              r.norm_r > 0.0 ? format_g17(std::log10(r.norm_x / r.norm_r)) : "inf"});
    emit_report(j, table, opts);
    if (outcome.results.empty()) {
        std::cout << "attack: every sample was already misclassified\n";
        return kExitDegenerate;
    }
    return kExitOk;
}

// --- kappa -----------------------------------------------------------------

int cmd_kappa(const std::string& model_path, const std::string& data_path,
              const OutputOptions& opts, const std::string& source, std::size_t trials,
              std::uint64_t seed, const std::string& perturb_file, double overshoot, int max_iter,
              bool clamp01, double epsilon, const std::string& split, std::size_t workers,
              const ReportMeta& meta) {
    const Network net = load_model(model_path);
    const Dataset ds = load_dataset(data_path);
    const std::vector<std::size_t> indices = selected_indices(ds, split);
    if (indices.empty()) throw EmptyResult("kappa: no samples in split '" + split + "'");

    std::vector<Tensor> inputs;
    inputs.reserve(indices.size());
    for (std::size_t i : indices) inputs.push_back(ds.features[i]);

    PerturbationSource perturbation_source;
    if (source == "deepfool") {
        perturbation_source = deepfool_source(net, overshoot, max_iter, clamp01);
    } else if (source == "random") {
        // Magnitudes matched per input to the adversarial perturbation norms.
        auto magnitude_of = [&net, overshoot, max_iter, clamp01](std::size_t input_id,
                                                                 const Tensor& x) {
            return deepfool(net, x, overshoot, max_iter, clamp01, input_id).norm_r;
        };
        perturbation_source = random_source(seed, magnitude_of);
    } else if (source == "file") {
        if (perturb_file.empty())
            throw InvalidArgument("--source file requires --perturb-file PATH");
        std::ifstream in(perturb_file, std::ios::binary);
        if (!in) throw InvalidArgument("cannot open perturbation file '" + perturb_file + "'");
        json stored;
        try {
            stored = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError("perturbation file: " + std::string(e.what()));
        }
        if (!stored.contains("records"))
            throw ParseError("perturbation file: missing 'records'");
        std::vector<Tensor> perturbations(inputs.size());
        for (const json& rec : stored.at("records")) {
            const std::size_t id = rec.at("input_id").get<std::size_t>();
            // Stored ids refer to dataset rows; map back to corpus position.
            const auto it = std::find(indices.begin(), indices.end(), id);
            if (it == indices.end()) continue;
            const json& jr = rec.at("r");
            Tensor r(jr.at("shape").get<Shape>(),
                     le_bytes_to_doubles(base64_decode(jr.at("data").get<std::string>())));
            perturbations[static_cast<std::size_t>(it - indices.begin())] = std::move(r);
        }
        perturbation_source = fixed_source(std::move(perturbations));
    } else {
        throw InvalidArgument("--source must be one of deepfool, random, file");
    }

    const KappaMaxResult result = kappa_max(net, inputs, perturbation_source, trials, workers);

    std::vector<double> kappas;
    kappas.reserve(result.per_input.size());
    for (const KappaRecord& r : result.per_input) kappas.push_back(r.kappa);
    std::optional<PrecisionReport> precision;
    if (std::all_of(kappas.begin(), kappas.end(), [](double k) { return k > 0.0; }))
        precision = precision_report(kappas, epsilon);

    json j;
    j["meta"] = meta_to_json(meta);
    j["params"] = {{"source", source},   {"trials", trials},   {"overshoot", overshoot},
                   {"max_iter", max_iter}, {"clamp01", clamp01}, {"epsilon", epsilon},
                   {"split", split}};
    json jr = json::array();
    for (const KappaRecord& r : result.per_input) {
        json rec = to_json(r);
        // Echo the dataset row the record belongs to.
        rec["input_id"] = indices[r.input_id];
        jr.push_back(rec);
    }
    j["records"] = jr;
    j["skipped_degenerate"] = result.skipped_degenerate;
    json gm = to_json(result.global_max);
    gm["input_id"] = indices[result.global_max.input_id];
    j["global_max"] = gm;
    if (precision) j["precision"] = to_json(*precision);

    Table table;
    table.header = {"input_id", "norm_x", "norm_dx", "norm_y", "norm_dy", "kappa"};
    for (const KappaRecord& r : result.per_input)
        table.rows.push_back({std::to_string(indices[r.input_id]), format_g17(r.norm_x),
                              format_g17(r.norm_dx), format_g17(r.norm_y), format_g17(r.norm_dy),
                              format_g17(r.kappa)});
    emit_report(j, table, opts);

    if (precision)
        std::cout << "kappa mean\t" << format_g17(precision->mean.kappa) << "\tdigits\t"
                  << format_g17(precision->mean.minimum_digits) << "\tbits\t"
                  << precision->mean.minimum_bits << "\n"
                  << "kappa max\t" << format_g17(precision->max.kappa) << "\tdigits\t"
                  << format_g17(precision->max.minimum_digits) << "\tbits\t"
                  << precision->max.minimum_bits << "\n"
                  << "kappa min\t" << format_g17(precision->min.kappa) << "\tdigits\t"
                  << format_g17(precision->min.minimum_digits) << "\tbits\t"
                  << precision->min.minimum_bits << "\n";
    std::cout << "skipped_degenerate\t" << result.skipped_degenerate << "\n";
    return kExitOk;
}

// --- quantize-sweep ---------------------------------------------------------

int cmd_quantize_sweep(const std::string& model_path, const std::string& data_path,
                       const OutputOptions& opts, const std::vector<int>& bits,
                       std::size_t trials, std::uint64_t seed, double overshoot, int max_iter,
                       double kappa_tilde_override, const std::string& split, std::size_t workers,
                       const ReportMeta& meta) {
    const Network net = load_model(model_path);
    const Dataset ds = load_dataset(data_path);
    const std::vector<std::size_t> indices = selected_indices(ds, split);
    if (indices.empty()) throw EmptyResult("quantize-sweep: no samples in split '" + split + "'");

    std::vector<Tensor> inputs;
    inputs.reserve(indices.size());
    for (std::size_t i : indices) inputs.push_back(ds.features[i]);

    double kappa_tilde = kappa_tilde_override;
    std::string kappa_source = "override";
    if (!(kappa_tilde > 0.0)) {
        // Estimate from adversarial perturbations, the paper's estimator.
        const KappaMaxResult est =
            kappa_max(net, inputs, deepfool_source(net, overshoot, max_iter, false),
                      std::max<std::size_t>(trials, 1), workers);
        kappa_tilde = est.global_max.kappa;
        kappa_source = "deepfool";
    }
    (void)seed;

    const std::vector<BitSweepRow> rows = bit_sweep(net, inputs, bits, kappa_tilde, workers);

    json j;
    j["meta"] = meta_to_json(meta);
    j["params"] = {{"bits", bits},
                   {"split", split},
                   {"kappa_tilde", kappa_tilde},
                   {"kappa_tilde_source", kappa_source}};
    json jrows = json::array();
    for (const BitSweepRow& row : rows) jrows.push_back(to_json(row));
    j["rows"] = jrows;

    Table table;
    table.header = {"bits",      "input_id",    "rel_input_error", "rel_output_error",
                    "predicted", "kappa_holds", "chain_holds",     "misclassified"};
    for (const BitSweepRow& row : rows)
        for (const BitSweepInputRecord& rec : row.records)
            table.rows.push_back({std::to_string(row.bits), std::to_string(indices[rec.input_id]),
                                  format_g17(rec.rel_input_error),
                                  format_g17(rec.rel_output_error), format_g17(rec.predicted),
                                  rec.kappa_bound_holds ? "1" : "0",
                                  rec.chain_bound_holds ? "1" : "0",
                                  rec.misclassified ? "1" : "0"});
    emit_report(j, table, opts);

    for (const BitSweepRow& row : rows)
        std::cout << "bits " << row.bits << "\tmean_rel_in "
                  << format_g17(row.mean_rel_input_error) << "\tmean_rel_out "
                  << format_g17(row.mean_rel_output_error) << "\tmisclass "
                  << format_g17(row.misclassification_rate) << "\tpredicted "
                  << format_g17(row.predicted_output_error) << "\tchain_violations "
                  << row.chain_bound_violations << "\n";
    return kExitOk;
}

// --- gen-data / train-fixture ------------------------------------------------

int cmd_gen_data(const std::string& kind, const std::string& out_path, std::uint64_t seed,
                 std::size_t per_class, std::size_t classes, std::size_t dim, double spread,
                 std::size_t n, double noise, double test_fraction) {
    Dataset ds;
    if (kind == "blobs") {
        ds = make_blobs(per_class, classes, dim, spread, seed);
    } else if (kind == "spirals") {
        ds = make_two_spirals(n, noise, seed);
    } else {
        throw InvalidArgument("--kind must be blobs or spirals");
    }
    if (test_fraction > 0.0) assign_split(ds, test_fraction, derive_seed(seed, 0x5eed));
    save_dataset(ds, out_path);
    std::cout << "wrote " << ds.size() << " samples (" << ds.class_count << " classes, dim "
              << ds.dim() << ", " << ds.indices_of(Split::test).size() << " test) to " << out_path
              << "\n";
    return kExitOk;
}

int cmd_train_fixture(const std::string& data_path, const std::string& out_path,
                      const std::vector<std::size_t>& widths, const std::string& activation,
                      double alpha, std::size_t epochs, double lr, std::uint64_t seed,
                      std::size_t batch) {
    const Dataset ds = load_dataset(data_path);
    const Network net =
        train_mlp(widths, activation_from_name(activation, alpha), ds, epochs, lr, seed, batch);
    save_model(net, out_path);
    std::cout << "train_accuracy\t" << format_g17(accuracy(net, ds, Split::train)) << "\n";
    const std::vector<std::size_t> test_idx = ds.indices_of(Split::test);
    if (!test_idx.empty())
        std::cout << "test_accuracy\t" << format_g17(accuracy(net, ds, test_idx)) << "\n";
    std::cout << "wrote model to " << out_path << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural-network conditioning analyzer"};
    app.require_subcommand(1);

    std::string model_path, data_path, out_path, format = "table", split = "all";
    std::string source = "deepfool", perturb_file, kind = "blobs", activation = "relu";
    std::uint64_t seed = 0;
    std::size_t trials = 1, workers = 1, per_class = 100, classes = 3, dim = 2, n = 500,
                epochs = 100, batch = 32;
    double overshoot = kDefaultOvershoot, tol = kDefaultNormTol, epsilon = kBinary32Epsilon,
           spread = 0.5, noise = 0.1, test_fraction = 0.0, lr = 0.05, alpha = 0.1,
           kappa_tilde = 0.0;
    int max_iter_attack = kDefaultDeepfoolMaxIter, max_iter_norm = kDefaultNormMaxIter;
    bool clamp01 = false;
    std::vector<int> bits;
    std::vector<std::size_t> widths;

    CLI::App* analyze = app.add_subcommand("analyze", "layer operator norms and bounds");
    analyze->add_option("--model", model_path, "model file")->required();
    analyze->add_option("--out", out_path, "report path (JSON; table written alongside)");
    analyze->add_option("--format", format, "stdout format: table|structured");
    analyze->add_option("--tol", tol, "power iteration relative tolerance");
    analyze->add_option("--max-iter", max_iter_norm, "power iteration cap");

    CLI::App* attack = app.add_subcommand("attack", "DeepFool minimal perturbations");
    attack->add_option("--model", model_path, "model file")->required();
    attack->add_option("--data", data_path, "dataset file")->required();
    attack->add_option("--out", out_path, "report path");
    attack->add_option("--format", format, "stdout format: table|structured");
    attack->add_option("--seed", seed, "seed echoed in the report");
    attack->add_option("--overshoot", overshoot, "DeepFool overshoot");
    attack->add_option("--max-iter", max_iter_attack, "DeepFool iteration cap");
    attack->add_option("--workers", workers, "parallel workers");
    attack->add_option("--split", split, "train|test|all");
    attack->add_flag("--clamp01", clamp01, "clamp perturbed points to [0,1]");

    CLI::App* kappa_cmd = app.add_subcommand("kappa", "condition number estimation");
    kappa_cmd->add_option("--model", model_path, "model file")->required();
    kappa_cmd->add_option("--data", data_path, "dataset file")->required();
    kappa_cmd->add_option("--out", out_path, "report path");
    kappa_cmd->add_option("--format", format, "stdout format: table|structured");
    kappa_cmd->add_option("--source", source, "perturbation source: deepfool|random|file");
    kappa_cmd->add_option("--trials", trials, "perturbations per input (random source)");
    kappa_cmd->add_option("--seed", seed, "seed for random perturbations");
    kappa_cmd->add_option("--perturb-file", perturb_file, "stored perturbation report (source=file)");
    kappa_cmd->add_option("--overshoot", overshoot, "DeepFool overshoot");
    kappa_cmd->add_option("--max-iter", max_iter_attack, "DeepFool iteration cap");
    kappa_cmd->add_option("--epsilon", epsilon, "machine epsilon for the precision report");
    kappa_cmd->add_option("--workers", workers, "parallel workers");
    kappa_cmd->add_option("--split", split, "train|test|all");
    kappa_cmd->add_flag("--clamp01", clamp01, "clamp perturbed points to [0,1]");

    CLI::App* sweep = app.add_subcommand("quantize-sweep", "input bit-width sweep");
    sweep->add_option("--model", model_path, "model file")->required();
    sweep->add_option("--data", data_path, "dataset file")->required();
    sweep->add_option("--bits", bits, "bit widths, e.g. --bits 2,4,8")->required()->delimiter(',');
    sweep->add_option("--out", out_path, "report path");
    sweep->add_option("--format", format, "stdout format: table|structured");
    sweep->add_option("--trials", trials, "trials for the internal kappa estimate");
    sweep->add_option("--seed", seed, "seed echoed in the report");
    sweep->add_option("--overshoot", overshoot, "DeepFool overshoot");
    sweep->add_option("--max-iter", max_iter_attack, "DeepFool iteration cap");
    sweep->add_option("--kappa-tilde", kappa_tilde, "use this kappa estimate instead of deepfool");
    sweep->add_option("--workers", workers, "parallel workers");
    sweep->add_option("--split", split, "train|test|all");

    CLI::App* gen = app.add_subcommand("gen-data", "generate a fixture dataset");
    gen->add_option("--kind", kind, "blobs|spirals");
    gen->add_option("--out", out_path, "dataset path")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--per-class", per_class, "samples per class (blobs)");
    gen->add_option("--classes", classes, "class count (blobs)");
    gen->add_option("--dim", dim, "feature dimension (blobs)");
    gen->add_option("--spread", spread, "cluster standard deviation (blobs)");
    gen->add_option("--n", n, "total samples (spirals)");
    gen->add_option("--noise", noise, "noise level (spirals)");
    gen->add_option("--test-fraction", test_fraction, "fraction tagged test per class");

    CLI::App* train = app.add_subcommand("train-fixture", "train an MLP fixture");
    train->add_option("--data", data_path, "dataset file")->required();
    train->add_option("--out", out_path, "model output path")->required();
    train->add_option("--widths", widths, "all layer widths, e.g. --widths 2,16,3")
        ->required()
        ->delimiter(',');
    train->add_option("--activation", activation, "relu|leaky_relu|elu|sigmoid|tanh");
    train->add_option("--alpha", alpha, "activation alpha");
    train->add_option("--epochs", epochs, "training epochs");
    train->add_option("--lr", lr, "learning rate");
    train->add_option("--seed", seed, "init/shuffle seed");
    train->add_option("--batch", batch, "mini-batch size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    ReportMeta meta;
    meta.command = join_command(argc, argv);
    meta.seed = seed;

    OutputOptions opts;
    opts.out_path = out_path;
    opts.format = format;
    if (format != "table" && format != "structured") {
        std::cerr << "error: --format must be table or structured\n";
        return kExitUsage;
    }

    try {
        if (!model_path.empty()) meta.model_digest = file_digest(model_path);

        if (analyze->parsed())
            return cmd_analyze(model_path, opts, tol, max_iter_norm, meta);
        if (attack->parsed())
            return cmd_attack(model_path, data_path, opts, overshoot, max_iter_attack, clamp01,
                              split, workers, meta);
        if (kappa_cmd->parsed())
            return cmd_kappa(model_path, data_path, opts, source, trials, seed, perturb_file,
                             overshoot, max_iter_attack, clamp01, epsilon, split, workers, meta);
        if (sweep->parsed())
            return cmd_quantize_sweep(model_path, data_path, opts, bits, trials, seed, overshoot,
                                      max_iter_attack, kappa_tilde, split, workers, meta);
        if (gen->parsed())
            return cmd_gen_data(kind, out_path, seed, per_class, classes, dim, spread, n, noise,
                                test_fraction);
        if (train->parsed())
            return cmd_train_fixture(data_path, out_path, widths, activation, alpha, epochs, lr,
                                     seed, batch);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const EmptyResult& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const DegenerateOutput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const DegenerateGradient& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    }
}
