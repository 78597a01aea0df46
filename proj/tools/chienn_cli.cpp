#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "chienn/datagen.hpp"
#include "chienn/edgegraph.hpp"
#include "chienn/model.hpp"
#include "chienn/molgraph.hpp"
#include "chienn/ordering.hpp"
#include "chienn/rng.hpp"
#include "chienn/train.hpp"
#include "chienn/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

// every run echoes its fully-resolved configuration; when an output
// directory is set the echo is also written there as config.json
void echo_config(const json& cfg, const std::string& out_dir) {
    std::string text = cfg.dump(2) + "\n";
    std::cout << text;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(out_dir + "/config.json", text);
    }
}

chienn::Task parse_task(const std::string& name) {
    if (name == "classification") return chienn::Task::classification;
    if (name == "regression") return chienn::Task::regression;
    if (name == "ranking") return chienn::Task::ranking;
    throw CLI::ValidationError("--task", "unknown task: " + name);
}

int cmd_convert(const std::string& in_path, const std::string& out_dir, std::uint64_t seed) {
    echo_config({{"command", "convert"}, {"in", in_path}, {"out", out_dir}, {"seed", seed}},
                out_dir);
    std::string text = read_file(in_path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        std::cerr << "convert: empty input file: " << in_path << "\n";
        return 2;
    }
    std::vector<chienn::MolecularGraph> mols;
    try {
        mols = chienn::parse_sdf_multi(text);
    } catch (const std::exception& e) {
        std::cerr << "convert: " << e.what() << "\n";
        return 1;
    }
    int failures = 0;
    for (std::size_t i = 0; i < mols.size(); ++i) {
        try {
            chienn::EdgeGraph eg = chienn::to_edge_graph(mols[i]);
            std::string dump = chienn::edge_graph_to_json(eg);
            if (out_dir.empty()) {
                std::cout << dump << "\n";
            } else {
                write_file(out_dir + "/record_" + std::to_string(i) + ".json", dump + "\n");
            }
        } catch (const std::exception& e) {
            std::cerr << "convert: record " << i << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_order(const std::string& in_path, const std::string& out_dir, bool mirror_flag,
              bool permissive, std::uint64_t seed) {
    echo_config({{"command", "order"},
                 {"in", in_path},
                 {"out", out_dir},
                 {"mirror", mirror_flag},
                 {"permissive_ordering", permissive},
                 {"seed", seed}},
                out_dir);
    auto mols = chienn::parse_sdf_multi(read_file(in_path));
    std::ostringstream dump;
    for (auto& g : mols) {
        if (mirror_flag) g = chienn::mirror(g);
        chienn::EdgeGraph eg = chienn::to_edge_graph(g);
        try {
            dump << chienn::orders_to_text(eg, chienn::all_orders(eg, permissive));
        } catch (const std::runtime_error& e) {
            std::cerr << "order: " << e.what() << "\n";
            return 3;
        }
    }
    std::cout << dump.str();
    if (!out_dir.empty()) write_file(out_dir + "/orders.txt", dump.str());
    return 0;
}

int cmd_gen(const std::string& kind, int count, double delta, const std::string& out_path,
            std::uint64_t seed) {
    echo_config({{"command", "gen"},
                 {"kind", kind},
                 {"count", count},
                 {"delta", delta},
                 {"out", out_path},
                 {"seed", seed}},
                "");
    std::vector<chienn::SyntheticSample> samples;
    if (kind == "rs") {
        samples = chienn::gen_tetrahedral(seed, count);
    } else if (kind == "ranking") {
        samples = chienn::gen_ranking_pairs(seed, count, delta);
    } else {
        std::cerr << "gen: unknown kind: " << kind << "\n";
        return 1;
    }
    chienn::save_samples_jsonl(samples, out_path);
    std::cout << "wrote " << samples.size() << " samples to " << out_path << "\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& out_dir,
              const std::string& task_name, int k, int hidden, int layers,
              const chienn::TrainConfig& tc, std::uint64_t seed) {
    chienn::TrainConfig cfg = tc;
    cfg.seed = seed;
    cfg.task = parse_task(task_name);
    cfg.validate();
    echo_config({{"command", "train"},
                 {"data", data_path},
                 {"out", out_dir},
                 {"task", task_name},
                 {"k", k},
                 {"hidden", hidden},
                 {"layers", layers},
                 {"epochs", cfg.epochs},
                 {"warmup_epochs", cfg.warmup_epochs},
                 {"lr", cfg.base_lr},
                 {"clip_norm", cfg.clip_norm},
                 {"batch_size", cfg.batch_size},
                 {"seed", seed}},
                out_dir);
    chienn::Dataset dataset;
    dataset.samples = chienn::load_samples_jsonl(data_path);
    chienn::DatasetSplit split = chienn::split_dataset(dataset);

    chienn::StackConfig sc;
    sc.k = k;
    sc.H = hidden;
    sc.H_mid = hidden;
    sc.num_layers = layers;
    sc.out_dim = cfg.task == chienn::Task::classification ? 2 : 1;
    auto rng = chienn::make_rng(seed, "init");
    chienn::LayerStack stack = chienn::make_stack(sc, rng);

    std::ostream* metrics = nullptr;
    std::ofstream metrics_file;
    if (!out_dir.empty()) {
        metrics_file.open(out_dir + "/metrics.jsonl");
        metrics = &metrics_file;
    }
    chienn::TrainResult res = chienn::train_model(stack, split, cfg, metrics);
    if (!out_dir.empty()) chienn::save_stack(res.best, out_dir + "/checkpoint.json");

    json summary = {{"test_loss", res.test_loss}, {"test_metric", res.test_metric}};
    if (cfg.task != chienn::Task::classification)
        summary["test_ranking_accuracy"] = chienn::eval_ranking(res.best, split.test);
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path,
             const std::string& task_name) {
    echo_config(
        {{"command", "eval"}, {"checkpoint", ckpt_path}, {"data", data_path}, {"task", task_name}},
        "");
    chienn::LayerStack stack = chienn::load_stack(ckpt_path);
    chienn::Dataset dataset;
    dataset.samples = chienn::load_samples_jsonl(data_path);
    chienn::Task task = parse_task(task_name);
    json out;
    if (task == chienn::Task::ranking) {
        out["ranking_accuracy"] = chienn::eval_ranking(stack, dataset);
    } else {
        chienn::EvalResult r = chienn::evaluate(stack, dataset, task);
        out["loss"] = r.loss;
        out["metric"] = r.metric;
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_verify(std::uint64_t seed, double trials) {
    echo_config({{"command", "verify"}, {"seed", seed}, {"trials", trials}}, "");
    chienn::VerifyReport report = chienn::run_verification(seed, trials);
    chienn::print_report(report, std::cout);
    return report.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chirality-aware graph neural network toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "master seed for all substreams")->capture_default_str();

    std::string in_path, out_dir, data_path, ckpt_path, task_name = "classification";
    bool mirror_flag = false, permissive = false;
    int k = 3, hidden = 64, layers = 3, count = 100;
    double delta = 0.5, trials = 1.0;
    std::string gen_kind = "rs";
    chienn::TrainConfig tc;

    auto* convert = app.add_subcommand("convert", "parse an SDF and dump edge graphs");
    convert->add_option("--in", in_path, "SDF input path")->required();
    convert->add_option("--out", out_dir, "output directory (stdout if omitted)");

    auto* order = app.add_subcommand("order", "dump cyclic neighbor orders");
    order->add_option("--in", in_path, "SDF input path")->required();
    order->add_option("--out", out_dir, "output directory (stdout if omitted)");
    order->add_flag("--mirror", mirror_flag, "mirror every molecule before ordering");
    order->add_flag("--permissive-ordering", permissive,
                    "append bond-parallel neighbors instead of failing");

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--kind", gen_kind, "rs | ranking")->capture_default_str();
    gen->add_option("--count", count, "sample count (rs) or pair count (ranking)")
        ->capture_default_str();
    gen->add_option("--delta", delta, "chiral effect size for ranking targets")
        ->capture_default_str();
    gen->add_option("--out", data_path, "output JSONL path")->required();

    auto* train = app.add_subcommand("train", "train a model on a JSONL dataset");
    train->add_option("--data", data_path, "dataset JSONL path")->required();
    train->add_option("--out", out_dir, "output directory for checkpoint/metrics");
    train->add_option("--task", task_name, "classification | regression")->capture_default_str();
    train->add_option("--k", k, "aggregation arity")->capture_default_str();
    train->add_option("--hidden", hidden, "hidden width")->capture_default_str();
    train->add_option("--layers", layers, "number of layers")->capture_default_str();
    train->add_option("--epochs", tc.epochs, "training epochs")->capture_default_str();
    train->add_option("--warmup-epochs", tc.warmup_epochs, "warmup epochs")
        ->capture_default_str();
    train->add_option("--lr", tc.base_lr, "base learning rate")->capture_default_str();
    train->add_option("--clip-norm", tc.clip_norm, "gradient norm clip")->capture_default_str();
    train->add_option("--batch-size", tc.batch_size, "mini-batch size")->capture_default_str();

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval->add_option("--ckpt", ckpt_path, "checkpoint JSON path")->required();
    eval->add_option("--data", data_path, "dataset JSONL path")->required();
    eval->add_option("--task", task_name, "classification | regression | ranking")
        ->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run every invariant/property suite");
    verify->add_option("--trials", trials, "scale factor on per-suite draw counts")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (convert->parsed()) return cmd_convert(in_path, out_dir, seed);
        if (order->parsed()) return cmd_order(in_path, out_dir, mirror_flag, permissive, seed);
        if (gen->parsed()) return cmd_gen(gen_kind, count, delta, data_path, seed);
        if (train->parsed())
            return cmd_train(data_path, out_dir, task_name, k, hidden, layers, tc, seed);
        if (eval->parsed()) return cmd_eval(ckpt_path, data_path, task_name);
        if (verify->parsed()) return cmd_verify(seed, trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
