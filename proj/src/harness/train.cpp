#include "ximp/harness/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "ximp/errors.hpp"

namespace ximp::harness {

using nn::Tape;
using nn::TensorRef;

AnyModel::AnyModel(model::RunConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.kind == "ximp")
        ximp_ = std::make_unique<model::XimpModel>(cfg_.model, seed);
    else if (cfg_.kind == "himp")
        himp_ = std::make_unique<model::HimpModel>(cfg_.himp, seed);
    else
        ecfp_ = std::make_unique<model::EcfpModel>(cfg_.ecfp, seed);
}

nn::ParameterStore& AnyModel::params() {
    if (ximp_) return ximp_->params();
    if (himp_) return himp_->params();
    return ecfp_->params();
}

const nn::ParameterStore& AnyModel::params() const {
    return const_cast<AnyModel*>(this)->params();
}

TensorRef AnyModel::forward(Tape& tape, const PreparedMolecule& mol, bool training,
                            Rng* dropout_rng) {
    if (ximp_) return ximp_->forward(tape, *mol.ximp, training, dropout_rng);
    if (himp_) return himp_->forward(tape, *mol.himp, training, dropout_rng);
    return ecfp_->forward(tape, *mol.fp);
}

PreparedMolecule AnyModel::prepare(const Record& r) const {
    PreparedMolecule out;
    out.target = r.target;
    if (ximp_)
        out.ximp = model::prepare_inputs(r.graph, cfg_.model);
    else if (himp_)
        out.himp = model::prepare_himp_inputs(r.graph, cfg_.himp.jt_resolution);
    else
        out.fp = chem::ecfp(r.graph, cfg_.ecfp.radius, cfg_.ecfp.n_bits);
    return out;
}

std::vector<PreparedMolecule> AnyModel::prepare_all(
    const Dataset& ds, const std::vector<int>& indices) const {
    std::vector<PreparedMolecule> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(prepare(ds.records[i]));
    return out;
}

double evaluate_model(AnyModel& m, const std::vector<PreparedMolecule>& records) {
    if (records.empty()) throw EmptyDataset("evaluate on an empty record set");
    double total = 0.0;
    for (const auto& mol : records) {
        Tape tape;
        TensorRef pred = m.forward(tape, mol, /*training=*/false, nullptr);
        total += std::abs(pred->v[0] - mol.target);
    }
    return total / static_cast<double>(records.size());
}

TrainResult train_model(AnyModel& m, const std::vector<PreparedMolecule>& train,
                        const std::vector<PreparedMolecule>* val, uint64_t seed) {
    if (train.empty()) throw EmptyDataset("train on an empty record set");
    const auto& tc = m.run_config().train;
    nn::AdamConfig adam;
    adam.lr = tc.lr;
    adam.weight_decay = tc.weight_decay;

    Rng order_rng = Rng::derive(seed, 1);
    Rng dropout_rng = Rng::derive(seed, 2);

    TrainResult result;
    result.best_train_mae = std::numeric_limits<double>::infinity();
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (size_t start = 0; start < order.size(); start += tc.batch_size) {
            size_t stop = std::min(order.size(), start + tc.batch_size);
            m.params().zero_grad();
            Tape tape;
            std::vector<TensorRef> preds;
            std::vector<double> targets;
            try {
                for (size_t j = start; j < stop; ++j) {
                    const auto& mol = train[order[j]];
                    preds.push_back(m.forward(tape, mol, /*training=*/true, &dropout_rng));
                    targets.push_back(mol.target);
                }
                TensorRef loss = nn::mae_loss(tape, nn::vstack(tape, preds), targets);
                tape.backward(loss);
            } catch (const NonFiniteValue& e) {
                throw NonFiniteLoss("epoch " + std::to_string(epoch) + ": " + e.what());
            }
            nn::adam_step(m.params(), adam);
        }
        EpochStats stats;
        stats.train_mae = evaluate_model(m, train);
        if (val && !val->empty()) stats.val_mae = evaluate_model(m, *val);
        result.best_train_mae = std::min(result.best_train_mae, stats.train_mae);
        result.curve.push_back(stats);
    }
    result.final_train_mae = result.curve.empty() ? 0.0 : result.curve.back().train_mae;
    return result;
}

void save_checkpoint(AnyModel& m, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kCheckpointVersion;
    j["feature_version"] = kFeatureVersion;
    j["config"] = m.run_config();
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, p] : m.params().map()) {
        params[name] = {{"shape", {p.rows, p.cols}}, {"values", p.v}};
    }
    j["parameters"] = std::move(params);
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << j.dump(2) << "\n";
}

std::unique_ptr<AnyModel> load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + " is not valid JSON: " + e.what());
    }
    if (j.value("format_version", -1) != kCheckpointVersion)
        throw VersionMismatch("checkpoint format_version " +
                              std::to_string(j.value("format_version", -1)) +
                              " != " + std::to_string(kCheckpointVersion));
    if (j.value("feature_version", -1) != kFeatureVersion)
        throw VersionMismatch("checkpoint featurization version " +
                              std::to_string(j.value("feature_version", -1)) +
                              " != " + std::to_string(kFeatureVersion));
    model::RunConfig cfg = j.at("config").get<model::RunConfig>();
    auto m = std::make_unique<AnyModel>(cfg, /*seed=*/0);
    for (auto& [name, p] : m->params().map()) {
        const auto& src = j.at("parameters").at(name);
        auto shape = src.at("shape").get<std::vector<int>>();
        if (shape.size() != 2 || shape[0] != p.rows || shape[1] != p.cols)
            throw VersionMismatch("checkpoint parameter " + name + " has wrong shape");
        p.v = src.at("values").get<std::vector<double>>();
        if (p.v.size() != static_cast<size_t>(p.rows) * p.cols)
            throw VersionMismatch("checkpoint parameter " + name + " has wrong size");
    }
    return m;
}

}  // namespace ximp::harness
