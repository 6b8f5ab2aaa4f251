#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ximp/harness/dataset.hpp"
#include "ximp/model/himp.hpp"
#include "ximp/model/ximp.hpp"

namespace ximp::harness {

constexpr int kFeatureVersion = 1;
constexpr int kCheckpointVersion = 1;

// Model-ready view of one record; only the member matching the model kind is
// populated.
struct PreparedMolecule {
    double target = 0.0;
    std::optional<model::MoleculeInputs> ximp;
    std::optional<model::HimpInputs> himp;
    std::optional<chem::Fingerprint> fp;
};

// One of the three model families behind a single forward/params surface.
class AnyModel {
  public:
    AnyModel(model::RunConfig cfg, uint64_t seed);

    nn::TensorRef forward(nn::Tape& tape, const PreparedMolecule& mol, bool training,
                          Rng* dropout_rng);
    nn::ParameterStore& params();
    const nn::ParameterStore& params() const;
    const model::RunConfig& run_config() const { return cfg_; }

    PreparedMolecule prepare(const Record& r) const;
    std::vector<PreparedMolecule> prepare_all(const Dataset& ds,
                                              const std::vector<int>& indices) const;

  private:
    model::RunConfig cfg_;
    std::unique_ptr<model::XimpModel> ximp_;
    std::unique_ptr<model::HimpModel> himp_;
    std::unique_ptr<model::EcfpModel> ecfp_;
};

struct EpochStats {
    double train_mae = 0.0;                       // dropout-off MAE on the train set
    double val_mae = std::nan("");                // when a validation set is given
};

struct TrainResult {
    std::vector<EpochStats> curve;
    double best_train_mae = 0.0;
    double final_train_mae = 0.0;
};

// Minibatch MAE training with seeded shuffling. Throws NonFiniteLoss with
// epoch context if the loss leaves the reals.
TrainResult train_model(AnyModel& m, const std::vector<PreparedMolecule>& train,
                        const std::vector<PreparedMolecule>* val, uint64_t seed);

// MAE with dropout disabled.
double evaluate_model(AnyModel& m, const std::vector<PreparedMolecule>& records);

void save_checkpoint(AnyModel& m, const std::string& path);
std::unique_ptr<AnyModel> load_checkpoint(const std::string& path);

}  // namespace ximp::harness
