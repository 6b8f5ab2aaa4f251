#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ximp::model {

enum class Abstraction { Jt, Erg };
enum class ReadoutCombine { Concat, Sum };
enum class Sequencing { PreviousLayer, IntraLayer };

const char* abstraction_name(Abstraction a);
Abstraction abstraction_from_name(const std::string& s);

struct ModelConfig {
    int n_layers = 2;      // 1..3
    int hidden = 16;       // d, 16 or 32
    int reduced_dim = 16;  // 16 or 32
    int out_dim = 16;      // 16 or 32
    int head_hidden = 16;  // 16 or 32
    std::vector<Abstraction> abstractions = {Abstraction::Jt, Abstraction::Erg};
    int jt_resolution = 1;  // 1..3
    bool enable_i2mp = true;
    bool enable_dimp = true;
    ReadoutCombine readout_combine = ReadoutCombine::Concat;
    Sequencing sequencing = Sequencing::PreviousLayer;
    double dropout_p = 0.1;

    void validate() const;  // throws ConfigError
    int n_abstractions() const { return static_cast<int>(abstractions.size()); }
};

struct HimpConfig {
    int n_layers = 2;
    int hidden = 16;
    int head_hidden = 16;
    int jt_resolution = 1;
    bool inter_mp = true;
    double dropout_p = 0.1;
};

struct EcfpConfig {
    int radius = 2;
    int n_bits = 1024;
    int head_hidden = 16;
};

struct TrainConfig {
    int batch_size = 64;  // 64 or 128
    int epochs = 100;     // 50, 100, or 150
    double lr = 1e-3;
    double weight_decay = 1e-4;
};

// One cell of the experiment grid: a model family plus its training recipe.
struct RunConfig {
    std::string kind = "ximp";  // ximp | himp | ecfp
    ModelConfig model;
    HimpConfig himp;
    EcfpConfig ecfp;
    TrainConfig train;

    void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const HimpConfig& c);
void from_json(const nlohmann::json& j, HimpConfig& c);
void to_json(nlohmann::json& j, const EcfpConfig& c);
void from_json(const nlohmann::json& j, EcfpConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace ximp::model
