#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ximp/rng.hpp"

namespace ximp::nn {

// A trainable matrix with its gradient slot and Adam state.
struct Param {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;
    std::vector<double> g;
    std::vector<double> m1;  // first moment
    std::vector<double> m2;  // second moment
    int64_t step = 0;
    bool grad_set = false;
};

// Named parameters with deterministic (sorted) iteration order.
class ParameterStore {
  public:
    enum class Init { Uniform, Zero };

    Param& add(const std::string& name, int rows, int cols, Init init, Rng& rng);
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;
    bool has(const std::string& name) const { return params_.count(name) > 0; }

    void zero_grad();
    std::map<std::string, Param>& map() { return params_; }
    const std::map<std::string, Param>& map() const { return params_; }
    size_t count() const { return params_.size(); }

  private:
    std::map<std::string, Param> params_;
};

struct AdamConfig {
    double lr = 1e-3;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One Adam step with decoupled weight decay over all parameters in name
// order. Throws MissingGradient if backward has not populated a parameter.
void adam_step(ParameterStore& store, const AdamConfig& cfg);

}  // namespace ximp::nn
