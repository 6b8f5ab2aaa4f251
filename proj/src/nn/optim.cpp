#include "ximp/nn/optim.hpp"

#include <cmath>

#include "ximp/errors.hpp"

namespace ximp::nn {

Param& ParameterStore::add(const std::string& name, int rows, int cols, Init init,
                           Rng& rng) {
    if (params_.count(name))
        throw ConfigError("duplicate parameter name: " + name);
    Param p;
    p.rows = rows;
    p.cols = cols;
    size_t n = static_cast<size_t>(rows) * cols;
    p.v.assign(n, 0.0);
    p.g.assign(n, 0.0);
    p.m1.assign(n, 0.0);
    p.m2.assign(n, 0.0);
    if (init == Init::Uniform) {
        double bound = 1.0 / std::sqrt(static_cast<double>(rows));
        for (double& x : p.v) x = rng.uniform(-bound, bound);
    }
    return params_.emplace(name, std::move(p)).first->second;
}

Param& ParameterStore::at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

const Param& ParameterStore::at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

void ParameterStore::zero_grad() {
    for (auto& [name, p] : params_) {
        std::fill(p.g.begin(), p.g.end(), 0.0);
        p.grad_set = false;
    }
}

void adam_step(ParameterStore& store, const AdamConfig& cfg) {
    for (auto& [name, p] : store.map()) {
        if (!p.grad_set)
            throw MissingGradient("no gradient accumulated for parameter " + name);
        p.step += 1;
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step));
        for (size_t i = 0; i < p.v.size(); ++i) {
            p.m1[i] = cfg.beta1 * p.m1[i] + (1.0 - cfg.beta1) * p.g[i];
            p.m2[i] = cfg.beta2 * p.m2[i] + (1.0 - cfg.beta2) * p.g[i] * p.g[i];
            double mhat = p.m1[i] / c1;
            double vhat = p.m2[i] / c2;
            p.v[i] -= cfg.lr * (mhat / (std::sqrt(vhat) + cfg.eps) +
                                cfg.weight_decay * p.v[i]);
        }
    }
}

}  // namespace ximp::nn
