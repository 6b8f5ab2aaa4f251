#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ximp::nn {

struct Param;

// One node of the recorded computation. Values are 64-bit floats, row-major.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;
    std::vector<double> g;
    bool requires_grad = false;
    std::function<void()> backward;

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return v.size(); }
};

using TensorRef = Tensor*;

// Records every op in creation order; backward() replays the tape in reverse
// and flushes accumulated gradients into the linked parameters. Single
// threaded by design; independent model replicas own independent tapes.
class Tape {
  public:
    TensorRef alloc(int rows, int cols, bool requires_grad);
    TensorRef constant(int rows, int cols, std::vector<double> values);
    TensorRef constant(const std::vector<std::vector<double>>& m);
    TensorRef leaf(Param& p);

    // Seeds d(loss)/d(loss)=1 on a 1x1 tensor, sweeps the tape in reverse,
    // then accumulates leaf gradients into their parameters.
    void backward(TensorRef loss);

    size_t node_count() const { return nodes_.size(); }

  private:
    std::vector<std::unique_ptr<Tensor>> nodes_;
    std::vector<std::pair<TensorRef, Param*>> links_;
};

// --- recorded ops ---
TensorRef matmul(Tape& t, TensorRef a, TensorRef b);
TensorRef add(Tape& t, TensorRef a, TensorRef b);
TensorRef add_rowvec(Tape& t, TensorRef m, TensorRef row);  // broadcast 1 x d
TensorRef scale(Tape& t, TensorRef a, double c);
TensorRef add_const(Tape& t, TensorRef a, double c);
TensorRef smul(Tape& t, TensorRef scalar1x1, TensorRef a);  // learnable scalar
TensorRef relu(Tape& t, TensorRef a);
TensorRef mean_rows(Tape& t, TensorRef a);  // 1 x d
// Multiplication by a constant sparse projection (e.g. a normalized
// correspondence matrix), with node-relabeling-invariant accumulation.
TensorRef proj_matmul(Tape& t, const std::vector<std::vector<double>>& s, TensorRef x);
TensorRef gather_rows(Tape& t, TensorRef a, const std::vector<int>& idx);
TensorRef scatter_add_rows(Tape& t, TensorRef a, const std::vector<int>& idx,
                           int out_rows);
TensorRef concat_cols(Tape& t, TensorRef a, TensorRef b);
TensorRef vstack(Tape& t, const std::vector<TensorRef>& parts);
TensorRef dropout(Tape& t, TensorRef a, const std::vector<double>& mask);
TensorRef mae_loss(Tape& t, TensorRef pred, const std::vector<double>& targets);

}  // namespace ximp::nn
