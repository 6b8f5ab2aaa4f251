#include "ximp/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ximp/errors.hpp"
#include "ximp/nn/optim.hpp"

namespace ximp::nn {

namespace {

void check_finite(const Tensor& t, const char* op) {
    for (double x : t.v)
        if (!std::isfinite(x))
            throw NonFiniteValue(std::string(op) + " produced a non-finite value");
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
    throw ShapeMismatch(std::string(op) + ": " + std::to_string(a.rows) + "x" +
                        std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                        std::to_string(b.cols));
}

}  // namespace

TensorRef Tape::alloc(int rows, int cols, bool requires_grad) {
    auto t = std::make_unique<Tensor>();
    t->rows = rows;
    t->cols = cols;
    t->v.assign(static_cast<size_t>(rows) * cols, 0.0);
    if (requires_grad) t->g.assign(t->v.size(), 0.0);
    t->requires_grad = requires_grad;
    nodes_.push_back(std::move(t));
    return nodes_.back().get();
}

TensorRef Tape::constant(int rows, int cols, std::vector<double> values) {
    if (static_cast<size_t>(rows) * cols != values.size())
        throw ShapeMismatch("constant: " + std::to_string(values.size()) +
                            " values for " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    TensorRef t = alloc(rows, cols, false);
    t->v = std::move(values);
    check_finite(*t, "constant");
    return t;
}

TensorRef Tape::constant(const std::vector<std::vector<double>>& m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != cols)
            throw ShapeMismatch("constant: ragged matrix");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return constant(rows, cols, std::move(flat));
}

TensorRef Tape::leaf(Param& p) {
    TensorRef t = alloc(p.rows, p.cols, true);
    t->v = p.v;
    links_.push_back({t, &p});
    return t;
}

void Tape::backward(TensorRef loss) {
    if (loss->rows != 1 || loss->cols != 1)
        throw ShapeMismatch("backward expects a 1x1 loss tensor");
    if (!loss->requires_grad)
        throw MissingGradient("loss does not depend on any trainable parameter");
    loss->g[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
        if ((*it)->backward) (*it)->backward();
    for (auto& [t, p] : links_) {
        for (size_t i = 0; i < p->g.size(); ++i) p->g[i] += t->g[i];
        p->grad_set = true;
    }
}

TensorRef matmul(Tape& t, TensorRef a, TensorRef b) {
    if (a->cols != b->rows) shape_error("matmul", *a, *b);
    TensorRef out = t.alloc(a->rows, b->cols, a->requires_grad || b->requires_grad);
    const int m = a->rows, k = a->cols, n = b->cols;
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
            double av = a->v[static_cast<size_t>(i) * k + p];
            if (av == 0.0) continue;
            const double* brow = &b->v[static_cast<size_t>(p) * n];
            double* orow = &out->v[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    check_finite(*out, "matmul");
    if (out->requires_grad)
        out->backward = [out, a, b, m, k, n] {
            if (a->requires_grad)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < n; ++j) {
                        double gv = out->g[static_cast<size_t>(i) * n + j];
                        if (gv == 0.0) continue;
                        for (int p = 0; p < k; ++p)
                            a->g[static_cast<size_t>(i) * k + p] +=
                                gv * b->v[static_cast<size_t>(p) * n + j];
                    }
            if (b->requires_grad)
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < k; ++p) {
                        double av = a->v[static_cast<size_t>(i) * k + p];
                        if (av == 0.0) continue;
                        for (int j = 0; j < n; ++j)
                            b->g[static_cast<size_t>(p) * n + j] +=
                                av * out->g[static_cast<size_t>(i) * n + j];
                    }
        };
    return out;
}

TensorRef add(Tape& t, TensorRef a, TensorRef b) {
    if (a->rows != b->rows || a->cols != b->cols) shape_error("add", *a, *b);
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad || b->requires_grad);
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] + b->v[i];
    check_finite(*out, "add");
    if (out->requires_grad)
        out->backward = [out, a, b] {
            if (a->requires_grad)
                for (size_t i = 0; i < out->size(); ++i) a->g[i] += out->g[i];
            if (b->requires_grad)
                for (size_t i = 0; i < out->size(); ++i) b->g[i] += out->g[i];
        };
    return out;
}

TensorRef add_rowvec(Tape& t, TensorRef m, TensorRef row) {
    if (row->rows != 1 || row->cols != m->cols) shape_error("add_rowvec", *m, *row);
    TensorRef out = t.alloc(m->rows, m->cols, m->requires_grad || row->requires_grad);
    for (int r = 0; r < m->rows; ++r)
        for (int c = 0; c < m->cols; ++c) out->at(r, c) = m->at(r, c) + row->v[c];
    check_finite(*out, "add_rowvec");
    if (out->requires_grad)
        out->backward = [out, m, row] {
            if (m->requires_grad)
                for (size_t i = 0; i < out->size(); ++i) m->g[i] += out->g[i];
            if (row->requires_grad)
                for (int r = 0; r < out->rows; ++r)
                    for (int c = 0; c < out->cols; ++c)
                        row->g[c] += out->g[static_cast<size_t>(r) * out->cols + c];
        };
    return out;
}

TensorRef scale(Tape& t, TensorRef a, double c) {
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad);
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] * c;
    check_finite(*out, "scale");
    if (out->requires_grad)
        out->backward = [out, a, c] {
            for (size_t i = 0; i < out->size(); ++i) a->g[i] += c * out->g[i];
        };
    return out;
}

TensorRef add_const(Tape& t, TensorRef a, double c) {
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad);
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] + c;
    check_finite(*out, "add_const");
    if (out->requires_grad)
        out->backward = [out, a] {
            for (size_t i = 0; i < out->size(); ++i) a->g[i] += out->g[i];
        };
    return out;
}

TensorRef smul(Tape& t, TensorRef scalar, TensorRef a) {
    if (scalar->rows != 1 || scalar->cols != 1) shape_error("smul", *scalar, *a);
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad || scalar->requires_grad);
    const double s = scalar->v[0];
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = s * a->v[i];
    check_finite(*out, "smul");
    if (out->requires_grad)
        out->backward = [out, scalar, a, s] {
            if (scalar->requires_grad)
                for (size_t i = 0; i < out->size(); ++i)
                    scalar->g[0] += a->v[i] * out->g[i];
            if (a->requires_grad)
                for (size_t i = 0; i < out->size(); ++i) a->g[i] += s * out->g[i];
        };
    return out;
}

TensorRef relu(Tape& t, TensorRef a) {
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad);
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] > 0 ? a->v[i] : 0.0;
    if (out->requires_grad)
        out->backward = [out, a] {
            for (size_t i = 0; i < out->size(); ++i)
                if (a->v[i] > 0) a->g[i] += out->g[i];
        };
    return out;
}

TensorRef mean_rows(Tape& t, TensorRef a) {
    if (a->rows == 0) throw ShapeMismatch("mean_rows over an empty tensor");
    TensorRef out = t.alloc(1, a->cols, a->requires_grad);
    const double inv = 1.0 / a->rows;
    // value-sorted accumulation keeps the pooled result bit-identical under
    // any permutation of the rows
    std::vector<double> column(a->rows);
    for (int c = 0; c < a->cols; ++c) {
        for (int r = 0; r < a->rows; ++r) column[r] = a->at(r, c);
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (double x : column) sum += x;
        out->v[c] = sum * inv;
    }
    check_finite(*out, "mean_rows");
    if (out->requires_grad)
        out->backward = [out, a, inv] {
            for (int r = 0; r < a->rows; ++r)
                for (int c = 0; c < a->cols; ++c)
                    a->g[static_cast<size_t>(r) * a->cols + c] += out->g[c] * inv;
        };
    return out;
}

TensorRef gather_rows(Tape& t, TensorRef a, const std::vector<int>& idx) {
    TensorRef out = t.alloc(static_cast<int>(idx.size()), a->cols, a->requires_grad);
    for (size_t r = 0; r < idx.size(); ++r)
        for (int c = 0; c < a->cols; ++c)
            out->at(static_cast<int>(r), c) = a->at(idx[r], c);
    if (out->requires_grad) {
        std::vector<int> indices = idx;
        out->backward = [out, a, indices] {
            for (size_t r = 0; r < indices.size(); ++r)
                for (int c = 0; c < a->cols; ++c)
                    a->g[static_cast<size_t>(indices[r]) * a->cols + c] +=
                        out->g[r * out->cols + c];
        };
    }
    return out;
}

TensorRef scatter_add_rows(Tape& t, TensorRef a, const std::vector<int>& idx,
                           int out_rows) {
    if (static_cast<int>(idx.size()) != a->rows)
        throw ShapeMismatch("scatter_add_rows: " + std::to_string(idx.size()) +
                            " indices for " + std::to_string(a->rows) + " rows");
    TensorRef out = t.alloc(out_rows, a->cols, a->requires_grad);
    // group incoming rows per destination and add them in value order, so
    // the aggregate is independent of edge enumeration order
    std::vector<std::vector<int>> incoming(out_rows);
    for (int r = 0; r < a->rows; ++r) incoming[idx[r]].push_back(r);
    std::vector<double> bucket;
    for (int d = 0; d < out_rows; ++d) {
        if (incoming[d].empty()) continue;
        for (int c = 0; c < a->cols; ++c) {
            bucket.clear();
            for (int r : incoming[d]) bucket.push_back(a->at(r, c));
            std::sort(bucket.begin(), bucket.end());
            double sum = 0.0;
            for (double x : bucket) sum += x;
            out->at(d, c) = sum;
        }
    }
    check_finite(*out, "scatter_add_rows");
    if (out->requires_grad) {
        std::vector<int> indices = idx;
        out->backward = [out, a, indices] {
            for (int r = 0; r < a->rows; ++r)
                for (int c = 0; c < a->cols; ++c)
                    a->g[static_cast<size_t>(r) * a->cols + c] +=
                        out->g[static_cast<size_t>(indices[r]) * out->cols + c];
        };
    }
    return out;
}

TensorRef concat_cols(Tape& t, TensorRef a, TensorRef b) {
    if (a->rows != b->rows) shape_error("concat_cols", *a, *b);
    TensorRef out =
        t.alloc(a->rows, a->cols + b->cols, a->requires_grad || b->requires_grad);
    for (int r = 0; r < a->rows; ++r) {
        for (int c = 0; c < a->cols; ++c) out->at(r, c) = a->at(r, c);
        for (int c = 0; c < b->cols; ++c) out->at(r, a->cols + c) = b->at(r, c);
    }
    if (out->requires_grad)
        out->backward = [out, a, b] {
            for (int r = 0; r < out->rows; ++r) {
                if (a->requires_grad)
                    for (int c = 0; c < a->cols; ++c)
                        a->g[static_cast<size_t>(r) * a->cols + c] +=
                            out->g[static_cast<size_t>(r) * out->cols + c];
                if (b->requires_grad)
                    for (int c = 0; c < b->cols; ++c)
                        b->g[static_cast<size_t>(r) * b->cols + c] +=
                            out->g[static_cast<size_t>(r) * out->cols + a->cols + c];
            }
        };
    return out;
}

TensorRef proj_matmul(Tape& t, const std::vector<std::vector<double>>& s,
                      TensorRef x) {
    const int rows = static_cast<int>(s.size());
    const int inner = rows ? static_cast<int>(s[0].size()) : 0;
    if (inner != x->rows)
        throw ShapeMismatch("proj_matmul: projection has " + std::to_string(inner) +
                            " columns, embeddings have " + std::to_string(x->rows) +
                            " rows");
    // correspondence projections are sparse 0/1-derived matrices indexed by
    // graph order; summing nonzero products in value order makes the result
    // invariant to node relabeling
    std::vector<std::vector<int>> nz(rows);
    for (int i = 0; i < rows; ++i)
        for (int p = 0; p < inner; ++p)
            if (s[i][p] != 0.0) nz[i].push_back(p);

    TensorRef out = t.alloc(rows, x->cols, x->requires_grad);
    std::vector<double> terms;
    for (int i = 0; i < rows; ++i) {
        for (int c = 0; c < x->cols; ++c) {
            terms.clear();
            for (int p : nz[i]) terms.push_back(s[i][p] * x->at(p, c));
            std::sort(terms.begin(), terms.end());
            double sum = 0.0;
            for (double v : terms) sum += v;
            out->at(i, c) = sum;
        }
    }
    check_finite(*out, "proj_matmul");
    if (out->requires_grad) {
        auto weights = s;
        auto indices = nz;
        out->backward = [out, x, weights, indices] {
            for (int i = 0; i < out->rows; ++i)
                for (int p : indices[i])
                    for (int c = 0; c < out->cols; ++c)
                        x->g[static_cast<size_t>(p) * x->cols + c] +=
                            weights[i][p] * out->g[static_cast<size_t>(i) * out->cols + c];
        };
    }
    return out;
}

TensorRef vstack(Tape& t, const std::vector<TensorRef>& parts) {
    if (parts.empty()) throw ShapeMismatch("vstack of zero tensors");
    int cols = parts[0]->cols, rows = 0;
    bool grad = false;
    for (TensorRef p : parts) {
        if (p->cols != cols) shape_error("vstack", *parts[0], *p);
        rows += p->rows;
        grad = grad || p->requires_grad;
    }
    TensorRef out = t.alloc(rows, cols, grad);
    int at = 0;
    for (TensorRef p : parts) {
        std::copy(p->v.begin(), p->v.end(), out->v.begin() + static_cast<size_t>(at) * cols);
        at += p->rows;
    }
    if (grad) {
        std::vector<TensorRef> held = parts;
        out->backward = [out, held] {
            int offset = 0;
            for (TensorRef p : held) {
                if (p->requires_grad)
                    for (size_t i = 0; i < p->size(); ++i)
                        p->g[i] += out->g[static_cast<size_t>(offset) * out->cols + i];
                offset += p->rows;
            }
        };
    }
    return out;
}

TensorRef dropout(Tape& t, TensorRef a, const std::vector<double>& mask) {
    if (mask.size() != a->size())
        throw ShapeMismatch("dropout mask size " + std::to_string(mask.size()) +
                            " != tensor size " + std::to_string(a->size()));
    TensorRef out = t.alloc(a->rows, a->cols, a->requires_grad);
    for (size_t i = 0; i < out->size(); ++i) out->v[i] = a->v[i] * mask[i];
    check_finite(*out, "dropout");
    if (out->requires_grad) {
        std::vector<double> m = mask;
        out->backward = [out, a, m] {
            for (size_t i = 0; i < out->size(); ++i) a->g[i] += m[i] * out->g[i];
        };
    }
    return out;
}

TensorRef mae_loss(Tape& t, TensorRef pred, const std::vector<double>& targets) {
    if (pred->cols != 1 || static_cast<size_t>(pred->rows) != targets.size())
        throw ShapeMismatch("mae_loss: predictions " + std::to_string(pred->rows) +
                            "x" + std::to_string(pred->cols) + " vs " +
                            std::to_string(targets.size()) + " targets");
    TensorRef out = t.alloc(1, 1, pred->requires_grad);
    const double inv = 1.0 / pred->rows;
    for (int r = 0; r < pred->rows; ++r)
        out->v[0] += std::abs(pred->v[r] - targets[r]) * inv;
    check_finite(*out, "mae_loss");
    if (out->requires_grad) {
        std::vector<double> y = targets;
        out->backward = [out, pred, y, inv] {
            for (int r = 0; r < pred->rows; ++r) {
                double d = pred->v[r] - y[r];
                double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
                pred->g[r] += out->g[0] * s * inv;
            }
        };
    }
    return out;
}

}  // namespace ximp::nn
