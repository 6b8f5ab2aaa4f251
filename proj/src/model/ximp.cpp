#include "ximp/model/ximp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ximp/errors.hpp"

namespace ximp::model {

using nn::Tape;
using nn::TensorRef;

const char* abstraction_name(Abstraction a) {
    return a == Abstraction::Jt ? "jt" : "erg";
}

Abstraction abstraction_from_name(const std::string& s) {
    if (s == "jt") return Abstraction::Jt;
    if (s == "erg") return Abstraction::Erg;
    throw ConfigError("unknown abstraction: " + s);
}

void ModelConfig::validate() const {
    auto in = [](int v, std::initializer_list<int> allowed) {
        return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
    };
    if (!in(n_layers, {1, 2, 3})) throw ConfigError("n_layers must be 1, 2, or 3");
    if (!in(hidden, {16, 32})) throw ConfigError("hidden must be 16 or 32");
    if (!in(reduced_dim, {16, 32})) throw ConfigError("reduced_dim must be 16 or 32");
    if (!in(out_dim, {16, 32})) throw ConfigError("out_dim must be 16 or 32");
    if (!in(head_hidden, {16, 32})) throw ConfigError("head_hidden must be 16 or 32");
    if (!in(jt_resolution, {1, 2, 3})) throw ConfigError("jt_resolution must be 1..3");
    std::set<Abstraction> seen(abstractions.begin(), abstractions.end());
    if (seen.size() != abstractions.size())
        throw ConfigError("duplicate abstraction in config");
    if (enable_dimp && abstractions.size() < 2)
        throw ConfigError("DIMP requires at least two abstractions");
    if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout_p out of range");
}

void RunConfig::validate() const {
    if (kind != "ximp" && kind != "himp" && kind != "ecfp")
        throw ConfigError("kind must be ximp, himp, or ecfp");
    if (kind == "ximp") model.validate();
    if (train.batch_size != 64 && train.batch_size != 128)
        throw ConfigError("batch_size must be 64 or 128");
    if (train.epochs < 1) throw ConfigError("epochs must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
    std::vector<std::string> abs;
    for (auto a : c.abstractions) abs.push_back(abstraction_name(a));
    j = nlohmann::json{
        {"n_layers", c.n_layers},
        {"hidden", c.hidden},
        {"reduced_dim", c.reduced_dim},
        {"out_dim", c.out_dim},
        {"head_hidden", c.head_hidden},
        {"abstractions", abs},
        {"jt_resolution", c.jt_resolution},
        {"enable_i2mp", c.enable_i2mp},
        {"enable_dimp", c.enable_dimp},
        {"readout_combine", c.readout_combine == ReadoutCombine::Concat ? "concat" : "sum"},
        {"sequencing",
         c.sequencing == Sequencing::PreviousLayer ? "previous_layer" : "intra_layer"},
        {"dropout_p", c.dropout_p},
    };
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    c = ModelConfig{};
    c.n_layers = j.value("n_layers", c.n_layers);
    c.hidden = j.value("hidden", c.hidden);
    c.reduced_dim = j.value("reduced_dim", c.reduced_dim);
    c.out_dim = j.value("out_dim", c.out_dim);
    c.head_hidden = j.value("head_hidden", c.head_hidden);
    if (j.contains("abstractions")) {
        c.abstractions.clear();
        for (const auto& s : j.at("abstractions"))
            c.abstractions.push_back(abstraction_from_name(s.get<std::string>()));
    }
    c.jt_resolution = j.value("jt_resolution", c.jt_resolution);
    c.enable_i2mp = j.value("enable_i2mp", c.enable_i2mp);
    c.enable_dimp = j.value("enable_dimp", c.enable_dimp);
    std::string combine = j.value("readout_combine", std::string("concat"));
    c.readout_combine =
        combine == "sum" ? ReadoutCombine::Sum : ReadoutCombine::Concat;
    std::string seq = j.value("sequencing", std::string("previous_layer"));
    c.sequencing =
        seq == "intra_layer" ? Sequencing::IntraLayer : Sequencing::PreviousLayer;
    c.dropout_p = j.value("dropout_p", c.dropout_p);
}

void to_json(nlohmann::json& j, const HimpConfig& c) {
    j = nlohmann::json{{"n_layers", c.n_layers},       {"hidden", c.hidden},
                       {"head_hidden", c.head_hidden}, {"jt_resolution", c.jt_resolution},
                       {"inter_mp", c.inter_mp},       {"dropout_p", c.dropout_p}};
}

void from_json(const nlohmann::json& j, HimpConfig& c) {
    c = HimpConfig{};
    c.n_layers = j.value("n_layers", c.n_layers);
    c.hidden = j.value("hidden", c.hidden);
    c.head_hidden = j.value("head_hidden", c.head_hidden);
    c.jt_resolution = j.value("jt_resolution", c.jt_resolution);
    c.inter_mp = j.value("inter_mp", c.inter_mp);
    c.dropout_p = j.value("dropout_p", c.dropout_p);
}

void to_json(nlohmann::json& j, const EcfpConfig& c) {
    j = nlohmann::json{
        {"radius", c.radius}, {"n_bits", c.n_bits}, {"head_hidden", c.head_hidden}};
}

void from_json(const nlohmann::json& j, EcfpConfig& c) {
    c = EcfpConfig{};
    c.radius = j.value("radius", c.radius);
    c.n_bits = j.value("n_bits", c.n_bits);
    c.head_hidden = j.value("head_hidden", c.head_hidden);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{{"batch_size", c.batch_size},
                       {"epochs", c.epochs},
                       {"lr", c.lr},
                       {"weight_decay", c.weight_decay}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
    c = TrainConfig{};
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.lr = j.value("lr", c.lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"kind", c.kind},
                       {"model", c.model},
                       {"himp", c.himp},
                       {"ecfp", c.ecfp},
                       {"train", c.train}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
    c = RunConfig{};
    c.kind = j.value("kind", c.kind);
    if (j.contains("model")) j.at("model").get_to(c.model);
    if (j.contains("himp")) j.at("himp").get_to(c.himp);
    if (j.contains("ecfp")) j.at("ecfp").get_to(c.ecfp);
    if (j.contains("train")) j.at("train").get_to(c.train);
}

MoleculeInputs prepare_inputs(const chem::MolecularGraph& g, const ModelConfig& cfg) {
    MoleculeInputs in;
    in.graph = g;
    in.topo = nn::molecule_topology(in.graph);
    in.atom_feats = nn::atom_features(in.graph);
    for (Abstraction kind : cfg.abstractions) {
        MoleculeInputs::AbstractionInput ab;
        ab.kind = kind;
        if (kind == Abstraction::Jt) {
            auto [t, c] = chem::build_junction_tree(in.graph);
            if (cfg.jt_resolution > 1)
                std::tie(t, c) = chem::coarsen_junction_tree(t, c, cfg.jt_resolution);
            ab.rg = std::move(t);
            ab.corr = std::move(c);
        } else {
            auto [t, c] = chem::build_erg(in.graph);
            ab.rg = std::move(t);
            ab.corr = std::move(c);
        }
        ab.topo = nn::reduced_topology(ab.rg);
        ab.feats = nn::reduced_features(ab.rg);
        in.abstractions.push_back(std::move(ab));
    }
    if (cfg.enable_dimp) {
        const int n = static_cast<int>(in.abstractions.size());
        in.s_ik.assign(n, std::vector<std::vector<std::vector<double>>>(n));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (i != k)
                    in.s_ik[i][k] = chem::dimp_correspondence(in.abstractions[i].corr,
                                                              in.abstractions[k].corr);
    }
    return in;
}

namespace {

double row_max_norm(const std::vector<double>& v, int rows, int cols) {
    double best = 0.0;
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) s += std::abs(v[static_cast<size_t>(r) * cols + c]);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

XimpModel::XimpModel(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(seed);
    const int d = cfg_.hidden;
    const int dr = cfg_.reduced_dim;
    using Init = nn::ParameterStore::Init;

    store_.add("embed.atom.w", nn::kAtomFeatureWidth, d, Init::Uniform, rng);
    store_.add("embed.bond.w", nn::kBondFeatureWidth, d, Init::Uniform, rng);
    for (Abstraction a : cfg_.abstractions) {
        int width = a == Abstraction::Jt ? chem::kJtCategoryCount : chem::kErgFeatureCount;
        store_.add(std::string("embed.") + abstraction_name(a) + ".w", width, dr,
                   Init::Uniform, rng);
    }
    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string lp = "layer" + std::to_string(l) + ".";
        store_.add(lp + "g.eps", 1, 1, Init::Zero, rng);
        store_.add(lp + "g.mlp.w1", d, d, Init::Uniform, rng);
        store_.add(lp + "g.mlp.b1", 1, d, Init::Zero, rng);
        store_.add(lp + "g.mlp.w2", d, d, Init::Uniform, rng);
        store_.add(lp + "g.mlp.b2", 1, d, Init::Zero, rng);
        for (Abstraction a : cfg_.abstractions) {
            std::string ap = lp + abstraction_name(a) + ".";
            store_.add(ap + "eps", 1, 1, Init::Zero, rng);
            store_.add(ap + "mlp.w1", dr, dr, Init::Uniform, rng);
            store_.add(ap + "mlp.b1", 1, dr, Init::Zero, rng);
            store_.add(ap + "mlp.w2", dr, dr, Init::Uniform, rng);
            store_.add(ap + "mlp.b2", 1, dr, Init::Zero, rng);
        }
        if (cfg_.enable_i2mp) {
            for (Abstraction a : cfg_.abstractions) {
                std::string ip = lp + "i2mp." + abstraction_name(a) + ".";
                store_.add(ip + "wx", dr, d, Init::Uniform, rng);
                store_.add(ip + "wm", d, dr, Init::Uniform, rng);
            }
        }
        if (cfg_.enable_dimp) {
            for (Abstraction to : cfg_.abstractions)
                for (Abstraction from : cfg_.abstractions) {
                    if (from == to) continue;
                    store_.add(lp + "dimp." + abstraction_name(from) + "_to_" +
                                   abstraction_name(to) + ".w",
                               dr, dr, Init::Uniform, rng);
                }
        }
    }
    store_.add("readout.g.w", d, cfg_.out_dim, Init::Uniform, rng);
    for (Abstraction a : cfg_.abstractions)
        store_.add(std::string("readout.") + abstraction_name(a) + ".w", dr, cfg_.out_dim,
                   Init::Uniform, rng);
    store_.add("head.w1", readout_width(), cfg_.head_hidden, Init::Uniform, rng);
    store_.add("head.b1", 1, cfg_.head_hidden, Init::Zero, rng);
    store_.add("head.w2", cfg_.head_hidden, 1, Init::Uniform, rng);
    store_.add("head.b2", 1, 1, Init::Zero, rng);
}

int XimpModel::readout_width() const {
    return cfg_.readout_combine == ReadoutCombine::Concat
               ? cfg_.out_dim * (1 + cfg_.n_abstractions())
               : cfg_.out_dim;
}

nn::GinRefs XimpModel::gin_refs(Tape& tape, const std::string& prefix) {
    nn::GinRefs refs;
    refs.eps = tape.leaf(store_.at(prefix + "eps"));
    refs.w1 = tape.leaf(store_.at(prefix + "mlp.w1"));
    refs.b1 = tape.leaf(store_.at(prefix + "mlp.b1"));
    refs.w2 = tape.leaf(store_.at(prefix + "mlp.w2"));
    refs.b2 = tape.leaf(store_.at(prefix + "mlp.b2"));
    return refs;
}

nn::TensorRef XimpModel::dropped(Tape& tape, TensorRef x, bool training,
                                 Rng* dropout_rng) {
    if (!training || cfg_.dropout_p <= 0.0) return x;
    if (!dropout_rng)
        throw ConfigError("training forward pass needs a dropout RNG stream");
    std::vector<double> mask(x->size());
    const double keep = 1.0 - cfg_.dropout_p;
    for (double& m : mask)
        m = dropout_rng->uniform() < cfg_.dropout_p ? 0.0 : 1.0 / keep;
    return nn::dropout(tape, x, mask);
}

LayerState XimpModel::initial_state(Tape& tape, const MoleculeInputs& in) {
    LayerState s;
    TensorRef feats = tape.constant(in.atom_feats);
    s.x = nn::matmul(tape, feats, tape.leaf(store_.at("embed.atom.w")));
    for (const auto& ab : in.abstractions) {
        TensorRef f = tape.constant(ab.feats);
        std::string name = std::string("embed.") + abstraction_name(ab.kind) + ".w";
        s.t.push_back(nn::matmul(tape, f, tape.leaf(store_.at(name))));
    }
    return s;
}

std::pair<std::vector<TensorRef>, std::vector<TensorRef>> XimpModel::i2mp_step(
    Tape& tape, const MoleculeInputs& in, TensorRef x_src,
    const std::vector<TensorRef>& t_src, int layer) {
    std::string lp = "layer" + std::to_string(layer) + ".i2mp.";
    std::vector<TensorRef> x_terms, m_terms;
    for (size_t i = 0; i < in.abstractions.size(); ++i) {
        const auto& ab = in.abstractions[i];
        std::string ip = lp + abstraction_name(ab.kind) + ".";
        x_terms.push_back(nn::relu(
            tape, nn::matmul(tape, nn::proj_matmul(tape, ab.corr.row_normalized, t_src[i]),
                             tape.leaf(store_.at(ip + "wx")))));
        m_terms.push_back(nn::relu(
            tape, nn::matmul(tape, nn::proj_matmul(tape, ab.corr.col_normalized, x_src),
                             tape.leaf(store_.at(ip + "wm")))));
    }
    return {x_terms, m_terms};
}

std::vector<std::vector<TensorRef>> XimpModel::dimp_step(
    Tape& tape, const MoleculeInputs& in, const std::vector<TensorRef>& t_src,
    int layer) {
    if (!cfg_.enable_dimp || cfg_.n_abstractions() < 2)
        throw ConfigError("dimp_step requires enable_dimp and >= 2 abstractions");
    const int n = static_cast<int>(in.abstractions.size());
    std::string lp = "layer" + std::to_string(layer) + ".dimp.";
    std::vector<std::vector<TensorRef>> msgs(n, std::vector<TensorRef>(n, nullptr));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (i == k) continue;
            TensorRef pre = nn::proj_matmul(tape, in.s_ik[i][k], t_src[k]);
            // monitored bound from the normalization analysis: projecting
            // between abstractions must not blow up row magnitudes
            double lhs = row_max_norm(pre->v, pre->rows, pre->cols);
            double rhs = row_max_norm(t_src[k]->v, t_src[k]->rows, t_src[k]->cols);
            if (lhs > rhs + 1e-9)
                throw NonFiniteValue("direct-message row norm grew: " +
                                     std::to_string(lhs) + " > " + std::to_string(rhs));
            std::string name = lp + abstraction_name(in.abstractions[k].kind) +
                               "_to_" + abstraction_name(in.abstractions[i].kind) + ".w";
            msgs[i][k] =
                nn::relu(tape, nn::matmul(tape, pre, tape.leaf(store_.at(name))));
        }
    return msgs;
}

LayerState XimpModel::layer_forward(Tape& tape, const MoleculeInputs& in,
                                    const LayerState& state, int layer, bool training,
                                    Rng* dropout_rng) {
    std::string lp = "layer" + std::to_string(layer) + ".";
    TensorRef edge_w = tape.leaf(store_.at("embed.bond.w"));
    TensorRef gx =
        nn::gine_forward(tape, state.x, in.topo, gin_refs(tape, lp + "g."), edge_w);
    gx = dropped(tape, gx, training, dropout_rng);
    std::vector<TensorRef> gt(in.abstractions.size());
    for (size_t i = 0; i < in.abstractions.size(); ++i) {
        const auto& ab = in.abstractions[i];
        gt[i] = nn::gin_forward(tape, state.t[i], ab.topo,
                                gin_refs(tape, lp + abstraction_name(ab.kind) + "."));
        gt[i] = dropped(tape, gt[i], training, dropout_rng);
    }

    const bool intra = cfg_.sequencing == Sequencing::IntraLayer;
    LayerState next;
    next.x = gx;
    next.t = gt;

    if (cfg_.enable_i2mp) {
        // Under previous_layer sequencing every term reads layer l-1 output;
        // under intra_layer the inter-messages read the current layer's GNN
        // outputs and the already-updated X, reproducing the sequential
        // two-view update.
        const std::vector<TensorRef>& t_for_x = intra ? gt : state.t;
        std::string ip = lp + "i2mp.";
        for (size_t i = 0; i < in.abstractions.size(); ++i) {
            const auto& ab = in.abstractions[i];
            TensorRef x_term = nn::relu(
                tape,
                nn::matmul(tape, nn::proj_matmul(tape, ab.corr.row_normalized, t_for_x[i]),
                           tape.leaf(store_.at(ip + abstraction_name(ab.kind) + ".wx"))));
            next.x = nn::add(tape, next.x, x_term);
        }
        TensorRef x_for_m = intra ? next.x : state.x;
        for (size_t i = 0; i < in.abstractions.size(); ++i) {
            const auto& ab = in.abstractions[i];
            TensorRef m_term = nn::relu(
                tape,
                nn::matmul(tape, nn::proj_matmul(tape, ab.corr.col_normalized, x_for_m),
                           tape.leaf(store_.at(ip + abstraction_name(ab.kind) + ".wm"))));
            next.t[i] = nn::add(tape, next.t[i], m_term);
        }
    }

    if (cfg_.enable_dimp) {
        const std::vector<TensorRef>& t_for_d = intra ? gt : state.t;
        auto msgs = dimp_step(tape, in, t_for_d, layer);
        for (size_t i = 0; i < in.abstractions.size(); ++i)
            for (size_t k = 0; k < in.abstractions.size(); ++k)
                if (msgs[i][k]) next.t[i] = nn::add(tape, next.t[i], msgs[i][k]);
    }
    return next;
}

TensorRef XimpModel::readout(Tape& tape, const LayerState& state) {
    TensorRef h = nn::matmul(tape, nn::mean_rows(tape, state.x),
                             tape.leaf(store_.at("readout.g.w")));
    for (size_t i = 0; i < state.t.size(); ++i) {
        std::string name = std::string("readout.") +
                           abstraction_name(cfg_.abstractions[i]) + ".w";
        TensorRef part = nn::matmul(tape, nn::mean_rows(tape, state.t[i]),
                                    tape.leaf(store_.at(name)));
        h = cfg_.readout_combine == ReadoutCombine::Concat ? nn::concat_cols(tape, h, part)
                                                           : nn::add(tape, h, part);
    }
    return h;
}

TensorRef XimpModel::head(Tape& tape, TensorRef h) {
    nn::HeadRefs refs;
    refs.w1 = tape.leaf(store_.at("head.w1"));
    refs.b1 = tape.leaf(store_.at("head.b1"));
    refs.w2 = tape.leaf(store_.at("head.w2"));
    refs.b2 = tape.leaf(store_.at("head.b2"));
    return nn::mlp_head(tape, h, refs);
}

TensorRef XimpModel::forward(Tape& tape, const MoleculeInputs& in, bool training,
                             Rng* dropout_rng) {
    if (in.abstractions.size() != cfg_.abstractions.size())
        throw ShapeMismatch("molecule prepared with a different abstraction set");
    LayerState state = initial_state(tape, in);
    for (int l = 0; l < cfg_.n_layers; ++l)
        state = layer_forward(tape, in, state, l, training, dropout_rng);
    return head(tape, readout(tape, state));
}

EcfpModel::EcfpModel(EcfpConfig cfg, uint64_t seed) : cfg_(cfg) {
    Rng rng(seed);
    using Init = nn::ParameterStore::Init;
    store_.add("head.w1", cfg_.n_bits, cfg_.head_hidden, Init::Uniform, rng);
    store_.add("head.b1", 1, cfg_.head_hidden, Init::Zero, rng);
    store_.add("head.w2", cfg_.head_hidden, 1, Init::Uniform, rng);
    store_.add("head.b2", 1, 1, Init::Zero, rng);
}

TensorRef EcfpModel::forward(Tape& tape, const chem::Fingerprint& fp) {
    if (fp.n_bits != cfg_.n_bits)
        throw ShapeMismatch("fingerprint width " + std::to_string(fp.n_bits) +
                            " != model width " + std::to_string(cfg_.n_bits));
    std::vector<double> bits(fp.bits.begin(), fp.bits.end());
    TensorRef x = tape.constant(1, cfg_.n_bits, bits);
    nn::HeadRefs refs;
    refs.w1 = tape.leaf(store_.at("head.w1"));
    refs.b1 = tape.leaf(store_.at("head.b1"));
    refs.w2 = tape.leaf(store_.at("head.w2"));
    refs.b2 = tape.leaf(store_.at("head.b2"));
    return nn::mlp_head(tape, x, refs);
}

}  // namespace ximp::model
