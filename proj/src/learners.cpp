#include "dualband/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "dualband/numerics.hpp"
#include "dualband/rng.hpp"

namespace dualband {

namespace {

constexpr double kCeClip = 1e-12;

std::vector<int> effective_layout(const ModelSpec& spec) {
    return spec.kind == ModelKind::nn ? spec.hidden_layout : std::vector<int>{};
}

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& z) {
    Eigen::VectorXd out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = sigmoid(z(i));
    return out;
}

// Activations per layer for nn/logistic; activations.front() is the input,
// activations.back() the sigmoid output column.
std::vector<Eigen::MatrixXd> forward_activations(const NnParams& params, const Eigen::MatrixXd& x) {
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(params.w.size() + 1);
    acts.push_back(x);
    for (std::size_t l = 0; l < params.w.size(); ++l) {
        Eigen::MatrixXd z = acts.back() * params.w[l];
        z.rowwise() += params.b[l].transpose();
        if (l + 1 < params.w.size())
            acts.push_back(z.array().tanh().matrix());
        else
            acts.push_back(sigmoid_vec(z));
    }
    return acts;
}

Eigen::VectorXd forward_soft(const ModelSpec& spec, const NnParams& params, const Eigen::MatrixXd& x) {
    if (spec.kind == ModelKind::linear) {
        Eigen::VectorXd out = x * params.w[0] + Eigen::VectorXd::Constant(x.rows(), params.b[0](0));
        return out.cwiseMax(0.0).cwiseMin(1.0);
    }
    return forward_activations(params, x).back().col(0);
}

NnParams ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double alpha) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    Eigen::MatrixXd xt(n, d + 1);
    xt.leftCols(d) = x;
    xt.col(d).setOnes();
    Eigen::MatrixXd a = (xt.transpose() * xt) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < d; ++i) a(i, i) += alpha;  // bias term unregularized
    const Eigen::VectorXd rhs = xt.transpose() * y / static_cast<double>(n);
    const Eigen::VectorXd sol = a.ldlt().solve(rhs);
    NnParams p;
    p.w.push_back(sol.head(d));
    p.b.push_back(Eigen::VectorXd::Constant(1, sol(d)));
    return p;
}

Scaler identity_scaler(const std::vector<Feature>& features) {
    Scaler s;
    s.features = features;
    s.use_log10.assign(features.size(), false);
    s.offset.assign(features.size(), 0.0);
    s.scale.assign(features.size(), 1.0);
    return s;
}

struct GradientResult {
    NnParams grad;
    double ce = 0.0;
};

GradientResult gradient_and_ce(const NnParams& params, const Eigen::MatrixXd& x,
                               const Eigen::VectorXd& y, double alpha) {
    const auto acts = forward_activations(params, x);
    const Eigen::VectorXd out = acts.back().col(0);
    const double n = static_cast<double>(x.rows());
    GradientResult r;
    r.ce = cross_entropy(y, out);
    // delta of the output pre-activation: d(meanCE)/dz = (out - y)/n.
    Eigen::MatrixXd delta = (out - y) / n;
    r.grad.w.resize(params.w.size());
    r.grad.b.resize(params.b.size());
    for (std::size_t l = params.w.size(); l-- > 0;) {
        r.grad.w[l] = acts[l].transpose() * delta + alpha * params.w[l];
        r.grad.b[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            const Eigen::MatrixXd back = delta * params.w[l].transpose();
            delta = back.array() * (1.0 - acts[l].array().square());
        }
    }
    return r;
}

void check_same_features(const Dataset& ds, const std::vector<Feature>& features) {
    for (std::size_t i = 0; i < ds.n(); ++i)
        for (Feature f : features)
            if (!ds.examples[i].features.has(f))
                throw std::invalid_argument("example " + std::to_string(i) + " is missing feature '" +
                                            feature_name(f) + "'");
}

}  // namespace

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::nn: return "nn";
        case ModelKind::logistic: return "gr";
        case ModelKind::linear: return "lr";
    }
    throw std::invalid_argument("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "nn") return ModelKind::nn;
    if (name == "gr" || name == "logistic") return ModelKind::logistic;
    if (name == "lr" || name == "linear") return ModelKind::linear;
    throw std::invalid_argument("unknown model kind: '" + name + "'");
}

void ModelSpec::validate() const {
    if (!(alpha >= 0.0)) throw std::invalid_argument("model spec: alpha must be >= 0");
    if (kind != ModelKind::nn) return;
    if (hidden_layout.empty() || hidden_layout.size() > 4)
        throw std::invalid_argument("model spec: nn needs 1-4 hidden layers");
    int total = 0;
    for (int wdt : hidden_layout) {
        if (wdt < 1) throw std::invalid_argument("model spec: hidden widths must be positive");
        total += wdt;
    }
    if (total > 100) throw std::invalid_argument("model spec: at most 100 hidden nodes in total");
}

void TrainConfig::validate() const {
    if (max_epochs < 1 || batch_size < 1 || patience < 1 || !(learning_rate > 0.0))
        throw std::invalid_argument("train config: all settings must be positive");
}

DesignMatrix to_design_matrix(const Dataset& ds) {
    if (ds.empty()) throw std::invalid_argument("to_design_matrix: dataset is empty");
    DesignMatrix dm;
    for (int i = 0; i < kFeatureCount; ++i) {
        const Feature f = static_cast<Feature>(i);
        if (ds.examples.front().features.has(f)) dm.features.push_back(f);
    }
    check_same_features(ds, dm.features);
    dm.x.resize(static_cast<Eigen::Index>(ds.n()), static_cast<Eigen::Index>(dm.features.size()));
    dm.y.resize(static_cast<Eigen::Index>(ds.n()));
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t k = 0; k < dm.features.size(); ++k)
            dm.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                *ds.examples[i].features[dm.features[k]];
        dm.y(static_cast<Eigen::Index>(i)) = ds.examples[i].label;
    }
    return dm;
}

Eigen::VectorXd predict_soft_matrix(const TrainedModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.params.w.front().rows())
        throw std::invalid_argument("predict: input dimension mismatch");
    return forward_soft(model.spec, model.params, x);
}

double predict_soft(const TrainedModel& model, const FeatureVector& features) {
    const std::size_t k = model.scaler.features.size();
    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        const Feature f = model.scaler.features[i];
        if (!features.has(f))
            throw std::invalid_argument(std::string("predict: missing feature '") + feature_name(f) + "'");
        x(0, static_cast<Eigen::Index>(i)) = model.scaler.transform(i, *features[f]);
    }
    return predict_soft_matrix(model, x)(0);
}

int harden(double soft, double gamma_l) {
    if (!(soft >= 0.0 && soft <= 1.0) || !(gamma_l >= 0.0 && gamma_l <= 1.0))
        throw std::invalid_argument("harden: inputs must lie in [0, 1]");
    return soft > gamma_l ? 1 : 0;
}

double cross_entropy(const Eigen::VectorXd& labels, const Eigen::VectorXd& softs) {
    if (labels.size() != softs.size()) throw std::invalid_argument("cross_entropy: length mismatch");
    if (labels.size() == 0) throw std::invalid_argument("cross_entropy: empty input");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(softs(i), kCeClip, 1.0 - kCeClip);
        sum += -labels(i) * std::log(p) - (1.0 - labels(i)) * std::log(1.0 - p);
    }
    return sum / static_cast<double>(labels.size());
}

double error_metric(const Eigen::VectorXd& labels, const Eigen::VectorXd& decisions) {
    if (labels.size() != decisions.size()) throw std::invalid_argument("error_metric: length mismatch");
    if (labels.size() == 0) throw std::invalid_argument("error_metric: empty input");
    return (labels - decisions).cwiseAbs().mean();
}

NnParams init_params(const ModelSpec& spec, int input_dim) {
    spec.validate();
    if (input_dim < 1) throw std::invalid_argument("init_params: input dimension must be positive");
    std::vector<int> dims;
    dims.push_back(input_dim);
    for (int wdt : effective_layout(spec)) dims.push_back(wdt);
    dims.push_back(1);
    Rng rng(derive_seed(spec.seed, "init"));
    NnParams p;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        Eigen::MatrixXd w(dims[l], dims[l + 1]);
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rng.uniform(-bound, bound);
        p.w.push_back(std::move(w));
        p.b.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return p;
}

NnParams loss_gradient(const NnParams& params, const ModelSpec& spec, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y, double alpha) {
    if (spec.kind == ModelKind::linear)
        throw std::invalid_argument("loss_gradient: linear models are fit in closed form");
    return gradient_and_ce(params, x, y, alpha).grad;
}

double loss_value(const NnParams& params, const ModelSpec& spec, const Eigen::MatrixXd& x,
                  const Eigen::VectorXd& y, double alpha) {
    if (spec.kind == ModelKind::linear)
        throw std::invalid_argument("loss_value: linear models are fit in closed form");
    const Eigen::VectorXd out = forward_activations(params, x).back().col(0);
    double penalty = 0.0;
    for (const auto& w : params.w) penalty += w.squaredNorm();
    return cross_entropy(y, out) + 0.5 * alpha * penalty;
}

TrainedModel train(const ModelSpec& spec, const TrainConfig& cfg, const Dataset& train_set,
                   const Dataset& validation_set) {
    spec.validate();
    cfg.validate();
    const DesignMatrix tr = to_design_matrix(train_set);
    const DesignMatrix va = to_design_matrix(validation_set);
    if (va.features != tr.features)
        throw std::invalid_argument("train: validation features differ from training features");

    TrainedModel model;
    model.spec = spec;
    model.scaler = identity_scaler(tr.features);
    model.gamma_l = 0.5;

    if (spec.kind == ModelKind::linear) {
        model.params = ridge_fit(tr.x, tr.y, spec.alpha);
        return model;
    }

    const Eigen::Index n = tr.x.rows();
    const double alpha_eff = spec.alpha / static_cast<double>(n);
    NnParams params = init_params(spec, static_cast<int>(tr.x.cols()));
    Rng shuffle_rng(derive_seed(cfg.seed, "batches"));
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    NnParams best_params = params;
    double best_ce = std::numeric_limits<double>::infinity();
    int wait = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(cfg.batch_size, n - start);
            Eigen::MatrixXd xb(count, tr.x.cols());
            Eigen::VectorXd yb(count);
            for (Eigen::Index r = 0; r < count; ++r) {
                xb.row(r) = tr.x.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + r)]));
                yb(r) = tr.y(static_cast<Eigen::Index>(order[static_cast<std::size_t>(start + r)]));
            }
            const GradientResult g = gradient_and_ce(params, xb, yb, alpha_eff);
            if (!std::isfinite(g.ce))
                throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
            for (std::size_t l = 0; l < params.w.size(); ++l) {
                params.w[l] -= cfg.learning_rate * g.grad.w[l];
                params.b[l] -= cfg.learning_rate * g.grad.b[l];
            }
        }
        const double val_ce = cross_entropy(va.y, forward_activations(params, va.x).back().col(0));
        if (!std::isfinite(val_ce))
            throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
        if (val_ce < best_ce) {
            best_ce = val_ce;
            best_params = params;
            wait = 0;
        } else if (++wait >= cfg.patience) {
            break;
        }
    }
    model.params = std::move(best_params);
    return model;
}

}  // namespace dualband
