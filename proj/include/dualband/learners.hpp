#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dualband/dataset.hpp"

namespace dualband {

enum class ModelKind { nn, logistic, linear };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

// Hypothesis family: a feedforward network with tanh hidden layers and a
// sigmoid output, a logistic regression (the same path with no hidden
// layers), or a closed-form ridge regression with output clamped to [0, 1].
struct ModelSpec {
    ModelKind kind = ModelKind::nn;
    std::vector<int> hidden_layout = {50, 50};  // nn only
    double alpha = 0.1;                         // L2 coefficient on weights
    std::uint64_t seed = 0;                     // weight initialization stream

    // Enforces the structure bounds: 1-4 hidden layers, <= 100 hidden nodes
    // in total, alpha >= 0.
    void validate() const;
};

// Layer l maps activations a_{l-1} (rows = examples) through a_{l-1} * w[l]
// + b[l]; shapes chain input -> hidden_layout -> 1.
struct NnParams {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
};

// Mini-batch gradient descent settings with early stopping on validation
// cross-entropy (best parameters restored).
struct TrainConfig {
    int max_epochs = 800;
    double learning_rate = 1.0;
    int batch_size = 64;
    int patience = 80;
    std::uint64_t seed = 0;  // batch shuffling stream

    void validate() const;
};

struct TrainedModel {
    ModelSpec spec;
    NnParams params;
    Scaler scaler;        // identity after train(); the real scaler is attached by fit_full
    double gamma_l = 0.5; // hardening threshold; placeholder 0.5 until selected
};

// Dense view of a (feature-selected) dataset: one row per example, columns in
// the scaler/combo feature order.
struct DesignMatrix {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<Feature> features;
};

DesignMatrix to_design_matrix(const Dataset& ds);

// Soft decisions in [0, 1] for every row of x (rows already standardized).
Eigen::VectorXd predict_soft_matrix(const TrainedModel& model, const Eigen::MatrixXd& x);

// Soft decision for one observation with raw feature values; the model's
// scaler is applied internally.
double predict_soft(const TrainedModel& model, const FeatureVector& features);

// D = 1 iff soft > gamma_l (strict).
int harden(double soft, double gamma_l);

// Mean of -L*log(soft) - (1-L)*log(1-soft), with softs clipped into
// [1e-12, 1-1e-12] before the logs (inside this function only).
double cross_entropy(const Eigen::VectorXd& labels, const Eigen::VectorXd& softs);

// Mean absolute disagreement == misclassification rate for binary inputs.
double error_metric(const Eigen::VectorXd& labels, const Eigen::VectorXd& decisions);

// Exact gradient of meanCE(batch) + (alpha/2)*sum of squared weights (biases
// unregularized) for nn/logistic parameters. Exposed for verification.
NnParams loss_gradient(const NnParams& params, const ModelSpec& spec, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y, double alpha);

// The loss whose gradient loss_gradient computes (for finite differencing).
double loss_value(const NnParams& params, const ModelSpec& spec, const Eigen::MatrixXd& x,
                  const Eigen::VectorXd& y, double alpha);

// Seeded symmetric-uniform initialization, scale 1/sqrt(fan-in); biases zero.
NnParams init_params(const ModelSpec& spec, int input_dim);

// Trains on standardized data. nn/logistic: mini-batch gradient descent on
// meanCE + (alpha/(2*N_train))*||weights||^2 with early stopping on
// validation CE; linear: closed-form ridge on {0,1} targets. The returned
// model carries an identity scaler and gamma_l = 0.5; selection attaches the
// real ones. Throws a divergence error naming the epoch if the loss leaves
// the finite range.
TrainedModel train(const ModelSpec& spec, const TrainConfig& cfg, const Dataset& train_set,
                   const Dataset& validation_set);

}  // namespace dualband
