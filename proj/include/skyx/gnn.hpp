#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "skyx/graph.hpp"

namespace skyx {

/// L-layer graph convolutional model. Layer l maps width weights[l].rows() to
/// weights[l].cols(); ReLU after every layer except the last, softmax on the
/// final layer output.
struct GnnModel {
  std::vector<Eigen::MatrixXd> weights;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().rows()); }
  int class_count() const { return weights.empty() ? 0 : static_cast<int>(weights.back().cols()); }
};

/// Validates the dimension chain of a model; throws data_error on mismatch.
void validate_model(const GnnModel& m);

/// Self-loop augmented symmetric normalization over an explicit node count and
/// local edge list: D^{-1/2} (A + I) D^{-1/2}. Rows of isolated nodes carry
/// only the self-loop term.
Eigen::SparseMatrix<double> normalize_adjacency(
    int64_t n, const std::vector<std::pair<int32_t, int32_t>>& edges);

/// Per-node outputs of a full forward pass over some node set. Node order
/// matches the input; `nodes` maps rows back to parent-graph ids when the pass
/// ran over a subgraph.
struct InferenceResult {
  Eigen::MatrixXd embeddings;     // final layer, pre-softmax
  Eigen::MatrixXd probabilities;  // softmax rows
  std::vector<int32_t> predicted; // argmax, ties to the lowest class index
  std::vector<int32_t> nodes;     // row -> node id
};

/// Stable softmax of one logit row, evaluated coefficient by coefficient so
/// the result does not depend on the stride or shape of the source matrix.
/// Every inference path shares this; local and whole-graph passes over the
/// same structure then agree bit for bit.
Eigen::VectorXd softmax_row(const Eigen::RowVectorXd& z);

/// Forward pass over an arbitrary feature matrix and local edge list.
InferenceResult run_gcn(const GnnModel& m, const Eigen::MatrixXd& x,
                        const std::vector<std::pair<int32_t, int32_t>>& edges);

/// Forward pass over a whole graph.
InferenceResult forward(const GnnModel& m, const Graph& g);

/// Forward pass over the edge-induced candidate subgraph.
InferenceResult forward(const GnnModel& m, const Subgraph& s);

struct Prediction {
  int32_t label = -1;
  double prob = 0.0;
  Eigen::VectorXd probabilities;
  bool isolated = false;  // v had no incident edge; self-loop-only propagation
};

/// Predicted class of `v` under the full graph.
Prediction predict(const GnnModel& m, const Graph& g, int32_t v);

/// Predicted class of `v` under a candidate subgraph. When `v` is not covered
/// by the candidate's edges the result comes from self-loop-only propagation
/// of v's own features and is flagged `isolated`.
Prediction predict(const GnnModel& m, const Subgraph& s, int32_t v);

/// Prediction of `v` on the graph obtained by deleting `removed_edges` from
/// `g` (nodes kept). Isolation handled as above.
Prediction predict_minus(const GnnModel& m, const Graph& g,
                         const std::vector<uint32_t>& removed_edges, int32_t v);

struct TrainConfig {
  int hidden = 16;
  int layers = 2;
  int epochs = 200;
  double lr = 0.02;
  uint64_t seed = 1;
};

/// Cross-entropy loss over `mask` plus gradients for every layer; exposed for
/// finite-difference checking.
double loss_and_grad(const GnnModel& m, const Eigen::MatrixXd& x,
                     const Eigen::SparseMatrix<double>& a_norm,
                     const std::vector<int32_t>& labels, const std::vector<int32_t>& mask,
                     std::vector<Eigen::MatrixXd>* grads);

/// Deterministic full-batch gradient-descent training on the labeled nodes in
/// `mask`. Throws data_error when the mask is empty or labels are missing.
GnnModel train_gcn(const Graph& g, const std::vector<int32_t>& mask, const TrainConfig& cfg);

/// Fraction of `mask` nodes whose prediction matches their label.
double training_accuracy(const GnnModel& m, const Graph& g, const std::vector<int32_t>& mask);

/// Seeded Glorot-uniform model, used for synthetic fixtures.
GnnModel random_model(int input_dim, int hidden, int classes, int layers, uint64_t seed);

}  // namespace skyx
