#include "skyx/gnn.hpp"

#include <algorithm>
#include <cmath>

namespace skyx {

void validate_model(const GnnModel& m) {
  if (m.weights.empty()) throw data_error("model: no layers");
  for (size_t l = 0; l + 1 < m.weights.size(); ++l) {
    if (m.weights[l].cols() != m.weights[l + 1].rows())
      throw data_error("model: layer " + std::to_string(l) + " output width " +
                       std::to_string(m.weights[l].cols()) + " != layer " +
                       std::to_string(l + 1) + " input width " +
                       std::to_string(m.weights[l + 1].rows()));
  }
}

Eigen::SparseMatrix<double> normalize_adjacency(
    int64_t n, const std::vector<std::pair<int32_t, int32_t>>& edges) {
  std::vector<double> deg(static_cast<size_t>(n), 1.0);  // self-loop
  for (auto [u, v] : edges) {
    deg[u] += 1.0;
    deg[v] += 1.0;
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 2 + static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) trips.emplace_back(i, i, 1.0 / deg[i]);
  for (auto [u, v] : edges) {
    double w = 1.0 / std::sqrt(deg[u] * deg[v]);
    trips.emplace_back(u, v, w);
    trips.emplace_back(v, u, w);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

Eigen::VectorXd softmax_row(const Eigen::RowVectorXd& z) {
  Eigen::VectorXd p(z.size());
  double mx = z(0);
  for (Eigen::Index c = 1; c < z.size(); ++c) mx = std::max(mx, z(c));
  double sum = 0.0;
  for (Eigen::Index c = 0; c < z.size(); ++c) {
    p(c) = std::exp(z(c) - mx);
    sum += p(c);
  }
  for (Eigen::Index c = 0; c < z.size(); ++c) p(c) /= sum;
  return p;
}

static Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) p.row(i) = softmax_row(z.row(i)).transpose();
  return p;
}

static std::vector<int32_t> argmax_rows(const Eigen::MatrixXd& p) {
  std::vector<int32_t> out(static_cast<size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    int32_t best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c)
      if (p(i, c) > p(i, best)) best = static_cast<int32_t>(c);
    out[i] = best;
  }
  return out;
}

static InferenceResult run_layers(const GnnModel& m, const Eigen::MatrixXd& x,
                                  const Eigen::SparseMatrix<double>& a) {
  validate_model(m);
  if (x.cols() != m.weights.front().rows())
    throw data_error("forward: feature dim " + std::to_string(x.cols()) +
                     " != model input dim " + std::to_string(m.weights.front().rows()));
  Eigen::MatrixXd h = x;
  int L = m.layer_count();
  for (int l = 0; l < L; ++l) {
    h = a * (h * m.weights[l]);
    if (l + 1 < L) h = h.cwiseMax(0.0);
  }
  InferenceResult r;
  r.embeddings = h;
  r.probabilities = softmax_rows(h);
  r.predicted = argmax_rows(r.probabilities);
  r.nodes.resize(static_cast<size_t>(x.rows()));
  for (size_t i = 0; i < r.nodes.size(); ++i) r.nodes[i] = static_cast<int32_t>(i);
  return r;
}

InferenceResult run_gcn(const GnnModel& m, const Eigen::MatrixXd& x,
                        const std::vector<std::pair<int32_t, int32_t>>& edges) {
  return run_layers(m, x, normalize_adjacency(x.rows(), edges));
}

InferenceResult forward(const GnnModel& m, const Graph& g) {
  Eigen::MatrixXd x(g.n, g.feature_dim());
  for (int64_t i = 0; i < g.n; ++i)
    for (int j = 0; j < g.feature_dim(); ++j) x(i, j) = g.features[i][j];
  return run_gcn(m, x, g.edges);
}

InferenceResult forward(const GnnModel& m, const Subgraph& s) {
  const Graph& g = *s.parent;
  std::vector<int32_t> nodes = s.node_ids();
  auto local = [&](int32_t v) {
    return static_cast<int32_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  Eigen::MatrixXd x(static_cast<Eigen::Index>(nodes.size()), g.feature_dim());
  for (size_t i = 0; i < nodes.size(); ++i)
    for (int j = 0; j < g.feature_dim(); ++j) x(static_cast<Eigen::Index>(i), j) = g.features[nodes[i]][j];
  // Masked propagation: every entry keeps the parent graph's normalization,
  // so a pass over a subgraph reproduces full-graph rows bit for bit
  // wherever the edge set covers the receptive field (the locality
  // invariant: the L-hop neighborhood is a perfect factual explanation).
  auto aug = [&](int32_t v) { return static_cast<double>(g.degree(v)) + 1.0; };
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nodes.size() + 2 * s.edge_ids.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0 / aug(nodes[i]));
  for (uint32_t eid : s.edge_ids) {
    auto [u, v] = g.edges[eid];
    double w = 1.0 / std::sqrt(aug(u) * aug(v));
    trips.emplace_back(local(u), local(v), w);
    trips.emplace_back(local(v), local(u), w);
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(nodes.size()),
                                static_cast<Eigen::Index>(nodes.size()));
  a.setFromTriplets(trips.begin(), trips.end());
  InferenceResult r = run_layers(m, x, a);
  r.nodes = nodes;
  return r;
}

static Prediction self_loop_prediction(const GnnModel& m, const Graph& g, int32_t v) {
  Eigen::MatrixXd x(1, g.feature_dim());
  for (int j = 0; j < g.feature_dim(); ++j) x(0, j) = g.features[v][j];
  InferenceResult r = run_gcn(m, x, {});
  Prediction p;
  p.label = r.predicted[0];
  p.probabilities = r.probabilities.row(0);
  p.prob = p.probabilities(p.label);
  p.isolated = true;
  return p;
}

static Prediction prediction_at(const InferenceResult& r, int32_t row) {
  Prediction p;
  p.label = r.predicted[row];
  p.probabilities = r.probabilities.row(row);
  p.prob = p.probabilities(p.label);
  return p;
}

Prediction predict(const GnnModel& m, const Graph& g, int32_t v) {
  if (v < 0 || v >= g.n) throw data_error("predict: node out of range");
  if (g.adj[v].empty()) return self_loop_prediction(m, g, v);
  InferenceResult r = forward(m, g);
  return prediction_at(r, v);
}

Prediction predict(const GnnModel& m, const Subgraph& s, int32_t v) {
  const Graph& g = *s.parent;
  if (v < 0 || v >= g.n) throw data_error("predict: node out of range");
  std::vector<int32_t> nodes = s.node_ids();
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v) return self_loop_prediction(m, g, v);
  InferenceResult r = forward(m, s);
  return prediction_at(r, static_cast<int32_t>(it - nodes.begin()));
}

Prediction predict_minus(const GnnModel& m, const Graph& g,
                         const std::vector<uint32_t>& removed_edges, int32_t v) {
  if (v < 0 || v >= g.n) throw data_error("predict: node out of range");
  std::vector<uint8_t> drop(g.edges.size(), 0);
  for (uint32_t eid : removed_edges) {
    if (eid >= g.edges.size()) throw data_error("predict_minus: edge id out of range");
    drop[eid] = 1;
  }
  std::vector<std::pair<int32_t, int32_t>> kept;
  kept.reserve(g.edges.size());
  bool covered = false;
  for (uint32_t eid = 0; eid < g.edges.size(); ++eid)
    if (!drop[eid]) {
      kept.push_back(g.edges[eid]);
      covered = covered || g.edges[eid].first == v || g.edges[eid].second == v;
    }
  if (!covered) return self_loop_prediction(m, g, v);
  Eigen::MatrixXd x(g.n, g.feature_dim());
  for (int64_t i = 0; i < g.n; ++i)
    for (int j = 0; j < g.feature_dim(); ++j) x(i, j) = g.features[i][j];
  InferenceResult r = run_gcn(m, x, kept);
  return prediction_at(r, v);
}

double loss_and_grad(const GnnModel& m, const Eigen::MatrixXd& x,
                     const Eigen::SparseMatrix<double>& a_norm,
                     const std::vector<int32_t>& labels, const std::vector<int32_t>& mask,
                     std::vector<Eigen::MatrixXd>* grads) {
  int L = m.layer_count();
  // forward, keeping pre- and post-activation intermediates
  std::vector<Eigen::MatrixXd> inputs(L);   // input of layer l (post-activation of l-1)
  std::vector<Eigen::MatrixXd> pre(L);      // a_norm * inputs[l] * w[l]
  Eigen::MatrixXd h = x;
  for (int l = 0; l < L; ++l) {
    inputs[l] = h;
    pre[l] = a_norm * (h * m.weights[l]);
    h = (l + 1 < L) ? pre[l].cwiseMax(0.0).eval() : pre[l];
  }
  Eigen::MatrixXd probs = softmax_rows(h);
  double loss = 0.0;
  double inv = 1.0 / static_cast<double>(mask.size());
  Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  for (int32_t v : mask) {
    int32_t y = labels[v];
    loss -= std::log(std::max(probs(v, y), 1e-300));
    dz.row(v) = probs.row(v) * inv;
    dz(v, y) -= inv;
  }
  loss *= inv;
  if (grads) {
    grads->assign(L, {});
    for (int l = L - 1; l >= 0; --l) {
      // d/dW of (a_norm * H * W): (a_norm * H)^T dz
      Eigen::MatrixXd ah = a_norm * inputs[l];
      (*grads)[l] = ah.transpose() * dz;
      if (l > 0) {
        Eigen::MatrixXd dh = a_norm.transpose() * (dz * m.weights[l].transpose());
        dz = dh.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
      }
    }
  }
  return loss;
}

GnnModel random_model(int input_dim, int hidden, int classes, int layers, uint64_t seed) {
  GnnModel m;
  rng r(seed);
  for (int l = 0; l < layers; ++l) {
    int in = (l == 0) ? input_dim : hidden;
    int out = (l + 1 == layers) ? classes : hidden;
    double s = std::sqrt(6.0 / static_cast<double>(in + out));
    Eigen::MatrixXd w(in, out);
    for (int i = 0; i < in; ++i)
      for (int j = 0; j < out; ++j) w(i, j) = r.next_in(-s, s);
    m.weights.push_back(std::move(w));
  }
  return m;
}

GnnModel train_gcn(const Graph& g, const std::vector<int32_t>& mask, const TrainConfig& cfg) {
  if (mask.empty()) throw data_error("train: no labeled nodes in the training mask");
  int32_t classes = 0;
  for (int32_t v : mask) {
    if (v < 0 || v >= g.n) throw data_error("train: mask node out of range");
    if (g.labels[v] < 0) throw data_error("train: node " + std::to_string(v) + " unlabeled");
    classes = std::max(classes, g.labels[v] + 1);
  }
  if (classes < 2) throw data_error("train: need at least two classes");
  if (g.feature_dim() == 0) throw data_error("train: graph has no features");
  if (cfg.layers < 1) throw data_error("train: layer count must be >= 1");

  GnnModel m = random_model(g.feature_dim(), cfg.hidden, classes, cfg.layers, cfg.seed);
  Eigen::MatrixXd x(g.n, g.feature_dim());
  for (int64_t i = 0; i < g.n; ++i)
    for (int j = 0; j < g.feature_dim(); ++j) x(i, j) = g.features[i][j];
  Eigen::SparseMatrix<double> a = normalize_adjacency(g.n, g.edges);
  std::vector<Eigen::MatrixXd> grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    loss_and_grad(m, x, a, g.labels, mask, &grads);
    for (int l = 0; l < m.layer_count(); ++l) m.weights[l] -= cfg.lr * grads[l];
  }
  return m;
}

double training_accuracy(const GnnModel& m, const Graph& g, const std::vector<int32_t>& mask) {
  if (mask.empty()) throw data_error("accuracy: empty mask");
  InferenceResult r = forward(m, g);
  int64_t hit = 0;
  for (int32_t v : mask)
    if (r.predicted[v] == g.labels[v]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(mask.size());
}

}  // namespace skyx
