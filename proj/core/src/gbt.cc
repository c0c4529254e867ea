// Copyright 2026 The Hybrid DST Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdst/gbt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "hdst/error.h"
#include "hdst/rng.h"

namespace hdst {
namespace {

using nlohmann::ordered_json;
constexpr int K = kNumVerdicts;
constexpr double kMinHessian = 1e-16;

void Softmax(const double* margins, double* out) {
  double m = margins[0];
  for (int k = 1; k < K; ++k) m = std::max(m, margins[k]);
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    out[k] = std::exp(margins[k] - m);
    total += out[k];
  }
  for (int k = 0; k < K; ++k) out[k] /= total;
}

double NegLogProb(const double* margins, int label) {
  double m = margins[0];
  for (int k = 1; k < K; ++k) m = std::max(m, margins[k]);
  double total = 0.0;
  for (int k = 0; k < K; ++k) total += std::exp(margins[k] - m);
  return m + std::log(total) - margins[label];
}

// Loss over a row-major margin matrix.
double LossOf(const std::vector<double>& margins,
              std::span<const LabeledSample> data,
              const std::vector<double>& weights) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    num += weights[i] *
           NegLogProb(&margins[i * K], static_cast<int>(data[i].label));
    den += weights[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct FrontierStats {
  double g = 0.0, h = 0.0;
  std::size_t count = 0;
};

double Score(double g, double h, double lambda) { return g * g / (h + lambda); }

// Grows one regression tree level by level. Rows with node_of == -1 are
// excluded (subsampling).
class TreeGrower {
 public:
  TreeGrower(const std::vector<double>& x, std::size_t n, int n_features,
             const std::vector<std::vector<std::uint32_t>>& sorted,
             const GbtParams& params)
      : x_(x), n_(n), f_(n_features), sorted_(sorted), params_(params) {}

  RegressionTree Grow(const std::vector<double>& g, const std::vector<double>& h,
                      const std::vector<char>& active) {
    std::vector<TreeNode> nodes(1);
    std::vector<int> node_of(n_, -1);
    for (std::size_t i = 0; i < n_; ++i) {
      if (active[i]) node_of[i] = 0;
    }
    std::vector<int> frontier{0};
    for (int depth = 0; !frontier.empty(); ++depth) {
      // Sums per frontier node.
      std::vector<int> slot_of(nodes.size(), -1);
      for (std::size_t j = 0; j < frontier.size(); ++j) {
        slot_of[static_cast<std::size_t>(frontier[j])] = static_cast<int>(j);
      }
      std::vector<FrontierStats> total(frontier.size());
      for (std::size_t i = 0; i < n_; ++i) {
        if (node_of[i] < 0) continue;
        const int s = slot_of[static_cast<std::size_t>(node_of[i])];
        if (s < 0) continue;
        total[s].g += g[i];
        total[s].h += h[i];
        ++total[s].count;
      }
      std::vector<SplitCandidate> best(frontier.size());
      if (depth < params_.max_depth) {
        FindSplits(g, h, node_of, slot_of, total, best);
      }
      std::vector<int> next;
      for (std::size_t j = 0; j < frontier.size(); ++j) {
        TreeNode& node = nodes[static_cast<std::size_t>(frontier[j])];
        if (best[j].feature < 0) {
          node.leaf = -total[j].g / (total[j].h + params_.lambda) *
                      params_.learning_rate;
          continue;
        }
        node.feature = best[j].feature;
        node.threshold = best[j].threshold;
        node.left = static_cast<int>(nodes.size());
        node.right = node.left + 1;
        next.push_back(node.left);
        next.push_back(node.right);
        nodes.emplace_back();
        nodes.emplace_back();
      }
      // Route rows to the new children.
      for (std::size_t i = 0; i < n_; ++i) {
        if (node_of[i] < 0) continue;
        const TreeNode& node = nodes[static_cast<std::size_t>(node_of[i])];
        if (node.is_leaf()) continue;
        const double v = x_[i * static_cast<std::size_t>(f_) +
                            static_cast<std::size_t>(node.feature)];
        node_of[i] = v < node.threshold ? node.left : node.right;
      }
      frontier = std::move(next);
    }
    return Canonical(nodes);
  }

 private:
  void FindSplits(const std::vector<double>& g, const std::vector<double>& h,
                  const std::vector<int>& node_of,
                  const std::vector<int>& slot_of,
                  const std::vector<FrontierStats>& total,
                  std::vector<SplitCandidate>& best) const {
    const std::size_t m = total.size();
    std::vector<double> gl(m), hl(m), last(m);
    std::vector<std::size_t> seen(m);
    for (int feature = 0; feature < f_; ++feature) {
      std::fill(gl.begin(), gl.end(), 0.0);
      std::fill(hl.begin(), hl.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint32_t row : sorted_[static_cast<std::size_t>(feature)]) {
        if (node_of[row] < 0) continue;
        const int s = slot_of[static_cast<std::size_t>(node_of[row])];
        if (s < 0) continue;
        const double v = x_[row * static_cast<std::size_t>(f_) +
                            static_cast<std::size_t>(feature)];
        if (seen[s] > 0 && v > last[s]) {
          const double hr = total[s].h - hl[s];
          if (hl[s] >= params_.min_child_weight &&
              hr >= params_.min_child_weight) {
            const double gr = total[s].g - gl[s];
            const double gain =
                0.5 * (Score(gl[s], hl[s], params_.lambda) +
                       Score(gr, hr, params_.lambda) -
                       Score(total[s].g, total[s].h, params_.lambda));
            if (gain > 1e-12 && gain > best[s].gain) {
              double thr = 0.5 * (last[s] + v);
              if (!(last[s] < thr)) thr = v;
              best[s] = {gain, feature, thr};
            }
          }
        }
        gl[s] += g[row];
        hl[s] += h[row];
        last[s] = v;
        ++seen[s];
      }
    }
  }

  // Re-lays the tree out in preorder so serialization round-trips exactly.
  static RegressionTree Canonical(const std::vector<TreeNode>& nodes) {
    RegressionTree tree;
    struct Rec {
      static int Visit(const std::vector<TreeNode>& in, int idx,
                       std::vector<TreeNode>& out) {
        const int me = static_cast<int>(out.size());
        out.push_back(in[static_cast<std::size_t>(idx)]);
        if (!in[static_cast<std::size_t>(idx)].is_leaf()) {
          const int l = Visit(in, in[static_cast<std::size_t>(idx)].left, out);
          const int r = Visit(in, in[static_cast<std::size_t>(idx)].right, out);
          out[static_cast<std::size_t>(me)].left = l;
          out[static_cast<std::size_t>(me)].right = r;
        }
        return me;
      }
    };
    Rec::Visit(nodes, 0, tree.nodes);
    return tree;
  }

  const std::vector<double>& x_;
  std::size_t n_;
  int f_;
  const std::vector<std::vector<std::uint32_t>>& sorted_;
  const GbtParams& params_;
};

ordered_json NodeToJson(const RegressionTree& tree, int idx) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
  if (node.is_leaf()) return ordered_json{{"leaf", node.leaf}};
  ordered_json j;
  j["feat"] = node.feature;
  j["thr"] = node.threshold;
  j["left"] = NodeToJson(tree, node.left);
  j["right"] = NodeToJson(tree, node.right);
  return j;
}

int NodeFromJson(const nlohmann::json& j, std::vector<TreeNode>& out,
                 int depth) {
  if (depth > 64) throw Error(ErrorCode::kSemantic, "model tree too deep");
  const int me = static_cast<int>(out.size());
  out.emplace_back();
  if (j.contains("leaf")) {
    out[static_cast<std::size_t>(me)].leaf = j.at("leaf").get<double>();
    if (!std::isfinite(out[static_cast<std::size_t>(me)].leaf)) {
      throw Error(ErrorCode::kSemantic, "model leaf value is not finite");
    }
    return me;
  }
  TreeNode node;
  node.feature = j.at("feat").get<int>();
  node.threshold = j.at("thr").get<double>();
  if (node.feature < 0) throw Error(ErrorCode::kSemantic, "negative feature");
  node.left = NodeFromJson(j.at("left"), out, depth + 1);
  node.right = NodeFromJson(j.at("right"), out, depth + 1);
  out[static_cast<std::size_t>(me)] = node;
  return me;
}

}  // namespace

double RegressionTree::Predict(std::span<const double> x) const {
  int idx = 0;
  while (true) {
    const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
    if (node.is_leaf()) return node.leaf;
    idx = x[static_cast<std::size_t>(node.feature)] < node.threshold
              ? node.left
              : node.right;
  }
}

int RegressionTree::Depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int max_depth = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    max_depth = std::max(max_depth, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[static_cast<std::size_t>(nodes[i].left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(nodes[i].right)] = depth[i] + 1;
    }
  }
  return max_depth;
}

ClassVector GbtModel::Margins(std::span<const double> x) const {
  ClassVector margins{};
  for (std::size_t k = 0; k < trees.size() && k < margins.size(); ++k) {
    for (const RegressionTree& tree : trees[k]) margins[k] += tree.Predict(x);
  }
  return margins;
}

ClassVector GbtModel::Probabilities(std::span<const double> x) const {
  const ClassVector margins = Margins(x);
  ClassVector p{};
  Softmax(margins.data(), p.data());
  return p;
}

ClassVector DefaultClassWeights(std::span<const LabeledSample> data) {
  std::array<std::size_t, K> counts{};
  for (const LabeledSample& s : data) ++counts[static_cast<int>(s.label)];
  const std::size_t majority = *std::max_element(counts.begin(), counts.end());
  ClassVector weights{1.0, 1.0, 1.0};
  for (int k = 0; k < K; ++k) {
    if (counts[k] > 0) {
      weights[k] = std::min(50.0, static_cast<double>(majority) /
                                      static_cast<double>(counts[k]));
    }
  }
  return weights;
}

GbtModel TrainGbt(std::span<const LabeledSample> data, const GbtParams& params,
                  TrainingTrace* trace) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot train on an empty dataset");
  }
  if (params.n_trees < 0 || params.max_depth < 0 ||
      !(params.learning_rate > 0.0) || params.lambda < 0.0 ||
      !(params.subsample > 0.0) || params.subsample > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid boosting parameters");
  }
  const std::size_t n = data.size();
  const int f = static_cast<int>(data[0].features.size());
  std::vector<double> x(n * static_cast<std::size_t>(f));
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(data[i].features.size()) != f) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "sample " + std::to_string(i) + " has a different width");
    }
    for (int j = 0; j < f; ++j) {
      const double v = data[i].features[static_cast<std::size_t>(j)];
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite feature in sample " + std::to_string(i));
      }
      x[i * static_cast<std::size_t>(f) + static_cast<std::size_t>(j)] = v;
    }
  }

  GbtModel model;
  model.n_features = f;
  model.learning_rate = params.learning_rate;
  model.class_weights = params.class_weights.value_or(ClassVector{1.0, 1.0, 1.0});
  for (double w : model.class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "class weights must be positive");
    }
  }
  model.trees.assign(K, {});

  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = model.class_weights[static_cast<int>(data[i].label)];
  }
  std::vector<std::vector<std::uint32_t>> sorted(static_cast<std::size_t>(f));
  for (int j = 0; j < f; ++j) {
    auto& order = sorted[static_cast<std::size_t>(j)];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return x[a * static_cast<std::size_t>(f) + static_cast<std::size_t>(j)] <
             x[b * static_cast<std::size_t>(f) + static_cast<std::size_t>(j)];
    });
  }

  std::vector<double> margins(n * K, 0.0);
  double loss = LossOf(margins, data, weights);
  if (trace) trace->loss = {loss};

  TreeGrower grower(x, n, f, sorted, params);
  Rng rng(params.seed);
  std::vector<double> prob(n * K), g(n), h(n), out(n * K), candidate(n * K);
  std::vector<char> active(n, 1);
  for (int round = 0; round < params.n_trees; ++round) {
    if (params.subsample < 1.0) {
      for (std::size_t i = 0; i < n; ++i) active[i] = rng.Bernoulli(params.subsample);
    }
    for (std::size_t i = 0; i < n; ++i) Softmax(&margins[i * K], &prob[i * K]);
    std::array<RegressionTree, K> round_trees;
    for (int k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i * K + static_cast<std::size_t>(k)];
        const double y = static_cast<int>(data[i].label) == k ? 1.0 : 0.0;
        g[i] = weights[i] * (p - y);
        h[i] = weights[i] * std::max(p * (1.0 - p), kMinHessian);
      }
      round_trees[k] = grower.Grow(g, h, active);
      for (std::size_t i = 0; i < n; ++i) {
        out[i * K + static_cast<std::size_t>(k)] = round_trees[k].Predict(
            std::span<const double>(&x[i * static_cast<std::size_t>(f)],
                                    static_cast<std::size_t>(f)));
      }
    }
    // Backtracking on the round's step keeps the loss monotone.
    double step = 1.0;
    double new_loss = loss;
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      for (std::size_t i = 0; i < n * K; ++i) candidate[i] = margins[i] + step * out[i];
      new_loss = LossOf(candidate, data, weights);
      if (new_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      step = 0.0;
      candidate = margins;
      new_loss = loss;
    }
    for (int k = 0; k < K; ++k) {
      if (step != 1.0) {
        for (TreeNode& node : round_trees[k].nodes) node.leaf *= step;
      }
      model.trees[k].push_back(std::move(round_trees[k]));
    }
    margins.swap(candidate);
    loss = new_loss;
    if (trace) trace->loss.push_back(loss);
  }
  return model;
}

double WeightedLogLoss(const GbtModel& model,
                       std::span<const LabeledSample> data,
                       const ClassVector& class_weights) {
  double num = 0.0, den = 0.0;
  for (const LabeledSample& s : data) {
    const ClassVector m = model.Margins(s.features);
    const double w = class_weights[static_cast<int>(s.label)];
    num += w * NegLogProb(m.data(), static_cast<int>(s.label));
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

int DecideClass(const ClassVector& probabilities, const ClassVector& offsets) {
  int best = 0;
  double best_value = probabilities[0] + offsets[0];
  for (int k = 1; k < K; ++k) {
    const double v = probabilities[k] + offsets[k];
    if (v > best_value) {
      best = k;
      best_value = v;
    }
  }
  return best;
}

ValidationVerdict PredictGbt(const GbtModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.n_features) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(model.n_features) +
                    " features, got " + std::to_string(x.size()));
  }
  ValidationVerdict verdict;
  verdict.probabilities = model.Probabilities(x);
  verdict.label =
      static_cast<Verdict>(DecideClass(verdict.probabilities, model.thresholds));
  return verdict;
}

ValidationVerdict PredictGbt(const GbtModel& model,
                             const ValidatorFeatures& features) {
  const auto v = features.Vector();
  ValidationVerdict verdict = PredictGbt(model, std::span<const double>(v));
  if (verdict.label == Verdict::kConfirmed) {
    verdict.chosen_intent = features.top_intent;
  }
  return verdict;
}

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Macro-F1 as an exact fraction, so tuning ties are real ties.
Rational ExactMacroF1(std::span<const int> gold, std::span<const int> pred) {
  std::array<std::size_t, K> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) {
      ++tp[static_cast<std::size_t>(gold[i])];
    } else {
      ++fn[static_cast<std::size_t>(gold[i])];
      ++fp[static_cast<std::size_t>(pred[i])];
    }
  }
  Rational sum = 0;
  int present = 0;
  for (int k = 0; k < K; ++k) {
    const std::size_t denom = 2 * tp[k] + fp[k] + fn[k];
    if (denom == 0) continue;
    ++present;
    sum += Rational(2 * tp[k], denom);
  }
  return present ? sum / present : Rational(0);
}

}  // namespace

double MacroF1(std::span<const int> gold, std::span<const int> pred) {
  return static_cast<double>(ExactMacroF1(gold, pred));
}

ClassVector TuneThresholds(const GbtModel& model,
                           std::span<const LabeledSample> dev) {
  std::vector<ClassVector> probs;
  std::vector<int> gold;
  probs.reserve(dev.size());
  for (const LabeledSample& s : dev) {
    probs.push_back(model.Probabilities(s.features));
    gold.push_back(static_cast<int>(s.label));
  }
  return TuneThresholds(probs, gold);
}

ClassVector TuneThresholds(std::span<const ClassVector> probs, std::span<const int> gold) {
  if (probs.size() != gold.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "probabilities and labels differ in length");
  }
  if (probs.empty()) return ClassVector{};
  std::vector<int> pred(probs.size());
  Rational best_f1 = -1;
  int best_l1 = std::numeric_limits<int>::max();
  std::array<int, K> best{0, 0, 0};
  // Labels depend only on offset differences; each difference pair is scored
  // once with its minimum-L1 representative on the grid.
  for (int d1 = -100; d1 <= 100; ++d1) {
    for (int d2 = -100; d2 <= 100; ++d2) {
      const int lo = std::max({-50, -50 - d1, -50 - d2});
      const int hi = std::min({50, 50 - d1, 50 - d2});
      if (lo > hi) continue;
      std::array<int, 3> pts{0, -d1, -d2};
      std::sort(pts.begin(), pts.end());
      const int o0 = std::clamp(pts[1], lo, hi);
      const std::array<int, K> grid{o0, o0 + d1, o0 + d2};
      const ClassVector offsets{grid[0] / 100.0, grid[1] / 100.0, grid[2] / 100.0};
      for (std::size_t i = 0; i < probs.size(); ++i) {
        pred[i] = DecideClass(probs[i], offsets);
      }
      const Rational f1 = ExactMacroF1(gold, pred);
      const int l1 = std::abs(grid[0]) + std::abs(grid[1]) + std::abs(grid[2]);
      if (f1 > best_f1 || (f1 == best_f1 && (l1 < best_l1 ||
                                             (l1 == best_l1 && grid < best)))) {
        best_f1 = f1;
        best_l1 = l1;
        best = grid;
      }
    }
  }
  return {best[0] / 100.0, best[1] / 100.0, best[2] / 100.0};
}

std::string SerializeGbtModel(const GbtModel& model) {
  ordered_json doc;
  doc["n_classes"] = K;
  doc["n_features"] = model.n_features;
  doc["learning_rate"] = model.learning_rate;
  doc["class_weights"] = model.class_weights;
  doc["thresholds"] = model.thresholds;
  ordered_json trees = ordered_json::array();
  for (const auto& per_class : model.trees) {
    ordered_json list = ordered_json::array();
    for (const RegressionTree& tree : per_class) list.push_back(NodeToJson(tree, 0));
    trees.push_back(std::move(list));
  }
  doc["trees"] = std::move(trees);
  return doc.dump() + "\n";
}

GbtModel ParseGbtModel(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, std::string("model syntax error: ") + e.what());
  }
  GbtModel model;
  try {
    if (doc.at("n_classes").get<int>() != K) {
      throw Error(ErrorCode::kSemantic, "model must have 3 classes");
    }
    model.n_features = doc.value("n_features", static_cast<int>(kFeatureCount));
    model.learning_rate = doc.at("learning_rate").get<double>();
    model.class_weights = doc.at("class_weights").get<ClassVector>();
    model.thresholds = doc.at("thresholds").get<ClassVector>();
    const auto& trees = doc.at("trees");
    if (trees.size() != static_cast<std::size_t>(K)) {
      throw Error(ErrorCode::kSemantic, "model needs one tree list per class");
    }
    for (const auto& per_class : trees) {
      std::vector<RegressionTree> list;
      for (const auto& root : per_class) {
        RegressionTree tree;
        NodeFromJson(root, tree.nodes, 0);
        for (const TreeNode& node : tree.nodes) {
          if (!node.is_leaf() && node.feature >= model.n_features) {
            throw Error(ErrorCode::kSemantic, "tree feature index out of range");
          }
        }
        list.push_back(std::move(tree));
      }
      model.trees.push_back(std::move(list));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSemantic, std::string("model: ") + e.what());
  }
  return model;
}

}  // namespace hdst
