#include "icl/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "icl/errors.hpp"
#include "icl/rng.hpp"

namespace icl {

namespace {

std::map<std::string, int> table_map(const Task& task) {
  std::map<std::string, int> out;
  for (const auto& [tok, code] : task.symbol_table()) out[tok] = code;
  return out;
}

std::vector<Tape> encode_all(const std::vector<TaskInstance>& instances, const Task& task,
                             std::size_t width) {
  std::vector<Tape> out;
  out.reserve(instances.size());
  for (const TaskInstance& inst : instances) out.push_back(encode(inst, task, width));
  return out;
}

std::vector<int> labels_of(const std::vector<TaskInstance>& instances) {
  std::vector<int> out;
  out.reserve(instances.size());
  for (const TaskInstance& inst : instances) out.push_back(static_cast<int>(inst.gold));
  return out;
}


// ---------------------------------------------------------------------------
// Decision tree (CART, Gini, depth-unbounded)
// ---------------------------------------------------------------------------

struct TreeNode {
  int feature = -1;
  int threshold = 0;  // go left when value <= threshold
  int label = 0;
  int left = -1;
  int right = -1;
};

class DecisionTree {
 public:
  void fit(const std::vector<Tape>& x, const std::vector<int>& y) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    build(x, y, idx);
  }

  int predict(const Tape& t) const {
    int node = 0;
    while (nodes_[node].feature >= 0) {
      node = t.values[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                      : nodes_[node].right;
    }
    return nodes_[node].label;
  }

 private:
  // Feature values live in a small integer range, so split search uses
  // per-value class histograms instead of sorting.
  static constexpr int kLo = kPadValue;
  static constexpr int kHi = 32;
  static constexpr int kRange = kHi - kLo + 1;

  int build(const std::vector<Tape>& x, const std::vector<int>& y,
            const std::vector<std::size_t>& idx) {
    int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    long long pos = 0;
    for (std::size_t i : idx) pos += y[i];
    if (pos == 0 || pos == static_cast<long long>(idx.size())) {
      nodes_[node_id].label = pos > 0 ? 1 : 0;
      return node_id;
    }

    const std::size_t n_features = x[0].values.size();
    double best_gini = std::numeric_limits<double>::max();
    int best_feature = -1, best_threshold = 0;
    std::vector<int> count0(kRange), count1(kRange);
    for (std::size_t f = 0; f < n_features; ++f) {
      std::fill(count0.begin(), count0.end(), 0);
      std::fill(count1.begin(), count1.end(), 0);
      for (std::size_t i : idx) {
        int v = x[i].values[f] - kLo;
        (y[i] ? count1[v] : count0[v])++;
      }
      long long left0 = 0, left1 = 0;
      const long long total0 = static_cast<long long>(idx.size()) - pos, total1 = pos;
      for (int v = 0; v + 1 < kRange; ++v) {
        left0 += count0[v];
        left1 += count1[v];
        long long nl = left0 + left1;
        long long nr = total0 + total1 - nl;
        if (nl == 0 || nr == 0) continue;
        double gl = 1.0 - (double(left0) * left0 + double(left1) * left1) / (double(nl) * nl);
        long long r0 = total0 - left0, r1 = total1 - left1;
        double gr = 1.0 - (double(r0) * r0 + double(r1) * r1) / (double(nr) * nr);
        double g = (static_cast<double>(nl) * gl + static_cast<double>(nr) * gr) /
                   static_cast<double>(idx.size());
        if (g < best_gini - 1e-12) {
          best_gini = g;
          best_feature = static_cast<int>(f);
          best_threshold = v + kLo;
        }
      }
    }
    if (best_feature < 0) {
      nodes_[node_id].label = pos * 2 >= static_cast<long long>(idx.size()) ? 1 : 0;
      return node_id;
    }
    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      (x[i].values[best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    if (left_idx.empty() || right_idx.empty()) {
      nodes_[node_id].label = pos * 2 >= static_cast<long long>(idx.size()) ? 1 : 0;
      return node_id;
    }
    nodes_[node_id].feature = best_feature;
    nodes_[node_id].threshold = best_threshold;
    int left = build(x, y, left_idx);
    int right = build(x, y, right_idx);
    nodes_[node_id].left = left;
    nodes_[node_id].right = right;
    return node_id;
  }

  std::vector<TreeNode> nodes_;
};

// ---------------------------------------------------------------------------
// MLP: one hidden layer of 100 ReLU units, logistic output, Adam.
// ---------------------------------------------------------------------------

class Mlp {
 public:
  static constexpr int kHidden = 100;
  static constexpr int kEpochs = 200;
  static constexpr int kBatch = 32;
  static constexpr float kLearningRate = 1e-3f;

  void fit(const std::vector<Tape>& x, const std::vector<int>& y, std::uint64_t seed) {
    const std::size_t n = x.size();
    dim_ = x[0].values.size();
    standardise(x);
    std::vector<float> features(n * dim_);
    for (std::size_t i = 0; i < n; ++i) normalise(x[i], &features[i * dim_]);

    Rng rng(seed);
    w1_.resize(dim_ * kHidden);
    b1_.assign(kHidden, 0.0f);
    w2_.resize(kHidden);
    b2_ = 0.0f;
    const float scale1 = std::sqrt(2.0f / static_cast<float>(dim_));
    for (float& w : w1_) w = scale1 * gaussian(rng);
    const float scale2 = std::sqrt(2.0f / kHidden);
    for (float& w : w2_) w = scale2 * gaussian(rng);

    AdamState a_w1(w1_.size()), a_b1(kHidden), a_w2(kHidden), a_b2(1);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<float> hidden(kHidden), grad_hidden(kHidden);
    std::vector<float> g_w1(w1_.size()), g_b1(kHidden), g_w2(kHidden);
    long long step = 0;
    for (int epoch = 0; epoch < kEpochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t batch_start = 0; batch_start < n; batch_start += kBatch) {
        std::size_t batch_end = std::min(batch_start + kBatch, n);
        std::fill(g_w1.begin(), g_w1.end(), 0.0f);
        std::fill(g_b1.begin(), g_b1.end(), 0.0f);
        std::fill(g_w2.begin(), g_w2.end(), 0.0f);
        float g_b2 = 0.0f;
        for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
          const float* in = &features[order[bi] * dim_];
          float out = forward(in, hidden.data());
          float err = out - static_cast<float>(y[order[bi]]);  // dBCE/dlogit
          for (int h = 0; h < kHidden; ++h) {
            grad_hidden[h] = hidden[h] > 0.0f ? err * w2_[h] : 0.0f;
            g_w2[h] += err * hidden[h];
          }
          g_b2 += err;
          for (int h = 0; h < kHidden; ++h) {
            if (grad_hidden[h] == 0.0f) continue;
            float g = grad_hidden[h];
            float* row = &g_w1[static_cast<std::size_t>(h) * dim_];
            for (std::size_t j = 0; j < dim_; ++j) row[j] += g * in[j];
            g_b1[h] += g;
          }
        }
        float inv = 1.0f / static_cast<float>(batch_end - batch_start);
        ++step;
        a_w1.update(w1_, g_w1, inv, step);
        a_b1.update(b1_, g_b1, inv, step);
        a_w2.update(w2_, g_w2, inv, step);
        std::vector<float> b2v{b2_}, gb2v{g_b2};
        a_b2.update(b2v, gb2v, inv, step);
        b2_ = b2v[0];
      }
    }
  }

  int predict(const Tape& t) const {
    std::vector<float> in(dim_), hidden(kHidden);
    normalise(t, in.data());
    return forward(in.data(), hidden.data()) >= 0.5f ? 1 : 0;
  }

 private:
  struct AdamState {
    explicit AdamState(std::size_t n) : m(n, 0.0f), v(n, 0.0f) {}
    std::vector<float> m, v;
    void update(std::vector<float>& w, const std::vector<float>& g, float inv_batch,
                long long step) {
      const float beta1 = 0.9f, beta2 = 0.999f, eps = 1e-8f;
      const float c1 = 1.0f - std::pow(beta1, static_cast<float>(step));
      const float c2 = 1.0f - std::pow(beta2, static_cast<float>(step));
      for (std::size_t i = 0; i < w.size(); ++i) {
        float grad = g[i] * inv_batch;
        m[i] = beta1 * m[i] + (1.0f - beta1) * grad;
        v[i] = beta2 * v[i] + (1.0f - beta2) * grad * grad;
        w[i] -= kLearningRate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
      }
    }
  };

  static float gaussian(Rng& rng) {
    // Box-Muller on the portable generator.
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    if (u1 < 1e-12) u1 = 1e-12;
    return static_cast<float>(std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2));
  }

  void standardise(const std::vector<Tape>& x) {
    mean_.assign(dim_, 0.0f);
    inv_std_.assign(dim_, 1.0f);
    for (const Tape& t : x) {
      for (std::size_t j = 0; j < dim_; ++j) mean_[j] += static_cast<float>(t.values[j]);
    }
    for (std::size_t j = 0; j < dim_; ++j) mean_[j] /= static_cast<float>(x.size());
    std::vector<float> var(dim_, 0.0f);
    for (const Tape& t : x) {
      for (std::size_t j = 0; j < dim_; ++j) {
        float d = static_cast<float>(t.values[j]) - mean_[j];
        var[j] += d * d;
      }
    }
    for (std::size_t j = 0; j < dim_; ++j) {
      float s = std::sqrt(var[j] / static_cast<float>(x.size()));
      inv_std_[j] = s > 1e-6f ? 1.0f / s : 1.0f;
    }
  }

  void normalise(const Tape& t, float* out) const {
    for (std::size_t j = 0; j < dim_; ++j) {
      out[j] = (static_cast<float>(t.values[j]) - mean_[j]) * inv_std_[j];
    }
  }

  float forward(const float* in, float* hidden) const {
    float z = b2_;
    for (int h = 0; h < kHidden; ++h) {
      const float* row = &w1_[static_cast<std::size_t>(h) * dim_];
      float acc = b1_[h];
      for (std::size_t j = 0; j < dim_; ++j) acc += row[j] * in[j];
      hidden[h] = acc > 0.0f ? acc : 0.0f;
      z += w2_[h] * hidden[h];
    }
    return 1.0f / (1.0f + std::exp(-z));
  }

  std::size_t dim_ = 0;
  std::vector<float> w1_, b1_, w2_;
  float b2_ = 0.0f;
  std::vector<float> mean_, inv_std_;
};

}  // namespace

Tape encode(const TaskInstance& instance, const Task& task, std::size_t width) {
  auto table = table_map(task);
  if (table.empty()) {
    throw EncodingError("task " + std::string(task.name()) + " has no baseline symbol table");
  }
  Tape tape;
  tape.values.assign(width, kPadValue);
  std::vector<std::string> tokens = task.tokenize(instance.input);
  if (tokens.size() > width) {
    throw EncodingError("tape width " + std::to_string(width) + " too small for instance " +
                        instance.id);
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = table.find(tokens[i]);
    if (it == table.end()) throw EncodingError("unknown symbol '" + tokens[i] + "'");
    tape.values[i] = it->second;
  }
  return tape;
}

std::vector<std::string> decode(const Tape& tape, const Task& task) {
  std::map<int, std::string> reverse;
  for (const auto& [tok, code] : task.symbol_table()) reverse[code] = tok;
  std::vector<std::string> out;
  for (int v : tape.values) {
    if (v == kPadValue) break;
    auto it = reverse.find(v);
    if (it == reverse.end()) throw EncodingError("unknown code " + std::to_string(v));
    out.push_back(it->second);
  }
  return out;
}

std::size_t suite_tape_width(const Suite& suite) {
  const Task& task = get_task(suite.task);
  std::size_t width = 0;
  auto scan = [&](const Dataset& ds) {
    for (const TaskInstance& inst : ds.instances) {
      width = std::max(width, task.tokenize(inst.input).size());
    }
  };
  scan(suite.train);
  for (const Dataset& ds : suite.tests) scan(ds);
  return width;
}

bool task_is_baselined(TaskId id) {
  switch (id) {
    case TaskId::parity:
    case TaskId::pattern_matching:
    case TaskId::reversal:
    case TaskId::stack:
    case TaskId::vm_verify:
      return true;
    default:
      return false;
  }
}

std::string_view learner_name(Learner learner) {
  switch (learner) {
    case Learner::knn: return "knn";
    case Learner::dtree: return "dtree";
    case Learner::mlp: return "mlp";
  }
  return "knn";
}

int knn_classify(const std::vector<Tape>& train, const std::vector<int>& labels, const Tape& query,
                 int k) {
  std::vector<std::pair<long long, std::size_t>> best;  // (squared distance, index)
  best.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    long long d = 0;
    const std::vector<int>& t = train[i].values;
    for (std::size_t j = 0; j < t.size(); ++j) {
      long long diff = t[j] - query.values[j];
      d += diff * diff;
    }
    best.emplace_back(d, i);
  }
  const int top = std::min<int>(k, static_cast<int>(best.size()));
  std::partial_sort(best.begin(), best.begin() + top, best.end());
  std::map<int, int> votes;
  for (int i = 0; i < top; ++i) votes[labels[best[i].second]]++;
  int max_votes = 0;
  for (const auto& [label, count] : votes) max_votes = std::max(max_votes, count);
  for (int i = 0; i < top; ++i) {
    if (votes[labels[best[i].second]] == max_votes) return labels[best[i].second];
  }
  return labels[best[0].second];
}

std::map<double, double> fit_eval(const Suite& suite, Learner learner, std::uint64_t seed) {
  if (!task_is_baselined(suite.task)) {
    throw ConfigError("task " + std::string(task_name(suite.task)) + " is not baselined");
  }
  const Task& task = get_task(suite.task);
  const std::size_t width = suite_tape_width(suite);

  std::vector<Tape> train_x = encode_all(suite.train.instances, task, width);
  std::vector<int> train_y = labels_of(suite.train.instances);
  {
    long long pos = std::accumulate(train_y.begin(), train_y.end(), 0ll);
    if (pos == 0 || pos == static_cast<long long>(train_y.size())) {
      throw FitError("degenerate single-class training data");
    }
  }

  DecisionTree tree;
  Mlp mlp;
  if (learner == Learner::dtree) tree.fit(train_x, train_y);
  if (learner == Learner::mlp) mlp.fit(train_x, train_y, seed);

  std::map<double, double> out;
  for (const Dataset& test : suite.tests) {
    int budget = std::min<int>(test.spec.eval_budget, static_cast<int>(test.instances.size()));
    long long correct = 0;
    for (int i = 0; i < budget; ++i) {
      Tape q = encode(test.instances[i], task, width);
      int pred = 0;
      switch (learner) {
        case Learner::knn: pred = knn_classify(train_x, train_y, q); break;
        case Learner::dtree: pred = tree.predict(q); break;
        case Learner::mlp: pred = mlp.predict(q); break;
      }
      if (pred == static_cast<int>(test.instances[i].gold)) ++correct;
    }
    out[test.spec.delta] = 100.0 * static_cast<double>(correct) / static_cast<double>(budget);
  }
  return out;
}

BestOfResult best_of(const Suite& suite, std::uint64_t seed) {
  BestOfResult result;
  double best_id = -1.0;
  for (Learner learner : {Learner::knn, Learner::dtree, Learner::mlp}) {
    std::map<double, double> acc = fit_eval(suite, learner, seed);
    result.all[learner] = acc;
    double id_acc = acc.count(0.0) ? acc.at(0.0) : acc.begin()->second;
    if (id_acc > best_id) {
      best_id = id_acc;
      result.learner = learner;
      result.accuracies = acc;
    }
  }
  return result;
}

}  // namespace icl
