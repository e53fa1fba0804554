#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "icl/dataset.hpp"
#include "icl/task.hpp"

namespace icl {

inline constexpr int kPadValue = -100;
inline constexpr std::uint64_t kBaselineSeed = 13213;

// Fixed-width integer representation of a rendered instance; padding only at
// the tail. No state simulation is embedded.
struct Tape {
  std::vector<int> values;
};

Tape encode(const TaskInstance& instance, const Task& task, std::size_t width);
std::vector<std::string> decode(const Tape& tape, const Task& task);

// Widest tokenised instance across the whole suite (train plus every test
// split), so no instance is ever truncated.
std::size_t suite_tape_width(const Suite& suite);

// Path-based and arithmetic tasks are not baselined.
bool task_is_baselined(TaskId id);

enum class Learner { knn, dtree, mlp };
std::string_view learner_name(Learner learner);

// Majority vote over the k nearest training tapes (Euclidean); ties go to the
// nearest neighbour among the tied labels. fit_eval uses k = 5.
int knn_classify(const std::vector<Tape>& train, const std::vector<int>& labels, const Tape& query,
                 int k = 5);

// Trains on the suite's train split and scores each test split's eval budget.
// Returns delta -> percent accuracy.
std::map<double, double> fit_eval(const Suite& suite, Learner learner,
                                  std::uint64_t seed = kBaselineSeed);

struct BestOfResult {
  Learner learner = Learner::knn;
  std::map<double, double> accuracies;
  std::map<Learner, std::map<double, double>> all;
};

// Runs all three learners and keeps the best by in-distribution accuracy.
BestOfResult best_of(const Suite& suite, std::uint64_t seed = kBaselineSeed);

}  // namespace icl
