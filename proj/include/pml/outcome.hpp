#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pml/measure.hpp"

namespace pml {

enum class Verdict { Feasible, Infeasible, Undecided };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Infeasible: return "infeasible";
    default: return "undecided";
  }
}

struct RelationWitness {
  int i = 0;
  int j = 0;
  double residual = 0.0;
  std::string detail;
};

struct PsdWitness {
  std::string matrix;
  double min_eigenvalue = 0.0;
  std::vector<double> vector;
};

struct RankWitness {
  std::string what;
  Eigen::Index rank_a = 0;
  Eigen::Index rank_b = 0;
};

struct TextWitness {
  std::string message;
};

using Witness =
    std::variant<std::monostate, RelationWitness, PsdWitness, RankWitness, TextWitness>;

struct LmiTraceInfo {
  std::string status;
  double best_value = 0.0;
  std::vector<double> best_point;
  int starts = 0;
  int iterations = 0;
};

struct Trace {
  std::string branch;
  std::map<std::string, Eigen::Index> ranks;
  std::optional<XValue> t0;
  std::optional<XValue> u0;
  std::optional<XValue> delta;
  std::optional<XValue> t_prime;
  std::optional<XValue> u_prime;
  std::optional<LmiTraceInfo> lmi;
};

struct SolveOutcome {
  Verdict verdict = Verdict::Undecided;
  std::optional<AtomicMeasure2D> measure;
  Witness witness;
  Trace trace;
  std::string message;
};

}  // namespace pml
