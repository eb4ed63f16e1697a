// Tagged text model files. The first line identifies the model family:
//   #amm L=<L> d=<d>      multi-hyperplane model (multiclass AMM, AMM-rank)
//   #central L=<L>        constant central ranking
//   #ag L=<L> d=<d>       per-demographic-group central rankings
//   #lr L=<L> d=<d>       one-vs-rest logistic models
//   #pw L=<L> d=<d>       pairwise logistic models
// followed by one line per stored weight (or ranking), space separated.
#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "labelrank/amm_model.hpp"
#include "labelrank/baselines.hpp"
#include "labelrank/core.hpp"

namespace labelrank {

void save_model(const CentralRankModel& model, std::ostream& out);
void save_model(const GroupedRankModel& model, std::ostream& out);
void save_model(const LinearOvrModel& model, std::ostream& out);
void save_model(const PairwiseModel& model, std::ostream& out);

using AnyModel = std::variant<AmmModel, CentralRankModel, GroupedRankModel,
                              LinearOvrModel, PairwiseModel>;

void save_any_model(const AnyModel& model, const std::string& path);
AnyModel load_any_model(const std::string& path);

Ranking predict_any(const AnyModel& model, const SparseVector& x);
int model_num_labels(const AnyModel& model);
// -1 when the model has no feature dimension (central ranking).
int model_dim(const AnyModel& model);

}  // namespace labelrank
