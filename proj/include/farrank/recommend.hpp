#pragma once

#include <string_view>

#include "farrank/knn.hpp"
#include "farrank/ranking.hpp"
#include "farrank/wrmf.hpp"

namespace farrank {

// Top-z recommendations for one user: every item without a positive
// training rating from that user is a candidate, ranked by predicted
// score with ties broken toward the smaller item index. Unknown users
// and users with no positive training ratings are rejected.
ScoredList recommend(const NeighborhoodModel& model, const RatingsDataset& train,
                     std::string_view user, int z);
ScoredList recommend(const FactorModel& model, const RatingsDataset& train,
                     std::string_view user, int z);

// Min-max rescale of one list's scores to [0, 1]; a constant list maps
// to all ones.
ScoredList normalize_scores(const ScoredList& list);

ScoredList truncate_list(const ScoredList& list, int z);

}  // namespace farrank
