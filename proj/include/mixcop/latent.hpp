#pragma once

#include <Eigen/Dense>

#include "mixcop/copula.hpp"
#include "mixcop/marginals.hpp"

namespace mixcop {

// Latent PIT matrix for a dataset: entries at continuity points are pinned to
// F_j(x_ij); entries at jump points live in [a_ij, b_ij).
struct LatentState {
  Eigen::MatrixXd u;                     // n x m
  std::vector<PartitionResult> parts;    // one per row
};

LatentState init_latent(const std::vector<MixedMarginal>& margs,
                        const Eigen::MatrixXd& X);

struct BlockProposal {
  Eigen::VectorXd u_new;       // over the proposed ordering of D
  double log_interval_prod;    // sum_k log(C(b|prefix) - C(a|prefix))
  bool degenerate = false;     // some truncation interval underflowed
};

// Sequential draw of U_D from the truncated conditional copula, conditioning
// each coordinate on the previously drawn ones and on b_C. `ordering` defaults
// to ascending discrete indices.
BlockProposal propose_block(const Copula& cop, const PartitionResult& part,
                            Rng& rng, const IndexList* ordering = nullptr);

// Acceptance ratio of the block proposal: the product over coordinates of the
// new-state truncation intervals over the old-state ones. u vectors are
// ordered like `ordering` (or ascending D).
double mh_accept_ratio(const Copula& cop, const PartitionResult& part,
                       const Eigen::VectorXd& u_new,
                       const Eigen::VectorXd& u_old,
                       const IndexList* ordering = nullptr);

// One MH block refresh of a row of the latent matrix; returns acceptance.
bool refresh_row_mh(const Copula& cop, const PartitionResult& part,
                    RowRef u_row, Rng& rng);

// Exact single-margin Gibbs draw of u_j given all other coordinates:
// w ~ Uniform(C(a_j|rest), C(b_j|rest)), u_j = C^{-1}(w|rest).
void gibbs_single_margin(const Copula& cop, const PartitionResult& part,
                         RowRef u_row, int j, Rng& rng);

void refresh_row_gibbs(const Copula& cop, const PartitionResult& part,
                       RowRef u_row, Rng& rng);

}  // namespace mixcop
