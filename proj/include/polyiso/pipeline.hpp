#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyiso/complex.hpp"
#include "polyiso/fold.hpp"
#include "polyiso/plmap.hpp"
#include "polyiso/types.hpp"

namespace polyiso {

struct SplitEmbedResult {
  PLMap map;                      // arclength-exact embedding on the split domain
  Correspondence correspondence;  // split domain -> original complex
  FoldPlan plan;                  // residual sawtooth recipe per edge
  PLMap perturbed;                // prefix-general-position map on the original domain
  double separation = 0.0;        // certified min image gap over far pairs of `perturbed`
  double delta = 0.0;             // intrinsic radius defining "far"
};

/// Splits a strictly short graph map into a 2-coordinate prefix in general
/// position (injective on every closed star) plus a residual sawtooth in the
/// remaining coordinates that restores each edge's arclength exactly.  The
/// sawtooth amplitude stays below min(eps_k, eps_{k+1})/2 on the k-th shell
/// around base_vertex and below a third of the measured separation of far
/// pairs, which keeps the output injective.
SplitEmbedResult split_embed_pipeline(const PLMap& map,
                                      const std::vector<double>& eps_schedule,
                                      const VertexId& base_vertex, std::uint64_t seed);

struct IterationRow {
  int iter = 0;
  double sup_delta = 0.0;  // max sampled |h_i - h_{i-1}| (row 1: against the input)
  double min_gap = 0.0;    // min image gap of h_i over all formed separated sets
  double defect = 0.0;     // isometry defect of h_i on its own vertex graph
  double alpha = 0.0;      // displacement budget that produced f_i (row 1: 0)
  double beta = 0.0;       // fold amplitude budget for h_i
  double mu = 0.0;         // separation of f_i over S_i (0 when S_i is empty)
  double lambda = 0.0;     // contraction factor applied after h_i (0 on the last row)
  std::vector<double> alpha_schedule;  // per-shell alpha actually honored
  std::vector<double> beta_schedule;   // per-shell beta actually honored
  std::vector<double> gap_by_set;      // min gap of h_i over S_1..S_i (0 for empty sets)
};

struct ConvergenceReport {
  std::vector<IterationRow> rows;
  std::vector<double> shell_accuracy;  // max |h_I - input| over sample nodes per shell
  std::vector<double> shell_budget;    // the eps schedule the run was asked to honor
  bool ledger_ok = true;
  std::vector<std::string> violations;
};

struct IterateResult {
  PLMap map;                      // h_I (the input itself when iterations == 0)
  Correspondence correspondence;  // h_I's domain -> original complex
  ConvergenceReport report;
};

/// Alternates arclength restoration (fold) with slight contraction and
/// re-embedding.  Budgets shrink geometrically: alpha_i, beta_i < eps_k / 4^i
/// per shell, further capped by mu_j / 4^i once the separated set S_j is
/// formed.  The report records every budget, sampled sup deltas, separation
/// gaps, and isometry defects; ledger_ok says all invariants held.
IterateResult iterate_nash(const PLMap& map, const std::vector<double>& eps_schedule,
                           const VertexId& base_vertex, int iterations,
                           std::uint64_t seed);

}  // namespace polyiso
