"""Actionable symmetric submodular clustering.

Clusters a ground set by minimizing the summed cost of the blocks under a
symmetric submodular function (graph cuts, Gaussian mutual information),
subject to one block holding at least a fraction ``t`` of some group.
"""

from .clustering import (ClusteringRun, SplitCandidate, actionable_gsa, actionable_gsa_multigroup,
                         evaluate_split, gsa, lemma1_chain, lemma1_check, optimal_two_clustering,
                         parallel_split)
from .constraints import (ActionabilityParams, FeasibilityCertificate, GroupCapFamily, Grouping,
                          Partition, family_member, is_feasible, localized_family, max_k,
                          partition_cost)
from .errors import (ActClustError, InfeasibleError, InputError, ParseError, RefusalError,
                     ValidationError)
from .instances import (CounterexampleSpec, Instance, load_instance, make_alternative_partition,
                        make_counterexample, random_instance, save_instance, save_report)
from .minimizers import (MinimizationResult, brute_force_best_partition, brute_force_min,
                         constrained_min, minimal_optimal_solutions, queyranne_min)
from .oracles import (CutOracle, GaussianMIOracle, GaussianModel, GroundSet, SubmodularOracle,
                      WeightedGraph, check_symmetric_submodular, contract, cut_value,
                      gaussian_mi_value)

__version__ = "0.1.0"
