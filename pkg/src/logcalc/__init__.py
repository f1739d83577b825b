"""Exact logarithmic calculus for subgraph-density inequalities over step graphons."""

from .calculus import (AuditReport, MarginReport, TreeWeight, blakley_roy_audit, cfs_audit, forcing_check,
                       mu_t_sample, sidorenko_margin, smoothness_additivity_check, smoothness_margin,
                       smoothness_monte_carlo, tree_weight)
from .density import (BlockTable, conditional_expectation, degree_function, edge_density, hom_density,
                      hom_density_elimination, restricted_density)
from .graphon import StepGraphon, tensor_power
from .graphs import (LabeledGraph, TreeSpec, as_tree_spec, build_cfs_graph, build_cycle, build_path,
                     build_reflection_tree, build_star, glue, labeled_edge, reflect, retract_check, unlabel,
                     validate_labeled_tree)
from .harness import SuiteConfig, SuiteReport, perturbation_scan, random_step_graphon, run_suite

__all__ = [
    "AuditReport", "BlockTable", "LabeledGraph", "MarginReport", "StepGraphon", "SuiteConfig", "SuiteReport",
    "TreeSpec", "TreeWeight", "as_tree_spec", "blakley_roy_audit", "build_cfs_graph", "build_cycle",
    "build_path", "build_reflection_tree", "build_star", "cfs_audit", "conditional_expectation",
    "degree_function", "edge_density", "forcing_check", "glue", "hom_density", "hom_density_elimination",
    "labeled_edge", "mu_t_sample", "perturbation_scan", "random_step_graphon", "reflect", "restricted_density",
    "retract_check", "run_suite", "sidorenko_margin", "smoothness_additivity_check", "smoothness_margin",
    "smoothness_monte_carlo", "tensor_power", "tree_weight", "unlabel", "validate_labeled_tree",
]
