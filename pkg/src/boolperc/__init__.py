"""Simulation and numerical auditing of the Poisson Boolean model."""

from .bounds import (compute_constants, covered_ball_probability, coverage_lower_bound_12,
                     propagate_lemma37)
from .clusters import ClusterSummary, cluster_stats, origin_cluster
from .estimators import Estimate, estimate_event, fit_tail_exponent, merge
from .events import EventSpec, event_G, event_H, event_H_tilde
from .geometry import Ball, balls_intersect, build_sphere_net, pair_span, unit_ball_volume
from .model import ModelParams, Realization, Window, sample_realization, truncation_error_bound
from .radius_laws import Constant, Mixture, Pareto, Uniform, parse_law, tail_moment, tail_prob

__all__ = [
    "Ball", "ClusterSummary", "Constant", "Estimate", "EventSpec", "Mixture", "ModelParams",
    "Pareto", "Realization", "Uniform", "Window", "balls_intersect", "build_sphere_net",
    "cluster_stats", "compute_constants", "coverage_lower_bound_12", "covered_ball_probability",
    "estimate_event", "event_G", "event_H", "event_H_tilde", "fit_tail_exponent", "merge",
    "origin_cluster", "pair_span", "parse_law", "propagate_lemma37", "sample_realization",
    "tail_moment", "tail_prob", "truncation_error_bound", "unit_ball_volume",
]
