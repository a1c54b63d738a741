"""Runtime distributions of randomized search heuristics as stochastic-domination objects.

Exact distributions of gated geometric sums, Chernoff-type tail bounds, seeded
simulators of elitist heuristics and empirical domination tests.
"""
from .algorithms import (ALGOS, CensoredRunsError, RunConfig, RunRecord, SampleSet,
                         collect_samples, run, run_batch)
from .dist_core import (DiscreteDist, DomainError, GatedGeomSpec, ResourceError, Term,
                        TruncatedTailError, Verdict, dominates_exact, exact_dist, parse_spec,
                        spec_mean, spec_variance)
from .operators import MutationOp, parse_op

__version__ = "0.1.0"

__all__ = [
    "ALGOS", "CensoredRunsError", "DiscreteDist", "DomainError", "GatedGeomSpec", "MutationOp",
    "ResourceError", "RunConfig", "RunRecord", "SampleSet", "Term", "TruncatedTailError",
    "Verdict", "collect_samples", "dominates_exact", "exact_dist", "parse_op", "parse_spec",
    "run", "run_batch", "spec_mean", "spec_variance",
]
