"""Relative-error testing of s-term DNFs with membership and sampling oracles."""

from .boolfn import Dnf, FactoredDnf, Subcube, Term, parse_dnf, parse_point, reldist_exhaustive
from .budget import test_dnf_budget, tfd_query_bound
from .clustering import Clustering, k_clustering
from .errors import DnfrtError
from .oracles import make_mq, make_samp
from .params import DESK, THEORY, ParameterSet, parameter_schedule, runnable
from .pooling import find_factored_dnfs
from .tester import test_dnf, test_factored_dnf
from .verdict import Reject, Verdict

__version__ = "0.1.0"

__all__ = [
    "DESK",
    "THEORY",
    "Clustering",
    "Dnf",
    "DnfrtError",
    "FactoredDnf",
    "ParameterSet",
    "Reject",
    "Subcube",
    "Term",
    "Verdict",
    "find_factored_dnfs",
    "k_clustering",
    "make_mq",
    "make_samp",
    "parameter_schedule",
    "parse_dnf",
    "parse_point",
    "reldist_exhaustive",
    "runnable",
    "test_dnf",
    "test_dnf_budget",
    "test_factored_dnf",
    "tfd_query_bound",
]
