"""Spectral partitioning of temporal networks."""

import json

from . import _core
from ._core import (
    NumericalError,
    TemporalNetwork,
    ValidationError,
    critical_a,
    eigenpairs,
    generate,
    generate_shifting,
    rmwec,
    seba,
    supra_laplacian,
)


def cluster(net, a=None, R=None, nonmultiplex=False):
    """Run the partitioning pipeline; returns the run record as a dict."""
    return json.loads(_core.cluster(net, a, R, nonmultiplex))


def transitions(net, packing, max_collection=4):
    """Split/merge/appearance events of a packing (dict or run record)."""
    return json.loads(_core.transitions(net, json.dumps(packing), max_collection))


def packing_ratios(net, packing, a, normalised=False):
    return _core.packing_ratios(net, json.dumps(packing), a, normalised)


__all__ = [
    "NumericalError",
    "TemporalNetwork",
    "ValidationError",
    "cluster",
    "critical_a",
    "eigenpairs",
    "generate",
    "generate_shifting",
    "packing_ratios",
    "rmwec",
    "seba",
    "supra_laplacian",
    "transitions",
]
