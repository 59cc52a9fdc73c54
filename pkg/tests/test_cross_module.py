"""Classifier/verifier consistency: whole-space Existence verdicts must
be backed by a certifiable construction under the m-Laplacian."""

from fractions import Fraction as F

import pytest

from nonlocal_supersol.classifier import OperatorClassFlags, ProblemParams, classify_single
from nonlocal_supersol.operators import m_laplace
from nonlocal_supersol.profiles import PowerDecay, make_log_corrected, select_gamma_case_ii
from nonlocal_supersol.riesz import QuadratureConfig
from nonlocal_supersol.verifier import GridSpec, tune_amplitude

HM_UP = OperatorClassFlags.from_preset("hm+upper")

N, M, ALPHA = 4, 2.0, 1.0
SUBGRID = [(F(p), F(q, 2)) for p in (1, 2, 3, 4, 5) for q in (1, 3, 6, 9)]


def construction_for(p: float, q: float):
    """Pick the construction whose hypotheses cover the point, mirroring
    the certify front end."""
    a_thr = ALPHA * (M - 1.0) / (N - M)
    total = (N + ALPHA) * (M - 1.0) / (N - M)
    if p > a_thr and q > a_thr and p + q > total:
        return make_log_corrected(N, M, 0.05)
    return PowerDecay(0.05, select_gamma_case_ii(N, M, ALPHA, p, q))


def test_existence_verdicts_are_certifiable():
    cfg = QuadratureConfig(rel_tol=1e-5)
    grid = GridSpec(1e-3, 50.0, 40, "log")
    op = m_laplace(M)
    checked = 0
    for p, q in SUBGRID:
        verdict = classify_single(
            ProblemParams(N=N, m=F(2), alpha=F(1), p=p, q=q, domain="rn", flags=HM_UP)
        )
        if verdict.status != "Existence":
            continue
        profile = construction_for(float(p), float(q))
        amp, cert = tune_amplitude(
            op, profile, N, ALPHA, float(p), float(q), grid, cfg, "shrink"
        )
        assert cert.status == "Certified", (p, q, cert.status, cert.worst_r)
        checked += 1
    assert checked >= 12  # the sub-grid leans into the existence region
