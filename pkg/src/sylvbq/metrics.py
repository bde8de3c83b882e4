"""Discrete error metrics: max-over-steps Frobenius error and relative error."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def frobenius(X) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(X)) ** 2)))


@dataclass
class ErrorReport:
    """``Er = max_n |U^n - u^n|_F`` and ``RelEr = max_n |U^n - u^n|_F / |u^n|_F``.

    The two maxima are taken independently and may sit at different steps.
    ``RelEr`` is ``None`` when every exact snapshot has zero norm.
    """

    Er: float
    RelEr: float | None
    per_step: list = field(default_factory=list)
    argmax: int | None = None
    rel_argmax: int | None = None
    runtime_ms: float | None = None
    solver_iters_total: int | None = None
    method: str | None = None

    @classmethod
    def from_steps(cls, steps, errors, exact_norms, **extra):
        steps = list(steps)
        errors = [float(e) for e in errors]
        if not steps:
            return cls(0.0, None, [], None, None, **extra)
        i = int(np.argmax(errors))
        rel = [(n, e / un) for n, e, un in zip(steps, errors, exact_norms) if un > 0]
        if rel:
            j = int(np.argmax([r for _, r in rel]))
            rel_er, rel_arg = float(rel[j][1]), rel[j][0]
        else:
            rel_er, rel_arg = None, None
        return cls(errors[i], rel_er, list(zip(steps, errors)), steps[i], rel_arg, **extra)


def error_metrics(trajectory, exact_sampler) -> ErrorReport:
    """Errors of ``trajectory`` (iterable of ``(n, t, U)``) against ``exact_sampler(t)``."""
    steps, errs, norms = [], [], []
    for n, t, U in trajectory:
        u = exact_sampler(t)
        steps.append(n)
        errs.append(frobenius(np.asarray(U) - u))
        norms.append(frobenius(u))
    return ErrorReport.from_steps(steps, errs, norms)
