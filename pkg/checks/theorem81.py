from __future__ import annotations

from checks.utils import Suite
from spin import theorem81_residuals

theorem81_suite = Suite("theorem81")


@theorem81_suite.check("invariance")
def invariance(ctx):
    """g, d and G are Kosmann-constant; the natural variant reports its known deviations instead."""
    for name, X in ctx.vectors.items():
        report = theorem81_residuals(X, ctx.spin, ctx.variant)
        for label, residual in report.residuals.items():
            yield ctx.measure(f"{label}.{name}", residual)
