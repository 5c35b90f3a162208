from __future__ import annotations

from checks.utils import Suite
from lie import commutator_defect

# test fields per pair; the commutator applies four derivatives to each
POOL_SIZE = 2

commutator_suite = Suite("commutator")


@commutator_suite.check("relation")
def relation(ctx):
    pool = ctx.tensor_pool[-POOL_SIZE:]
    tolerance = ctx.tolerances.identity * 10
    for a, b in ctx.scenario.pairs:
        report = commutator_defect(ctx.vectors[a], ctx.vectors[b], pool, ctx.frame_metric, ctx.connection)
        label = f"{a}+{b}"
        yield ctx.measure_many(f"operator.{label}", [defect.components for defect in report.operator_defects], tolerance)
        yield ctx.measure(f"s_identity.{label}", report.s_identity, tolerance)
