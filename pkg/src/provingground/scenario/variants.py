"""Expansion of a parametric document into concrete instances.

Sampling is stratified per parameter: the range splits into `count`
equal strata, each instance draws one value from its stratum, and the
stratum order is shuffled independently per parameter. The whole
procedure is a pure function of (document, count, seed).
"""

from __future__ import annotations

from ..rng import derive_seed, generator
from .types import ScenarioDocument, ScenarioInstance


def expand_variants(doc: ScenarioDocument, count: int, seed: int) -> list[ScenarioInstance]:
    if count < 1:
        raise ValueError("count must be at least 1")
    columns = {}
    for decl in doc.parameters:
        rng = generator(seed, "variant", doc.document_id, decl.name)
        strata = rng.permutation(count)
        offsets = rng.uniform(0.0, 1.0, size=count)
        span = decl.high - decl.low
        columns[decl.name] = decl.low + (strata + offsets) / count * span

    instances = []
    for i in range(count):
        bindings = tuple((name, float(values[i])) for name, values in sorted(columns.items()))
        instances.append(
            ScenarioInstance(
                document_id=doc.document_id,
                bindings=bindings,
                seed=derive_seed(seed, doc.document_id, i),
            )
        )
    return instances


def default_instance(doc: ScenarioDocument, seed: int = 0) -> ScenarioInstance:
    """Instance with every parameter at its declared default."""
    bindings = tuple((p.name, p.default) for p in sorted(doc.parameters, key=lambda p: p.name))
    return ScenarioInstance(document_id=doc.document_id, bindings=bindings, seed=seed)
