"""Box products of configurations on cones of cartesian products.

A BoxContext pins the aligned vertex orders once; after that every product
map is index arithmetic (product index j*|V(G)| + i), never label lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .dynamics import Chips, RecurrentConfig, is_recurrent_burning, sandpile_group
from .errors import ContextMismatch
from .graphs import Multigraph, SinkedGraph, cartesian_product, cone


@dataclass(frozen=True)
class BoxContext:
    """Cones of g, h and g box h with aligned vertex orders."""

    g: Multigraph
    h: Multigraph
    n: int = 1

    @cached_property
    def product(self) -> Multigraph:
        return cartesian_product(self.g, self.h)

    @cached_property
    def cone_g(self) -> SinkedGraph:
        return cone(self.g, self.n)

    @cached_property
    def cone_h(self) -> SinkedGraph:
        return cone(self.h, self.n)

    @cached_property
    def cone_product(self) -> SinkedGraph:
        return cone(self.product, self.n)

    def index(self, i: int, j: int) -> int:
        return j * self.g.n + i

    def box(self, a: Sequence[int], b: Sequence[int]) -> Chips:
        if len(a) != self.g.n or len(b) != self.h.n:
            raise ContextMismatch(
                f"expected lengths {self.g.n} and {self.h.n}, got {len(a)} and {len(b)}"
            )
        return tuple(a[i] + b[j] for j in range(self.h.n) for i in range(self.g.n))


def box_config(ctx: BoxContext, a: Sequence[int], b: Sequence[int]) -> Chips:
    """(a box b) at (u, v) is a_u + b_v; stable when both are stable, recurrent
    when both are recurrent."""
    return ctx.box(a, b)


def _as_values(c: RecurrentConfig | Sequence[int]) -> tuple[int, ...]:
    return c.values if isinstance(c, RecurrentConfig) else tuple(c)


def embed_factor(
    ctx: BoxContext, a: RecurrentConfig | Sequence[int], factor: str = "g"
) -> RecurrentConfig:
    """Injective group map from a factor cone into the product cone: box the
    configuration with the identity of the other factor's cone.

    For 1-cones the box of recurrents is recurrent outright; for n > 1 the
    box can be unstable, so the class representative is taken instead (see
    embed_factor_reduced).
    """
    values = _as_values(a)
    if factor == "g":
        if len(values) != ctx.g.n:
            raise ContextMismatch(f"expected length {ctx.g.n}, got {len(values)}")
        other_identity = sandpile_group(ctx.cone_h).identity.values
        vec = ctx.box(values, other_identity)
    elif factor == "h":
        if len(values) != ctx.h.n:
            raise ContextMismatch(f"expected length {ctx.h.n}, got {len(values)}")
        other_identity = sandpile_group(ctx.cone_g).identity.values
        vec = ctx.box(other_identity, values)
    else:
        raise ValueError("factor must be 'g' or 'h'")

    if ctx.n == 1:
        ok, order = is_recurrent_burning(ctx.cone_product, vec)
        if not ok:
            raise AssertionError("box of recurrents failed the burning test")
        return RecurrentConfig(ctx.cone_product, vec, "burning", order)
    return sandpile_group(ctx.cone_product).representative(vec)


def embed_factor_reduced(
    ctx: BoxContext, a: RecurrentConfig | Sequence[int], factor: str = "g"
) -> RecurrentConfig:
    """The n-cone variant: class representative of the (possibly unstable) box
    vector.  Agrees with embed_factor when n = 1.  Not canonical for n > 1:
    congruent inputs with different vectors may box to different vectors
    before reduction.
    """
    values = _as_values(a)
    if factor == "g":
        other_identity = sandpile_group(ctx.cone_h).identity.values
        vec = ctx.box(values, other_identity)
    elif factor == "h":
        other_identity = sandpile_group(ctx.cone_g).identity.values
        vec = ctx.box(other_identity, values)
    else:
        raise ValueError("factor must be 'g' or 'h'")
    return sandpile_group(ctx.cone_product).representative(vec)
