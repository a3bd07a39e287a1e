"""Built-in weight systems used by the command line and the tests."""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .model import BaseGraphSpec, WeightSystem, canonical_star, from_base_graph

# two degree-4 hub sites joined directly and through three 2-step paths
_FIGURE1_EDGES = ((1, 5), (1, 2), (1, 3), (1, 4), (2, 5), (3, 5), (4, 5))


def figure1_weight_system() -> WeightSystem:
    """Five-site unit-weight example with a gapped two-band limit."""
    return from_base_graph(BaseGraphSpec(r=5, edges=_FIGURE1_EDGES))


def regular_weight_system(d: int) -> WeightSystem:
    """Scalar unit weights of total degree d, matched colors minimized."""
    if d < 1:
        raise ParseError(f"regular preset needs degree >= 1, got {d}")
    q = d // 2
    return WeightSystem(r=1, d=d, star=canonical_star(q, d),
                        a0=np.zeros((1, 1)), weights=np.ones((d, 1, 1)))


def parse_preset(name: str) -> WeightSystem:
    """Resolve a preset name: 'figure1' or 'regular:<d>'."""
    if name == "figure1":
        return figure1_weight_system()
    if name.startswith("regular:"):
        try:
            d = int(name.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad regular preset {name!r}") from None
        return regular_weight_system(d)
    raise ParseError(f"unknown preset {name!r}")
