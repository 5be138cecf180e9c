"""MiniCPS async/await translator."""

from ._cpsforge import (
    CpsError,
    check_coloring,
    check_monad_laws,
    compare,
    gen_source,
    monads,
    oracle,
    pretty,
    run,
    stats,
    transform,
)

__all__ = [
    "CpsError",
    "check_coloring",
    "check_monad_laws",
    "compare",
    "gen_source",
    "monads",
    "oracle",
    "pretty",
    "run",
    "stats",
    "transform",
]
