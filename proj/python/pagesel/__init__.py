"""Page-selection instruction optimizer for paged program memory.

The heavy lifting lives in the C++ extension; this package re-exports its
operations: analyze, frg, partition, optimize, verify, generate,
corpus_program, merge_reports.
"""

from ._core import (
    Error,
    __version__,
    analyze,
    corpus_program,
    frg,
    generate,
    merge_reports,
    optimize,
    partition,
    verify,
)

__all__ = [
    "Error",
    "__version__",
    "analyze",
    "corpus_program",
    "frg",
    "generate",
    "merge_reports",
    "optimize",
    "partition",
    "verify",
]
