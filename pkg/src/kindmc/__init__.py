"""kindmc: a k-induction model checker for a bounded mini-C language.

Pipeline: parse/typecheck -> GOTO-program -> (optional) polyhedral
invariant inference and instrumentation -> per-k loop-free phase programs
-> SSA bit-vector VCs -> external SMT solver or exhaustive enumerator.
"""

from .driver import Outcome, VerifyOptions, verify, verify_bmc
from .frontend import SourceError, WidthConfig

__all__ = ["Outcome", "SourceError", "VerifyOptions", "WidthConfig",
           "verify", "verify_bmc"]
__version__ = "0.1.0"
