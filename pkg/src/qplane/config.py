"""Size caps for the expensive computations, overridable via QPLANE_LIMITS.

The env var / --limits flag use comma-separated key=value pairs, e.g.

    QPLANE_LIMITS="dim4_max_q=13,mu_oracle_max_q=7"
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace, fields

ENV_VAR = "QPLANE_LIMITS"


@dataclass(frozen=True)
class RunLimits:
    max_q: int = 10_000          # field construction
    dft_max_q: int = 128         # dense character-sum tables (q^2 complex entries)
    dim4_max_q: int = 13         # four-coordinate tables (q^4 entries)
    g1_max_q: int = 13           # product-group enumeration / fast orbit energy
    mu_check_max_q: int = 5      # orbit-energy part of the product-set check
    mu_oracle_max_q: int = 5     # tuple-level orbit-energy oracle
    brute_max_size: int = 8      # |E| cap for tuple-enumeration oracles

    def with_overrides(self, text: str) -> "RunLimits":
        """Apply 'k=v,k=v' overrides; unknown keys are rejected."""
        if not text:
            return self
        known = {f.name for f in fields(self)}
        updates = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"unknown limit {key!r}")
            updates[key] = int(value)
        return replace(self, **updates)


def default_limits() -> RunLimits:
    """Built-in limits with QPLANE_LIMITS overrides applied."""
    return RunLimits().with_overrides(os.environ.get(ENV_VAR, ""))
