"""Numerical tolerance profile used across the dense kernels.

Defaults target double-precision dense algebra at matrix sizes up to about
20. Every solver accepts an explicit profile; the service and CLI build one
from the ``SUBOPTLQR_TOLERANCES`` environment variable so batch runs can
loosen or tighten checks without code changes, e.g.::

    SUBOPTLQR_TOLERANCES="care_tol=1e-6,lyap_tol=1e-8"
"""

from __future__ import annotations

import dataclasses
import os

from .errors import ConfigInvalid

ENV_VAR = "SUBOPTLQR_TOLERANCES"


@dataclasses.dataclass(frozen=True)
class Tolerances:
    sym_tol: float = 1e-10        # relative symmetry defect
    eig_tol: float = 1e-10        # relative eigendecomposition reconstruction
    lyap_tol: float = 1e-9        # Lyapunov residual, relative to operand norms
    care_tol: float = 1e-8        # Riccati residual, relative to max(1, ||P||^2)
    psd_tol: float = 1e-10        # PSD slack, relative to ||M||
    hurwitz_margin: float = 1e-9  # require max Re(eig) < -margin
    strict_tol: float = 1e-9      # strict matrix inequality margin, relative to term scale
    conn_tol: float = 1e-8        # connectivity threshold, relative to lambda_N
    pbh_tol: float = 1e-8         # rank tolerance in the stabilizability test, relative to ||A||

    @classmethod
    def from_env(cls, environ: dict | None = None) -> "Tolerances":
        """Build a profile from ``SUBOPTLQR_TOLERANCES`` overrides, if set."""
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        known = {f.name for f in dataclasses.fields(cls)}
        overrides: dict[str, float] = {}
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, value = item.partition("=")
            name = name.strip()
            if not sep or name not in known:
                raise ConfigInvalid(
                    f"unknown tolerance {name!r} in {ENV_VAR} "
                    f"(known: {', '.join(sorted(known))})"
                )
            try:
                overrides[name] = float(value)
            except ValueError:
                raise ConfigInvalid(
                    f"cannot parse tolerance {name}={value.strip()!r} in {ENV_VAR}"
                ) from None
        return cls(**overrides)


DEFAULT_TOLERANCES = Tolerances()
