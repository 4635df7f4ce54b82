from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ConfigError

# -----------------------------
# Defaults (ENV overridable)
# -----------------------------
EPS_ALG_DEFAULT = 1e-10      # algebraic residuals (hermiticity, idempotence, commutators)
EPS_MEMBER_DEFAULT = 1e-9    # distance of a state from a subspace
MAX_DIM_DEFAULT = 16
DEFAULT_SEED = 20160419

# spectrum of a projector clusters at 0 and 1
EIGEN_SPLIT = 0.5


@dataclass(frozen=True)
class Tolerances:
    alg: float = EPS_ALG_DEFAULT
    member: float = EPS_MEMBER_DEFAULT
    max_dim: int = MAX_DIM_DEFAULT

    def __post_init__(self) -> None:
        if not (self.alg > 0 and self.member > 0):
            raise ConfigError(f"tolerances must be positive (alg={self.alg}, member={self.member})")
        if self.max_dim < 1:
            raise ConfigError(f"max_dim must be >= 1 (got {self.max_dim})")

    def with_overrides(self, alg: Optional[float] = None, member: Optional[float] = None) -> "Tolerances":
        return replace(
            self,
            alg=self.alg if alg is None else float(alg),
            member=self.member if member is None else float(member),
        )

    def as_dict(self) -> dict:
        return {"eps_alg": self.alg, "eps_member": self.member, "max_dim": self.max_dim}


DEFAULT_TOL = Tolerances()


def _env_number(name: str, default, cast):
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(f"{name}={raw!r} is not a valid {cast.__name__}") from None


def tolerances_from_env() -> Tolerances:
    return Tolerances(
        alg=_env_number("QSV_EPS_ALG", EPS_ALG_DEFAULT, float),
        member=_env_number("QSV_EPS_MEMBER", EPS_MEMBER_DEFAULT, float),
        max_dim=_env_number("QSV_MAX_DIM", MAX_DIM_DEFAULT, int),
    )


def resolve_seed(explicit: Optional[int] = None) -> int:
    """--seed wins, then QSV_SEED, then the fixed default."""
    if explicit is not None:
        return int(explicit)
    return _env_number("QSV_SEED", DEFAULT_SEED, int)
