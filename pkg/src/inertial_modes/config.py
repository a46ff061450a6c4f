"""Run configuration shared by the command-line front end and the scripts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .polycore import Ellipsoid, RotationVector


class ConfigError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """'p/q', integers and finite decimals, all read exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational number: {text!r}") from exc


def parse_triple(text: str) -> tuple[Fraction, Fraction, Fraction]:
    parts = [p for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated values, got {text!r}")
    return tuple(parse_rational(p) for p in parts)


@dataclass
class RunConfig:
    """Geometry, rotation and numerical settings of one run.

    The ellipsoid is given either by semi-axes a_i or directly by the
    quadric coefficients A_i = a_i^-2 (``coefficients``), whichever is set.
    """

    axes: tuple[Fraction, Fraction, Fraction] | None = (Fraction(1), Fraction(1), Fraction(1))
    omega: tuple[Fraction, Fraction, Fraction] = (Fraction(0), Fraction(0), Fraction(1))
    n_max: int = 4
    precision_bits: int = 53
    coriolis_factor: int = 1
    directions: int = 1_000_000
    ugrid: int = 2001
    out: Path = Path("out")
    seed: int | None = None
    coefficients: tuple[Fraction, Fraction, Fraction] | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.out = Path(self.out)
        self.validate()

    def validate(self):
        if self.coefficients is None and self.axes is None:
            raise ConfigError("either semi-axes or coefficients must be given")
        vals = self.coefficients if self.coefficients is not None else self.axes
        if len(vals) != 3 or any(Fraction(v) <= 0 for v in vals):
            raise ConfigError("ellipsoid parameters must be three positive rationals")
        if len(self.omega) != 3 or all(Fraction(o) == 0 for o in self.omega):
            raise ConfigError("Omega must be a nonzero vector")
        if self.n_max < 1:
            raise ConfigError("n_max must be >= 1")
        if self.coriolis_factor not in (1, 2):
            raise ConfigError("coriolis factor must be 1 or 2")
        if self.precision_bits < 53:
            raise ConfigError("precision must be at least 53 bits")
        if self.directions < 1 or self.ugrid < 3:
            raise ConfigError("quadrature sizes are too small")

    def ellipsoid(self) -> Ellipsoid:
        if self.coefficients is not None:
            return Ellipsoid(*self.coefficients)
        return Ellipsoid.from_semi_axes(*self.axes)

    def rotation(self) -> RotationVector:
        return RotationVector(*self.omega)

    def is_axisymmetric(self) -> bool:
        """A1 = A2 and Omega along x3: the closed-form measure applies."""
        E = self.ellipsoid()
        return E.A1 == E.A2 and self.omega[0] == 0 and self.omega[1] == 0

    def to_json(self) -> dict:
        E = self.ellipsoid()
        return {
            "axes": None if self.axes is None else [str(a) for a in self.axes],
            "coefficients": [str(a) for a in E.coefficients],
            "omega": [str(o) for o in self.omega],
            "n_max": self.n_max,
            "precision_bits": self.precision_bits,
            "coriolis_factor": self.coriolis_factor,
            "directions": self.directions,
            "ugrid": self.ugrid,
            "seed": self.seed,
            **self.extra,
        }
