"""Physical parameters, unit handling, and validated construction of inputs.

Internal unit convention: every rate and frequency is stored as an SI
angular frequency (rad/s).  The config layer accepts entries as objects
``{"value": ..., "unit": "Hz"|"rad_s"|"omega_b", "two_pi": bool}`` so that
quantities quoted as "2 pi x 10 GHz" can be written down literally.

Note on the spin count: for rho = 4.22e27 m^-3 and r = 125 um the formula
S = (5/2) rho V evaluates to ~8.6e16, not the commonly quoted 7.07e14.
This package always returns the formula value; see README for details.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed constants (CODATA). Overridable only through the config file."""

    hbar: float = 1.054571817e-34  # J*s
    c_vac: float = 2.99792458e8    # m/s

    def __post_init__(self):
        if self.hbar <= 0 or self.c_vac <= 0:
            raise ConfigError("physical constants must be positive")


@dataclass(frozen=True)
class SphereSpec:
    """YIG sphere geometry and material data.

    rho      spin density (m^-3)
    radius   sphere radius (m)
    gamma_g  gyromagnetic ratio (rad/s per tesla)
    """

    rho: float
    radius: float
    gamma_g: float

    def __post_init__(self):
        if self.rho < 0:
            raise ConfigError("sphere.rho must be >= 0")
        if self.radius <= 0:
            raise ConfigError("sphere.radius must be > 0")
        if self.gamma_g <= 0:
            raise ConfigError("sphere.gamma_g must be > 0")

    def volume(self) -> float:
        return (4.0 / 3.0) * math.pi * self.radius**3

    def spin_count(self) -> float:
        """Total spin number N = rho * V."""
        return self.rho * self.volume()

    def total_spin(self) -> float:
        """Collective spin S = (5/2) N for Fe3+ (spin 5/2)."""
        return 2.5 * self.spin_count()


def derive_spin_count(sphere: SphereSpec) -> tuple[float, float]:
    """Return (N, S) for the sphere. S is always the formula value (5/2) rho V."""
    n = sphere.spin_count()
    return n, 2.5 * n


@dataclass(frozen=True)
class DriveSpec:
    """Magnon drive, given either as a field amplitude or as an input power.

    Exactly one of the two quantities is active, selected by ``mode``.
    """

    mode: str                    # "field-amplitude" | "power"
    H_d: float | None = None     # tesla
    power: float | None = None   # watt

    def __post_init__(self):
        if self.mode == "field-amplitude":
            if self.H_d is None or self.power is not None:
                raise ConfigError("field-amplitude drive requires H_d and no power")
            if self.H_d < 0:
                raise ConfigError("drive.H_d must be >= 0")
        elif self.mode == "power":
            if self.power is None or self.H_d is not None:
                raise ConfigError("power drive requires power and no H_d")
            if self.power < 0:
                raise ConfigError("drive.power must be >= 0")
        else:
            raise ConfigError(f"unknown drive mode {self.mode!r}")

    @classmethod
    def from_field(cls, H_d: float) -> "DriveSpec":
        return cls(mode="field-amplitude", H_d=H_d)

    @classmethod
    def from_power(cls, power: float) -> "DriveSpec":
        return cls(mode="power", power=power)


def rabi_from_field(sphere: SphereSpec, H_d: float) -> float:
    """Drive Rabi rate eps_m = (sqrt(5 N) / 4) * gamma_g * H_d  (rad/s)."""
    if H_d < 0:
        raise ConfigError("H_d must be >= 0")
    n = sphere.spin_count()
    return 0.25 * math.sqrt(5.0 * n) * sphere.gamma_g * H_d


def rabi_from_power(power: float, kappa_m: float, omega_d: float,
                    hbar: float = PhysicalConstants.hbar) -> float:
    """Map input power to the drive rate via the standard input-output relation.

    eps_m = sqrt(2 kappa_m P / (hbar omega_d)).  This is a documented
    convention: use field-amplitude mode to bypass it entirely.
    """
    if power < 0:
        raise ConfigError("power must be >= 0")
    return math.sqrt(2.0 * kappa_m * power / (hbar * omega_d))


def inverse_power(epsilon_m: float, kappa_m: float, omega_d: float,
                  hbar: float = PhysicalConstants.hbar) -> float:
    """Inverse of rabi_from_power: the power producing a given drive rate."""
    return hbar * omega_d * epsilon_m**2 / (2.0 * kappa_m)


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set of the cavity-magnon-phonon system (rad/s internally)."""

    omega_c: float      # cavity resonance
    omega_m: float      # magnon resonance
    omega_b: float      # phonon resonance
    kappa_c: float      # cavity decay
    kappa_m: float      # magnon decay
    gamma_b: float      # phonon decay
    Gamma: float        # magnon-photon coupling
    g_mb: float         # single-magnon magnomechanical coupling
    omega_d: float      # drive frequency
    drive: DriveSpec
    sphere: SphereSpec
    medium_length: float                      # l (m); no default on purpose
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    detuning_convention: str = "effective"    # "effective" | "bare"
    assume_sideband_resolved: bool = True

    def __post_init__(self):
        positive = {
            "omega_c": self.omega_c, "omega_m": self.omega_m,
            "omega_b": self.omega_b, "kappa_c": self.kappa_c,
            "kappa_m": self.kappa_m, "gamma_b": self.gamma_b,
            "omega_d": self.omega_d, "medium_length": self.medium_length,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ConfigError(f"{name} must be > 0 (got {value!r})")
        if self.Gamma < 0 or self.g_mb < 0:
            raise ConfigError("couplings Gamma and g_mb must be >= 0")
        if self.detuning_convention not in ("effective", "bare"):
            raise ConfigError(
                f"detuning_convention must be 'effective' or 'bare', "
                f"got {self.detuning_convention!r}")
        if self.assume_sideband_resolved:
            if not (self.omega_b > self.kappa_m and self.omega_b > self.kappa_c):
                raise ConfigError(
                    "sideband-resolved regime requires omega_b > kappa_m and "
                    "omega_b > kappa_c; set assume_sideband_resolved=false to "
                    "override")

    @property
    def delta_c(self) -> float:
        """Cavity detuning Delta_c = omega_c - omega_d."""
        return self.omega_c - self.omega_d

    @property
    def delta_m0(self) -> float:
        """Bare magnon detuning Delta_m^0 = omega_m - omega_d."""
        return self.omega_m - self.omega_d

    def epsilon_m(self) -> float:
        """Resolve the drive spec to the Rabi rate eps_m (rad/s)."""
        if self.drive.mode == "field-amplitude":
            return rabi_from_field(self.sphere, self.drive.H_d)
        return rabi_from_power(self.drive.power, self.kappa_m, self.omega_d,
                               self.constants.hbar)

    def with_(self, **changes) -> "SystemParams":
        """Copy with selected fields replaced (drive shortcuts: power, H_d)."""
        if "power" in changes:
            changes["drive"] = DriveSpec.from_power(changes.pop("power"))
        if "H_d" in changes:
            changes["drive"] = DriveSpec.from_field(changes.pop("H_d"))
        return replace(self, **changes)


# ---------------------------------------------------------------------------
# Config-file layer
# ---------------------------------------------------------------------------

_FREQ_UNITS = ("Hz", "rad_s", "omega_b")


def _resolve_freq(entry, path: str, omega_b: float | None = None) -> float:
    """Convert a frequency-like config entry to rad/s."""
    if not isinstance(entry, dict):
        raise ConfigError(
            f"{path}: expected an object {{value, unit, two_pi?}}, got {entry!r}")
    unknown = set(entry) - {"value", "unit", "two_pi"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        value = float(entry["value"])
        unit = entry["unit"]
    except KeyError as exc:
        raise ConfigError(f"{path}: missing required key {exc}") from None
    if unit not in _FREQ_UNITS:
        raise ConfigError(f"{path}: unit must be one of {_FREQ_UNITS}, got {unit!r}")
    two_pi = entry.get("two_pi", unit == "Hz")
    if not isinstance(two_pi, bool):
        raise ConfigError(f"{path}: two_pi must be a boolean")
    if unit == "rad_s" and two_pi:
        raise ConfigError(f"{path}: two_pi=true makes no sense with unit rad_s")
    if unit == "omega_b":
        if omega_b is None:
            raise ConfigError(f"{path}: unit omega_b not allowed for this entry")
        value *= omega_b
    if two_pi:
        value *= TWO_PI
    return value


def _require_keys(section: dict, path: str, required: set, optional: set = frozenset()):
    missing = required - set(section)
    if missing:
        raise ConfigError(f"{path}: missing required keys {sorted(missing)}")
    unknown = set(section) - required - optional
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")


def params_from_dict(doc: dict) -> SystemParams:
    """Build SystemParams from a parsed config document (strict schema)."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    _require_keys(doc, "config", {"sphere", "system", "drive", "medium_length"},
                  {"constants"})

    constants = PhysicalConstants()
    if "constants" in doc:
        sec = doc["constants"]
        _require_keys(sec, "constants", set(), {"hbar", "c_vac"})
        constants = PhysicalConstants(
            hbar=float(sec.get("hbar", constants.hbar)),
            c_vac=float(sec.get("c_vac", constants.c_vac)))

    sec = doc["sphere"]
    _require_keys(sec, "sphere", {"rho", "radius", "gamma_g"})
    sphere = SphereSpec(rho=float(sec["rho"]), radius=float(sec["radius"]),
                        gamma_g=_resolve_freq(sec["gamma_g"], "sphere.gamma_g"))

    sec = doc["system"]
    freq_keys = {"omega_c", "omega_m", "omega_b", "omega_d",
                 "kappa_c", "kappa_m", "gamma_b", "Gamma", "g_mb"}
    _require_keys(sec, "system", freq_keys,
                  {"detuning_convention", "assume_sideband_resolved"})
    omega_b = _resolve_freq(sec["omega_b"], "system.omega_b")
    rates = {k: _resolve_freq(sec[k], f"system.{k}", omega_b=omega_b)
             for k in freq_keys if k != "omega_b"}

    sec = doc["drive"]
    _require_keys(sec, "drive", {"mode"}, {"H_d", "power"})
    if sec["mode"] == "field-amplitude":
        drive = DriveSpec.from_field(float(sec.get("H_d", -1.0)))
    elif sec["mode"] == "power":
        drive = DriveSpec.from_power(float(sec.get("power", -1.0)))
    else:
        raise ConfigError(f"drive.mode: unknown mode {sec['mode']!r}")

    return SystemParams(
        omega_b=omega_b, **rates, drive=drive, sphere=sphere,
        medium_length=float(doc["medium_length"]), constants=constants,
        detuning_convention=doc["system"].get("detuning_convention", "effective"),
        assume_sideband_resolved=doc["system"].get("assume_sideband_resolved", True))


def load_config(path: str | Path) -> SystemParams:
    """Load and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    return params_from_dict(doc)
