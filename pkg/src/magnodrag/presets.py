"""Figure-reproduction presets: parameter families behind each spectral panel.

Each preset expands to a family of SweepSpec objects sharing one axis grid.
Couplings are swept in omega_b units and drive powers in watts.  The drag
panels need a medium length and velocity range the source material never
states; the presets use l from the config, v in [-300, 300] m/s, and a probe
offset sigma = 0.004 omega_b for the drag-vs-velocity panels.  Those values
are illustrative (drag is exactly linear in v and l) and are recorded as
such in the run manifest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import SystemParams
from .sweep import DEFAULT_SIGMA_SAMPLES, SweepSpec

GAMMA_FAMILY = (0.0, 0.1, 0.2, 0.4)        # omega_b units
GAMMA_FAMILY_NONZERO = (0.1, 0.2, 0.4)
POWER_FAMILY = (0.0, 0.003, 0.006, 0.015)  # watts

DRAG_VELOCITY = 300.0          # m/s, drag-vs-sigma panels
DRAG_SIGMA_OFFSET = 0.004      # omega_b units, drag-vs-velocity panels
VELOCITY_RANGE = (-300.0, 300.0)
VELOCITY_SAMPLES = 401


@dataclass(frozen=True)
class FigurePreset:
    figure: str
    axis: str                   # "sigma" | "velocity"
    headline: str               # column the panel plots
    family_parameter: str       # "Gamma" | "power"
    family_values: tuple
    gamma: float | None         # fixed Gamma (omega_b units) for power families
    power: float | None         # fixed power (W) for Gamma families
    note: str = ""

    def labels(self) -> list[str]:
        if self.family_parameter == "Gamma":
            return [f"Gamma={v:g}" for v in self.family_values]
        return [f"P={v * 1e3:g}mW" for v in self.family_values]

    def specs(self, base: SystemParams) -> list[SweepSpec]:
        specs = []
        for value in self.family_values:
            overrides = {}
            if self.family_parameter == "Gamma":
                overrides["Gamma"] = value * base.omega_b
                overrides["power"] = self.power
            else:
                overrides["Gamma"] = self.gamma * base.omega_b
                overrides["power"] = value
            if self.axis == "sigma":
                specs.append(SweepSpec(
                    base=base, axis="sigma", samples=DEFAULT_SIGMA_SAMPLES,
                    overrides=overrides, velocity=DRAG_VELOCITY))
            else:
                specs.append(SweepSpec(
                    base=base, axis="velocity",
                    lo=VELOCITY_RANGE[0], hi=VELOCITY_RANGE[1],
                    samples=VELOCITY_SAMPLES, overrides=overrides,
                    sigma=DRAG_SIGMA_OFFSET))
        return specs


def _gamma_panel(figure, axis, headline, values=GAMMA_FAMILY):
    return FigurePreset(figure=figure, axis=axis, headline=headline,
                        family_parameter="Gamma", family_values=values,
                        gamma=None, power=0.0)


def _power_panel(figure, axis, headline, gamma):
    note = ""
    if axis == "velocity" or headline == "DragM":
        note = ("illustrative drag parameters: v and l are not pinned by the "
                "source; shapes, not magnitudes, are the reproducible content")
    return FigurePreset(figure=figure, axis=axis, headline=headline,
                        family_parameter="power", family_values=POWER_FAMILY,
                        gamma=gamma, power=None, note=note)


FIGURE_PRESETS: dict[str, FigurePreset] = {
    "2a": _gamma_panel("2a", "sigma", "ImNr"),
    "2b": _gamma_panel("2b", "sigma", "ReNr", GAMMA_FAMILY_NONZERO),
    "2c": _gamma_panel("2c", "sigma", "ImNg"),
    "2d": _gamma_panel("2d", "sigma", "ReNg"),
    "3a": _gamma_panel("3a", "sigma", "DragM"),
    "3b": _gamma_panel("3b", "velocity", "DragM"),
    "4a": _power_panel("4a", "sigma", "ImNr", 0.1),
    "4b": _power_panel("4b", "sigma", "ReNr", 0.1),
    "4c": _power_panel("4c", "sigma", "ImNg", 0.1),
    "4d": _power_panel("4d", "sigma", "ReNg", 0.1),
    "5a": _power_panel("5a", "sigma", "DragM", 0.1),
    "5b": _power_panel("5b", "velocity", "DragM", 0.1),
    "6a": _power_panel("6a", "sigma", "ImNr", 0.4),
    "6b": _power_panel("6b", "sigma", "ReNr", 0.4),
    "6c": _power_panel("6c", "sigma", "ImNg", 0.4),
    "6d": _power_panel("6d", "sigma", "ReNg", 0.4),
    "7a": _power_panel("7a", "sigma", "DragM", 0.4),
    "7b": _power_panel("7b", "velocity", "DragM", 0.4),
}
