"""Run configuration: flat INI-style files with strict validation.

Sections and keys are fixed; anything unknown is rejected.  Each modulator
takes its drive as exactly one of ``v_rf_volts`` (converted through the
half-wave voltage) or a direct index ``m``, and its bias as exactly one of
``v_dc_volts`` or a direct ``psi``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass

from .errors import ConfigError
from .link import LinkSpec
from .modulator import (
    ModulatorKind,
    ModulatorSpec,
    bias_phase_from_voltage,
    index_from_voltage,
    make_modulator,
)

_SECTION_KEYS = {
    "source": {"wavelength_nm", "power_dbm"},
    "alice": {"kind", "v_pi_volts", "v_rf_volts", "m", "v_dc_volts", "psi", "phi"},
    "bob": {"kind", "v_pi_volts", "v_rf_volts", "m", "v_dc_volts", "psi", "phi"},
    "link": {"rf_ghz", "link_phase_rad", "loss"},
    "sweep": {"variable", "start", "stop", "steps"},
    "montecarlo": {"protocol", "mu", "eta", "p_dark", "n_pulses", "seed"},
    "output": {"format", "path"},
}

# Matches the bench this model was written around: 15 GHz drive, a 1550 nm
# source at 5 dBm, and half-wave voltages of 5.5 V (UM) / 7.4 V (PM).
DEFAULT_CONFIG = """\
[source]
wavelength_nm = 1550
power_dbm = 5

[alice]
kind = UM
v_pi_volts = 5.5
m = 0.1
psi = 0.0
phi = 0.0

[bob]
kind = PM
v_pi_volts = 7.4
m = 0.05
psi = 0.0
phi = 0.0

[link]
rf_ghz = 15.0
link_phase_rad = 0.0
loss = 1.0

[sweep]
variable = delta_phi
start = 0.0
stop = 6.283185307179586
steps = 64

[montecarlo]
protocol = B92
mu = 0.1
eta = 1.0
p_dark = 0.0
n_pulses = 100000
seed = 7
"""


@dataclass(frozen=True)
class MonteCarloSettings:
    protocol: str
    mu: float
    eta: float
    p_dark: float
    n_pulses: int
    seed: int


@dataclass(frozen=True)
class RunConfig:
    wavelength_nm: float
    power_dbm: float
    alice: ModulatorSpec
    bob: ModulatorSpec
    link: LinkSpec
    rf_ghz: float
    sweep_start: float
    sweep_stop: float
    sweep_steps: int
    montecarlo: MonteCarloSettings | None
    out_format: str | None
    out_path: str | None


def _get_float(section, key, default=None) -> float:
    if key not in section:
        if default is None:
            raise ConfigError(f"missing key {key!r} in section [{section.name}]")
        return default
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key} = {section[key]!r}: not a number") from exc


def _get_int(section, key, default=None) -> int:
    value = _get_float(section, key, default)
    if value != int(value):
        raise ConfigError(f"[{section.name}] {key} must be an integer")
    return int(value)


def _parse_modulator(section) -> ModulatorSpec:
    if "kind" not in section:
        raise ConfigError(f"missing key 'kind' in section [{section.name}]")
    try:
        kind = ModulatorKind(section["kind"].strip().upper())
    except ValueError as exc:
        raise ConfigError(
            f"[{section.name}] kind = {section['kind']!r}: expected PM, AM or UM"
        ) from exc

    has_vrf, has_m = "v_rf_volts" in section, "m" in section
    if has_vrf == has_m:
        raise ConfigError(
            f"[{section.name}] needs exactly one of 'v_rf_volts' and 'm'"
        )
    has_vdc, has_psi = "v_dc_volts" in section, "psi" in section
    if has_vdc == has_psi:
        raise ConfigError(
            f"[{section.name}] needs exactly one of 'v_dc_volts' and 'psi'"
        )
    if (has_vrf or has_vdc) and "v_pi_volts" not in section:
        raise ConfigError(
            f"[{section.name}] voltage keys require 'v_pi_volts'"
        )

    v_pi = _get_float(section, "v_pi_volts", math.nan)
    m = index_from_voltage(_get_float(section, "v_rf_volts"), v_pi) if has_vrf \
        else _get_float(section, "m")
    psi = bias_phase_from_voltage(_get_float(section, "v_dc_volts"), v_pi) if has_vdc \
        else _get_float(section, "psi")
    phi = _get_float(section, "phi", 0.0)
    return make_modulator(kind, m, psi, phi)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    for name in parser.sections():
        if name not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in _SECTION_KEYS[name]:
                raise ConfigError(f"unknown key {key!r} in section [{name}]")
    for required in ("alice", "bob"):
        if required not in parser:
            raise ConfigError(f"missing section [{required}]")

    wavelength, power = 1550.0, 5.0
    if "source" in parser:
        wavelength = _get_float(parser["source"], "wavelength_nm", 1550.0)
        power = _get_float(parser["source"], "power_dbm", 5.0)

    alice = _parse_modulator(parser["alice"])
    bob = _parse_modulator(parser["bob"])

    if "link" in parser:
        link_section = parser["link"]
        rf_ghz = _get_float(link_section, "rf_ghz", 15.0)
        link_phase = _get_float(link_section, "link_phase_rad", 0.0)
        loss = _get_float(link_section, "loss", 1.0)
    else:
        rf_ghz, link_phase, loss = 15.0, 0.0, 1.0
    if rf_ghz <= 0:
        raise ConfigError(f"[link] rf_ghz must be > 0, got {rf_ghz}")
    if not (0.0 < loss <= 1.0):
        raise ConfigError(f"[link] loss must be in (0, 1], got {loss}")
    link = LinkSpec(rf_frequency=math.tau * rf_ghz * 1e9, link_phase=link_phase, loss=loss)

    sweep_start, sweep_stop, sweep_steps = 0.0, math.tau, 64
    if "sweep" in parser:
        sweep = parser["sweep"]
        variable = sweep.get("variable", "delta_phi").strip()
        if variable != "delta_phi":
            raise ConfigError(f"[sweep] unsupported variable {variable!r}")
        sweep_start = _get_float(sweep, "start", 0.0)
        sweep_stop = _get_float(sweep, "stop", math.tau)
        sweep_steps = _get_int(sweep, "steps", 64)
        if sweep_steps <= 0:
            raise ConfigError("[sweep] steps must be > 0")

    montecarlo = None
    if "montecarlo" in parser:
        mc = parser["montecarlo"]
        protocol = mc.get("protocol", "").strip().upper()
        if protocol not in ("B92", "BB84"):
            raise ConfigError(
                f"[montecarlo] protocol = {mc.get('protocol')!r}: expected B92 or BB84"
            )
        montecarlo = MonteCarloSettings(
            protocol=protocol,
            mu=_get_float(mc, "mu"),
            eta=_get_float(mc, "eta", 1.0),
            p_dark=_get_float(mc, "p_dark", 0.0),
            n_pulses=_get_int(mc, "n_pulses", 100_000),
            seed=_get_int(mc, "seed", 0),
        )

    out_format = out_path = None
    if "output" in parser:
        out = parser["output"]
        if "format" in out:
            out_format = out["format"].strip().lower()
            if out_format not in ("csv", "json"):
                raise ConfigError("[output] format must be csv or json")
        out_path = out.get("path")

    return RunConfig(
        wavelength_nm=wavelength,
        power_dbm=power,
        alice=alice,
        bob=bob,
        link=link,
        rf_ghz=rf_ghz,
        sweep_start=sweep_start,
        sweep_stop=sweep_stop,
        sweep_steps=sweep_steps,
        montecarlo=montecarlo,
        out_format=out_format,
        out_path=out_path,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def default_config() -> RunConfig:
    return parse_config(DEFAULT_CONFIG)
