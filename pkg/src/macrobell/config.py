"""Run configuration: flat ``key = value`` sections with one documented schema."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(",", " ").split())


@dataclass(frozen=True)
class Key:
    section: str
    name: str
    default: str
    unit: str
    help: str
    kind: str = "float"  # float | int | str | floats | matched

    @property
    def dotted(self) -> str:
        return f"{self.section}.{self.name}"


SCHEMA = [
    Key("state", "kind", "singlet", "-", "singlet, psi_plus, phi_minus or phi_plus", "str"),
    Key("state", "gamma", "0.33", "-", "parametric gain per mode pair"),
    Key("state", "n_pairs", "250000", "pairs", "independent frequency-wavevector mode pairs", "int"),
    Key("detection", "eta", "0.57", "-", "detection efficiency, one value or AH,AV,BH,BV", "floats"),
    Key("detection", "electronic_noise_electrons", "300", "electrons/pulse", "rms electronic noise per detector"),
    Key("detection", "detector_gain", "1.0", "units/photon", "readout units per detected photon"),
    Key("experiment", "pulses", "20000", "pulses", "pulses per Stokes basis", "int"),
    Key("experiment", "pump_jitter", "0.0", "-", "relative rms of the per-pulse gain"),
    Key("experiment", "seed", "0", "-", "64-bit seed for every random stream", "int"),
    Key("aperture", "d1_mm", "matched", "mm", "aperture A1 diameter; 'matched' = d2 * lambda_a / lambda_b",
        "matched"),
    Key("aperture", "d2_mm", "8.9", "mm", "aperture A2 diameter (805 nm arm)"),
    Key("aperture", "lambda_a_nm", "635", "nm", "beam A wavelength"),
    Key("aperture", "lambda_b_nm", "805", "nm", "beam B wavelength"),
    Key("sweep", "kind", "efficiency", "-", "aperture, phase, pathlength or efficiency", "str"),
    Key("sweep", "points", "13", "-", "number of sweep points", "int"),
    Key("sweep", "d1_min_mm", "3.0", "mm", "aperture sweep start"),
    Key("sweep", "d1_max_mm", "12.0", "mm", "aperture sweep stop"),
    Key("sweep", "eta_min", "0.0", "-", "efficiency sweep start"),
    Key("sweep", "eta_max", "0.95", "-", "efficiency sweep stop"),
    Key("sweep", "path_max_mm", "3.0", "mm", "largest interferometer path offset"),
    Key("scan", "gamma", "0.2", "-", "gain used for the interferometer phase scan"),
    Key("scan", "coherence_time_ps", "5.0", "ps", "pump coherence time"),
    Key("entanglement", "mean_photons", "10000", "photons", "mean photons per beam N = 2 M sinh^2(gain)"),
    Key("entanglement", "gamma", "0.05", "-", "gain for the width-ratio simulation"),
    Key("entanglement", "eta", "0.57", "-", "efficiency of the measured beam B"),
    Key("entanglement", "herald_eta", "1.0", "-", "efficiency of the heralding beam A"),
    Key("entanglement", "pulses", "100000", "pulses", "pulses for the width-ratio simulation", "int"),
    Key("entanglement", "window", "5", "photons", "half-width of the post-selection window", "int"),
    Key("calibration", "levels", "1e4, 3e4, 1e5, 3e5, 1e6", "photons/pulse", "laser levels", "floats"),
    Key("plate", "thickness_um", "170", "um", "quartz plate thickness"),
    Key("plate", "material", "ghosh1999", "-", "Sellmeier coefficient set", "str"),
    Key("oracle", "gammas", "0.05, 0.1, 0.2, 0.3, 0.5", "-", "gains checked against the Fock oracle", "floats"),
    Key("oracle", "rotations", "5", "-", "random rotations per gain", "int"),
]

_BY_NAME = {k.dotted: k for k in SCHEMA}


def _convert(key: Key, text: str):
    try:
        if key.kind == "float":
            return float(text)
        if key.kind == "int":
            return int(float(text)) if "e" in text.lower() else int(text)
        if key.kind == "matched":
            return None if text.strip() == "matched" else float(text)
        if key.kind == "floats":
            values = _floats(text)
            if not values:
                raise ValueError("empty list")
            return values
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"[{key.section}] {key.name} = {text!r}: {exc}") from None


class Config:
    """Resolved configuration; every schema key has a value."""

    def __init__(self, raw: dict[str, str]):
        self.raw = dict(raw)
        self.values = {name: _convert(_BY_NAME[name], text) for name, text in self.raw.items()}

    def __getitem__(self, dotted: str):
        return self.values[dotted]

    def with_overrides(self, **dotted) -> "Config":
        raw = dict(self.raw)
        for name, value in dotted.items():
            if name not in _BY_NAME:
                raise ConfigError(f"unknown key {name}")
            raw[name] = str(value)
        return Config(raw)

    def to_ini(self) -> str:
        parser = configparser.ConfigParser(interpolation=None)
        for key in SCHEMA:
            if not parser.has_section(key.section):
                parser.add_section(key.section)
            parser.set(key.section, key.name, self.raw[key.dotted])
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def items(self):
        return [(k.dotted, self.raw[k.dotted]) for k in SCHEMA]


def defaults() -> Config:
    return Config({k.dotted: k.default for k in SCHEMA})


def parse_config(text: str, source: str = "<config>") -> Config:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    raw = {k.dotted: k.default for k in SCHEMA}
    for section in parser.sections():
        for name, value in parser.items(section):
            dotted = f"{section}.{name}"
            if dotted not in _BY_NAME:
                raise ConfigError(f"{source}: unknown key [{section}] {name}")
            raw[dotted] = value
    config = Config(raw)
    validate(config)
    return config


def load_config(path: str | Path | None) -> Config:
    if path is None:
        return defaults()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, str(path))


def validate(config: Config) -> None:
    def check(name, ok, why):
        if not ok:
            key = _BY_NAME[name]
            raise ConfigError(f"[{key.section}] {key.name} = {config.raw[name]!r}: {why}")

    check("state.kind", config["state.kind"] in ("singlet", "psi_minus", "psi_plus", "phi_minus", "phi_plus"),
          "unknown state")
    check("state.gamma", config["state.gamma"] >= 0, "must be >= 0")
    check("state.n_pairs", config["state.n_pairs"] >= 1, "must be >= 1")
    eta = config["detection.eta"]
    check("detection.eta", len(eta) in (1, 4) and all(0 <= e <= 1 for e in eta), "one or four values in [0, 1]")
    check("experiment.pulses", config["experiment.pulses"] >= 2, "must be >= 2")
    check("experiment.seed", 0 <= config["experiment.seed"] < 2**64, "must fit in 64 bits")
    check("sweep.kind", config["sweep.kind"] in ("aperture", "phase", "pathlength", "efficiency"),
          "unknown sweep kind")
    check("sweep.points", config["sweep.points"] >= 2, "must be >= 2")
    check("entanglement.eta", 0 <= config["entanglement.eta"] < 1, "must lie in [0, 1)")
    check("entanglement.herald_eta", 0 < config["entanglement.herald_eta"] <= 1, "must lie in (0, 1]")
    d1 = config["aperture.d1_mm"]
    check("aperture.d1_mm", d1 is None or d1 > 0, "must be positive or 'matched'")
    check("plate.thickness_um", config["plate.thickness_um"] >= 0, "must be >= 0")


def schema_help() -> str:
    lines = ["configuration keys (section.key = default [unit]):"]
    for k in SCHEMA:
        lines.append(f"  {k.dotted:38s} = {k.default:26s} [{k.unit}]  {k.help}")
    return "\n".join(lines)
