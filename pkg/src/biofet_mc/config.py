"""System configuration: defaults, units at the file boundary, YAML ingestion.

Configuration files use laboratory units (um, nm, mm, cm^-3, cm^2/Vs,
eV^-1 cm^-3, relative permittivities), listed per key in ``PARAMS``.
Everything is converted to SI once, in :func:`SystemConfig.from_values`.

Example file::

    medium:
      c_ion: 100        # mol/m^3
    channel:
      d: 2              # mm
    constellation:
      M: 4
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .binding import ReceiverGeometry
from .constants import EPS_0
from .detection import Constellation, build_constellation
from .errors import ConfigError, ModelError
from .fet_output import FLICKER_MODELS, FetBias, LinkModel
from .transducer import MediumSpec, TransducerSpec
from .transport import ChannelSpec, LigandSpec


@dataclass(frozen=True)
class Param:
    default: Any
    unit: str
    to_si: float = 1.0
    check: str = "positive"  # positive | nonneg | any | int2 | choice
    help: str = ""


PARAMS: dict[str, Param] = {
    "channel.h_ch": Param(3.0, "um", 1e-6, help="channel cross-section height"),
    "channel.l_ch": Param(15.0, "um", 1e-6, help="channel cross-section width (also nanowire length)"),
    "channel.u": Param(10.0, "um/s", 1e-6, help="mean flow velocity"),
    "channel.d": Param(1.0, "mm", 1e-3, help="transmitter-receiver distance"),
    "ligand.D0": Param(2e-10, "m^2/s", help="intrinsic diffusion coefficient"),
    "ligand.k1": Param(2e-19, "m^3/s", help="binding rate"),
    "ligand.k_neg1": Param(20.0, "1/s", help="unbinding rate"),
    "ligand.N_e": Param(3.0, "-", check="nonneg", help="free electrons per ligand"),
    "geometry.r_R": Param(10.0, "nm", 1e-9, help="nanowire radius"),
    "geometry.rho_SR": Param(4e16, "m^-2", help="receptor surface density"),
    "geometry.l_SR": Param(2.0, "nm", 1e-9, help="receptor length"),
    "medium.c_ion": Param(30.0, "mol/m^3", help="ionic strength"),
    "medium.eps_r": Param(78.0, "-", help="relative permittivity of the medium"),
    "medium.T": Param(300.0, "K", help="temperature"),
    "transducer.eps_r_ox": Param(3.9, "-", help="relative permittivity of the oxide"),
    "transducer.eps_r_si": Param(11.68, "-", help="relative permittivity of the nanowire"),
    "transducer.t_ox": Param(2.0, "nm", 1e-9, help="oxide thickness"),
    "transducer.p": Param(1e18, "cm^-3", 1e6, help="hole density"),
    "bias.V_SD": Param(0.1, "V", check="nonneg", help="source-drain voltage"),
    "bias.V_SG": Param(0.4, "V", check="any", help="source-gate voltage"),
    "bias.V_TH": Param(0.0, "V", check="any", help="threshold voltage"),
    "bias.mu_p": Param(500.0, "cm^2/(V s)", 1e-4, help="hole mobility"),
    "bias.N_ot": Param(1e16, "eV^-1 cm^-3", 1e6, help="oxide trap density"),
    "bias.lambda_tun": Param(0.05, "nm", 1e-9, help="tunneling distance"),
    "bias.alpha_s": Param(1.9e14, "V s/C", help="Coulomb scattering coefficient"),
    "bias.f_L": Param(1e-7 / math.pi, "Hz", help="1/f low cutoff (1/T_obs, one year)"),
    "bias.f_H": Param(1e5, "Hz", help="upper integration limit of the noise PSD"),
    "bias.flicker_model": Param("standard", "-", check="choice", help="|".join(FLICKER_MODELS)),
    "transmitter.N_m": Param(5e5, "molecules", check="nonneg", help="release count for single-symbol metrics"),
    "constellation.M": Param(2, "-", check="int2", help="alphabet size"),
    "constellation.K": Param(1e6, "molecules", help="largest release count"),
    "constellation.s": Param(1.0, "-", help="constellation exponent"),
}

SECTIONS = sorted({k.split(".")[0] for k in PARAMS})


def _coerce(key: str, raw, line=None):
    spec = PARAMS[key]
    if spec.check == "choice":
        if raw not in FLICKER_MODELS:
            raise ConfigError(f"expected one of {FLICKER_MODELS}, got {raw!r}", key=key, line=line)
        return raw
    if isinstance(raw, bool):
        raise ConfigError(f"expected a number, got {raw!r}", key=key, line=line)
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {raw!r}", key=key, line=line) from None
    if not math.isfinite(value):
        raise ConfigError(f"value must be finite, got {raw!r}", key=key, line=line)
    if spec.check == "positive" and not value > 0:
        raise ConfigError(f"must be > 0, got {value!r}", key=key, line=line)
    if spec.check == "nonneg" and not value >= 0:
        raise ConfigError(f"must be >= 0, got {value!r}", key=key, line=line)
    if spec.check == "int2":
        if not value.is_integer() or value < 2:
            raise ConfigError(f"must be an integer >= 2, got {raw!r}", key=key, line=line)
        return int(value)
    return value


def default_values() -> dict[str, Any]:
    return {k: p.default for k, p in PARAMS.items()}


@dataclass(frozen=True)
class SystemConfig:
    values: Mapping[str, Any] = field(repr=False)
    channel: ChannelSpec
    ligand: LigandSpec
    geometry: ReceiverGeometry
    medium: MediumSpec
    transducer: TransducerSpec
    bias: FetBias
    N_m: float
    constellation: Constellation

    @classmethod
    def from_values(cls, overrides: Mapping[str, Any] | None = None, lines: Mapping[str, int] | None = None) -> "SystemConfig":
        """Build from config-unit values; missing keys take defaults."""
        lines = lines or {}
        values = default_values()
        for key, raw in (overrides or {}).items():
            if key not in PARAMS:
                raise ConfigError("unknown configuration key", key=key, line=lines.get(key))
            values[key] = _coerce(key, raw, lines.get(key))
        si = {k: (v * PARAMS[k].to_si if isinstance(v, float) else v) for k, v in values.items()}

        def build(section, fn):
            try:
                return fn()
            except ModelError as exc:
                key = next((k for k in PARAMS if k.startswith(section + ".") and k.split(".")[1] in str(exc)), section)
                raise ConfigError(str(exc), key=key, line=lines.get(key)) from exc

        channel = build("channel", lambda: ChannelSpec(si["channel.h_ch"], si["channel.l_ch"], si["channel.u"], si["channel.d"]))
        ligand = build("ligand", lambda: LigandSpec(si["ligand.D0"], si["ligand.k1"], si["ligand.k_neg1"], si["ligand.N_e"]))
        geometry = build("geometry", lambda: ReceiverGeometry(
            r_R=si["geometry.r_R"], l_R=si["channel.l_ch"], rho_SR=si["geometry.rho_SR"], l_SR=si["geometry.l_SR"]))
        medium = build("medium", lambda: MediumSpec(si["medium.c_ion"], si["medium.eps_r"] * EPS_0, si["medium.T"]))
        transducer = build("transducer", lambda: TransducerSpec(
            eps_OX=si["transducer.eps_r_ox"] * EPS_0, eps_Si=si["transducer.eps_r_si"] * EPS_0,
            t_OX=si["transducer.t_ox"], p=si["transducer.p"]))
        bias = build("bias", lambda: FetBias(
            V_SD=si["bias.V_SD"], V_SG=si["bias.V_SG"], V_TH=si["bias.V_TH"], mu_p=si["bias.mu_p"],
            N_ot=si["bias.N_ot"], lambda_tun=si["bias.lambda_tun"], alpha_s=si["bias.alpha_s"],
            f_L=si["bias.f_L"], f_H=si["bias.f_H"], flicker_model=si["bias.flicker_model"]))
        constellation = build("constellation", lambda: build_constellation(
            values["constellation.M"], values["constellation.K"], values["constellation.s"]))
        return cls(values=dict(values), channel=channel, ligand=ligand, geometry=geometry, medium=medium,
                   transducer=transducer, bias=bias, N_m=si["transmitter.N_m"], constellation=constellation)

    @property
    def link(self) -> LinkModel:
        return LinkModel(self.channel, self.ligand, self.geometry, self.medium, self.transducer, self.bias)

    def with_values(self, **updates) -> "SystemConfig":
        """Copy with dotted-key updates given as ``{'channel.d': 2.0}``-style kwargs."""
        return self.replace(updates)

    def replace(self, updates: Mapping[str, Any]) -> "SystemConfig":
        merged = dict(self.values)
        merged.update(updates)
        return SystemConfig.from_values(merged)

    def to_nested(self) -> dict[str, dict[str, Any]]:
        out: dict[str, dict[str, Any]] = {s: {} for s in SECTIONS}
        for key, value in self.values.items():
            section, name = key.split(".")
            out[section][name] = value
        return out

    def dump(self) -> str:
        """YAML text that reloads to an identical configuration."""
        lines = ["# resolved configuration; units per key in comments"]
        for section, entries in self.to_nested().items():
            lines.append(f"{section}:")
            for name, value in entries.items():
                key = f"{section}.{name}"
                text = yaml.safe_dump(value, default_flow_style=True).strip()
                if text.endswith("..."):
                    text = text[:-3].strip()
                lines.append(f"  {name}: {text}  # [{PARAMS[key].unit}] {PARAMS[key].help}")
        return "\n".join(lines) + "\n"


def _flatten(doc, lines_by_path) -> tuple[dict[str, Any], dict[str, int]]:
    if doc is None:
        return {}, {}
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping of sections", line=1)
    flat, lines = {}, {}
    for section, entries in doc.items():
        if not isinstance(entries, dict):
            key = str(section)
            raise ConfigError("section must be a mapping", key=key, line=lines_by_path.get(key))
        for name, value in entries.items():
            key = f"{section}.{name}"
            flat[key] = value
            if key in lines_by_path:
                lines[key] = lines_by_path[key]
    return flat, lines


def _key_lines(text: str) -> dict[str, int]:
    """1-based source line of each section and dotted key."""
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    out = {}
    if not isinstance(node, yaml.MappingNode):
        return out
    for sk, sv in node.value:
        out[str(sk.value)] = sk.start_mark.line + 1
        if isinstance(sv, yaml.MappingNode):
            for k, _ in sv.value:
                out[f"{sk.value}.{k.value}"] = k.start_mark.line + 1
    return out


def parse_config(text: str) -> SystemConfig:
    try:
        doc = yaml.safe_load(text)
        lines = _key_lines(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"cannot parse configuration: {getattr(exc, 'problem', exc)}",
                          line=mark.line + 1 if mark else None) from exc
    flat, key_lines = _flatten(doc, lines)
    return SystemConfig.from_values(flat, key_lines)


def load_config(path: str | Path | None = None) -> SystemConfig:
    """Load a YAML configuration merged over the built-in defaults."""
    if path is None:
        return SystemConfig.from_values()
    return parse_config(Path(path).read_text())
