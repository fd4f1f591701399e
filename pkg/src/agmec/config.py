"""Run configuration: documented keys, defaults, parsing and validation.

Config files are flat ``key = value`` text; ``#`` starts a comment and
blank lines are ignored.  Every key has a default (see ``describe_keys``),
so an empty file is a valid full configuration.  Unknown keys and
out-of-range values are rejected with the offending key named.

Per-UE keys are indexed, e.g. ``ue0_x`` or ``ue3_peak_bits``.  The default
layout places a low-rate cluster of UEs just west of the BS and a
high-rate cluster further east, with the heavy cluster's production
peaking together every 400 slots.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field, replace

from agmec.channel import ChannelParams
from agmec.env import ComputeParams, Geometry
from agmec.tasks import WAVEFORMS, TaskProfile

_UE_KEY_RE = re.compile(r"^ue(\d+)_(x|y|base_bits|peak_bits|period|phase|waveform|jitter)$")


@dataclass(frozen=True)
class UeSpec:
    x: float
    y: float
    profile: TaskProfile


@dataclass(frozen=True)
class SimConfig:
    # channel
    bandwidth_hz: float = 6e6
    noise_power_w: float = 1e-12
    tx_power_w: float = 1.0
    ref_pathloss_db: float = 39.0
    pathloss_exponent: float = 2.6
    los_a: float = 9.61
    los_b: float = 0.16
    # geometry
    num_ues: int = 5
    altitude_m: float = 100.0
    arena_x_m: float = 1000.0
    arena_y_m: float = 1000.0
    uav_step_m: float = 40.0
    bs_x: float = 500.0
    bs_y: float = 500.0
    uav_start_x: float = 500.0
    uav_start_y: float = 500.0
    # compute
    f_ue: float = 8e8
    f_uav: float = 1.6e9
    f_bs: float = 1.8e9
    kappa_ue: float = 1e-28
    kappa_uav: float = 1e-27
    kappa_bs: float = 1e-28
    cycles_per_bit: float = 1e3
    tau_s: float = 2.0
    packet_bits: int = 1000
    # learning
    agent: str = "kernel"
    timeslots: int = 10000
    n_step: int = 5
    w_e: float = 1.0
    w_d: float = 1.0
    gamma_r: float = 0.3
    epsilon: float = 0.1
    epsilon_final: float = 0.005
    epsilon_decay_slots: int = 4000
    alpha: float = 0.02
    alpha_final: float = 0.002
    alpha_decay_slots: int = 6000
    k_r: float = 0.01
    mu_q: float = 2.0
    mu_d: float = 0.3
    mu_0: float = 0.82
    sigma_s1: float = 200.0
    sigma_s2: float = 1.0
    sigma_a: float = 1.0
    reward_scale_e: float = 1.0
    reward_scale_d: float = 1e-6
    nstep_newest_first: bool = False
    # dnn baseline
    dnn_hidden_units: int = 64
    dnn_hidden_layers: int = 3
    dnn_batch: int = 64
    dnn_replay_capacity: int = 10000
    dnn_target_sync: int = 100
    dnn_adam_lr: float = 1e-3
    # harness
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    out_dir: str = "runs"
    record_timing: bool = True
    # per-UE layout; None means "use the default cluster layout"
    ues: tuple[UeSpec, ...] | None = None

    # ------------------------------------------------------------------
    def resolved_ues(self) -> tuple[UeSpec, ...]:
        return self.ues if self.ues is not None else default_ue_layout(self.num_ues, self.bs_x, self.bs_y)

    def channel_params(self) -> ChannelParams:
        return ChannelParams(
            ref_pathloss_db=self.ref_pathloss_db,
            beta=self.pathloss_exponent,
            los_a=self.los_a,
            los_b=self.los_b,
            bandwidth_hz=self.bandwidth_hz,
            noise_power_w=self.noise_power_w,
            tx_power_w=self.tx_power_w,
        )

    def geometry(self) -> Geometry:
        return Geometry(
            altitude_m=self.altitude_m,
            arena_x_m=self.arena_x_m,
            arena_y_m=self.arena_y_m,
            uav_step_m=self.uav_step_m,
            bs_xy=(self.bs_x, self.bs_y),
            ue_xy=tuple((u.x, u.y) for u in self.resolved_ues()),
        )

    def compute_params(self) -> ComputeParams:
        return ComputeParams(
            f_ue=self.f_ue,
            f_uav=self.f_uav,
            f_bs=self.f_bs,
            kappa_ue=self.kappa_ue,
            kappa_uav=self.kappa_uav,
            kappa_bs=self.kappa_bs,
            c_cycles_per_bit=self.cycles_per_bit,
            tau_s=self.tau_s,
            delta_b_bits=self.packet_bits,
        )

    def profiles(self) -> tuple[TaskProfile, ...]:
        return tuple(u.profile for u in self.resolved_ues())

    def epsilon_at(self, t: int) -> float:
        """Linear decay from epsilon to epsilon_final over the first decay slots."""
        if self.epsilon_decay_slots <= 0:
            return self.epsilon
        frac = min(t, self.epsilon_decay_slots) / self.epsilon_decay_slots
        return self.epsilon + (self.epsilon_final - self.epsilon) * frac

    def alpha_at(self, t: int) -> float:
        """Linear decay of the semi-gradient step size (kernel agent only)."""
        if self.alpha_decay_slots <= 0:
            return self.alpha
        frac = min(t, self.alpha_decay_slots) / self.alpha_decay_slots
        return self.alpha + (self.alpha_final - self.alpha) * frac

    # ------------------------------------------------------------------
    def to_text(self) -> str:
        """Canonical key = value echo; parses back to an equal config."""
        lines = []
        for key in sorted(_SCALAR_KEYS):
            value = getattr(self, key)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif key == "seeds":
                text = ",".join(str(s) for s in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        for i, ue in enumerate(self.resolved_ues()):
            p = ue.profile
            lines.append(f"ue{i}_x = {ue.x!r}")
            lines.append(f"ue{i}_y = {ue.y!r}")
            lines.append(f"ue{i}_base_bits = {p.base_bits!r}")
            lines.append(f"ue{i}_peak_bits = {p.peak_bits!r}")
            lines.append(f"ue{i}_period = {p.period}")
            lines.append(f"ue{i}_phase = {p.phase}")
            lines.append(f"ue{i}_waveform = {p.waveform}")
            lines.append(f"ue{i}_jitter = {p.jitter_fraction!r}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def default_ue_layout(num_ues: int, bs_x: float, bs_y: float) -> tuple[UeSpec, ...]:
    """Two clusters: light producers west of the BS, heavy producers east.

    The heavy cluster peaks together (triangular, period 400, phase 0) and
    its per-UE mean exceeds one UE's local processing capacity, so heavy
    UEs must offload on average; the light cluster stays locally
    processable.
    """
    if num_ues < 1:
        raise ValueError("num_ues must be >= 1")
    n_light = max(1, round(0.4 * num_ues)) if num_ues > 1 else 0
    specs = []
    heavy_peaks = (2.4e6, 2.6e6, 2.8e6)  # staggered so equal-load ties cannot lock
    for i in range(num_ues):
        if i < n_light:
            y = bs_y + (-40.0 if i % 2 == 0 else 40.0) * (1 + i // 2)
            specs.append(
                UeSpec(
                    x=bs_x - 150.0,
                    y=y,
                    profile=TaskProfile(
                        base_bits=4e4, peak_bits=1.2e5, period=125, phase=62,
                        waveform="square", jitter_fraction=0.2,
                    ),
                )
            )
        else:
            k = i - n_light
            y = bs_y + (k - (num_ues - n_light - 1) / 2.0) * 80.0
            specs.append(
                UeSpec(
                    x=bs_x + 250.0,
                    y=y,
                    profile=TaskProfile(
                        base_bits=1e5, peak_bits=heavy_peaks[k % 3], period=125, phase=0,
                        waveform="triangular", jitter_fraction=0.2,
                    ),
                )
            )
    return tuple(specs)


# ----------------------------------------------------------------------
# key registry: parsers + documentation
def _parse_bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise ConfigError(f"key '{key}': expected true/false, got {text!r}")


def _parse_seeds(text: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected comma-separated integers, got {text!r}") from exc


def _parse_int(text: str, key: str) -> int:
    try:
        return int(float(text)) if float(text) == int(float(text)) else int(text)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected an integer, got {text!r}") from exc


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"key '{key}': expected a number, got {text!r}") from exc


def _parse_str(text: str, key: str) -> str:
    return text.strip()


_INT_KEYS = {
    "num_ues", "packet_bits", "timeslots", "n_step", "epsilon_decay_slots",
    "alpha_decay_slots", "dnn_hidden_units", "dnn_hidden_layers", "dnn_batch",
    "dnn_replay_capacity", "dnn_target_sync",
}
_BOOL_KEYS = {"nstep_newest_first", "record_timing"}
_STR_KEYS = {"agent", "out_dir"}
_SCALAR_KEYS = {f.name for f in SimConfig.__dataclass_fields__.values() if f.name != "ues"}  # type: ignore[attr-defined]
_UE_FIELD_PARSERS = {
    "x": _parse_float, "y": _parse_float, "base_bits": _parse_float,
    "peak_bits": _parse_float, "period": _parse_int, "phase": _parse_int,
    "waveform": _parse_str, "jitter": _parse_float,
}


class ConfigError(ValueError):
    """Rejected configuration; the message names the offending key."""


def _parse_scalar(key: str, text: str):
    if key in _INT_KEYS:
        return _parse_int(text, key)
    if key in _BOOL_KEYS:
        return _parse_bool(text, key)
    if key in _STR_KEYS:
        return _parse_str(text, key)
    if key == "seeds":
        return _parse_seeds(text, key)
    return _parse_float(text, key)


def parse_config_text(text: str) -> dict[str, str]:
    """Raw key -> value-string pairs from flat config text."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    return entries


def build_config(entries: dict[str, str]) -> SimConfig:
    """Typed, validated SimConfig from raw string entries."""
    scalars: dict[str, object] = {}
    ue_overrides: dict[int, dict[str, object]] = {}
    for key, text in entries.items():
        m = _UE_KEY_RE.match(key)
        if m is not None:
            idx, fieldname = int(m.group(1)), m.group(2)
            ue_overrides.setdefault(idx, {})[fieldname] = _UE_FIELD_PARSERS[fieldname](text, key)
        elif key in _SCALAR_KEYS:
            scalars[key] = _parse_scalar(key, text)
        else:
            raise ConfigError(f"unknown key '{key}'")

    config = SimConfig(**scalars)  # type: ignore[arg-type]
    if ue_overrides:
        if max(ue_overrides) >= config.num_ues:
            bad = max(ue_overrides)
            raise ConfigError(f"key 'ue{bad}_*': UE index out of range for num_ues={config.num_ues}")
        specs = list(default_ue_layout(config.num_ues, config.bs_x, config.bs_y))
        for idx, fields in ue_overrides.items():
            spec = specs[idx]
            prof = spec.profile
            try:
                new_prof = TaskProfile(
                    base_bits=fields.get("base_bits", prof.base_bits),
                    peak_bits=fields.get("peak_bits", prof.peak_bits),
                    period=fields.get("period", prof.period),
                    phase=fields.get("phase", prof.phase),
                    waveform=fields.get("waveform", prof.waveform),
                    jitter_fraction=fields.get("jitter", prof.jitter_fraction),
                )
            except ValueError as exc:
                raise ConfigError(f"key 'ue{idx}_*': {exc}") from exc
            specs[idx] = UeSpec(
                x=fields.get("x", spec.x), y=fields.get("y", spec.y), profile=new_prof
            )
        config = replace(config, ues=tuple(specs))
    validate_config(config)
    return config


def validate_config(config: SimConfig) -> None:
    def require(condition: bool, key: str, message: str) -> None:
        if not condition:
            raise ConfigError(f"key '{key}': {message} (got {getattr(config, key, '?')})")

    require(config.num_ues >= 1, "num_ues", "must be >= 1")
    require(config.timeslots >= 1, "timeslots", "must be >= 1")
    require(config.n_step >= 1, "n_step", "must be >= 1")
    require(config.w_e >= 0.0, "w_e", "must be >= 0")
    require(config.w_d >= 0.0, "w_d", "must be >= 0")
    if config.w_e == 0.0 and config.w_d == 0.0:
        raise ConfigError("key 'w_e'/'w_d': objective weights must not both be zero")
    require(0.0 <= config.gamma_r <= 1.0, "gamma_r", "must be in [0, 1]")
    require(0.0 <= config.epsilon <= 1.0, "epsilon", "must be in [0, 1]")
    require(0.0 <= config.epsilon_final <= 1.0, "epsilon_final", "must be in [0, 1]")
    require(config.epsilon_decay_slots >= 0, "epsilon_decay_slots", "must be >= 0")
    require(config.alpha > 0.0, "alpha", "must be > 0")
    require(config.alpha_final > 0.0, "alpha_final", "must be > 0")
    require(config.alpha_decay_slots >= 0, "alpha_decay_slots", "must be >= 0")
    require(0.0 <= config.k_r <= 1.0, "k_r", "must be in [0, 1]")
    require(config.mu_q > 0.0, "mu_q", "must be > 0")
    require(config.mu_d > 0.0, "mu_d", "must be > 0")
    require(0.0 < config.mu_0 < 1.0, "mu_0", "must be in (0, 1)")
    for key in ("sigma_s1", "sigma_s2", "sigma_a", "reward_scale_e", "reward_scale_d"):
        require(getattr(config, key) > 0.0, key, "must be > 0")
    require(config.agent in ("kernel", "dnn"), "agent", "must be 'kernel' or 'dnn'")
    for key in (
        "bandwidth_hz", "noise_power_w", "tx_power_w", "pathloss_exponent", "los_a", "los_b",
        "altitude_m", "arena_x_m", "arena_y_m", "uav_step_m", "f_ue", "f_uav", "f_bs",
        "kappa_ue", "kappa_uav", "kappa_bs", "cycles_per_bit", "tau_s",
    ):
        require(getattr(config, key) > 0.0, key, "must be > 0")
    require(config.packet_bits >= 1, "packet_bits", "must be a positive integer")
    require(0.0 <= config.bs_x <= config.arena_x_m, "bs_x", "must lie inside the arena")
    require(0.0 <= config.bs_y <= config.arena_y_m, "bs_y", "must lie inside the arena")
    require(0.0 <= config.uav_start_x <= config.arena_x_m, "uav_start_x", "must lie inside the arena")
    require(0.0 <= config.uav_start_y <= config.arena_y_m, "uav_start_y", "must lie inside the arena")
    require(len(config.seeds) >= 1, "seeds", "must list at least one seed")
    for key in ("dnn_hidden_units", "dnn_hidden_layers", "dnn_batch", "dnn_replay_capacity", "dnn_target_sync"):
        require(getattr(config, key) >= 1, key, "must be >= 1")
    require(config.dnn_adam_lr > 0.0, "dnn_adam_lr", "must be > 0")
    for i, ue in enumerate(config.resolved_ues()):
        if not (0.0 <= ue.x <= config.arena_x_m and 0.0 <= ue.y <= config.arena_y_m):
            raise ConfigError(f"key 'ue{i}_x'/'ue{i}_y': UE position must lie inside the arena")
        if ue.profile.waveform not in WAVEFORMS:
            raise ConfigError(f"key 'ue{i}_waveform': must be one of {WAVEFORMS}")
    # distances must stay strictly positive for the channel models
    for i, ue in enumerate(config.resolved_ues()):
        if math.hypot(ue.x - config.bs_x, ue.y - config.bs_y) <= 0.0:
            raise ConfigError(f"key 'ue{i}_x'/'ue{i}_y': UE must not sit exactly on the BS")


def load_config(path: str | None = None, overrides: dict[str, str] | None = None) -> SimConfig:
    """Config from an optional file plus override strings (overrides win)."""
    entries: dict[str, str] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            entries.update(parse_config_text(fh.read()))
    if overrides:
        entries.update({k: str(v) for k, v in overrides.items()})
    return build_config(entries)


def describe_keys() -> str:
    """Human-readable list of every config key and its default."""
    lines = ["Scalar keys (key = default):"]
    defaults = SimConfig()
    for key in sorted(_SCALAR_KEYS):
        value = getattr(defaults, key)
        if key == "seeds":
            value = ",".join(str(s) for s in value)
        lines.append(f"  {key} = {value}")
    lines.append("Per-UE keys (i = 0..num_ues-1):")
    lines.append("  ue{i}_x, ue{i}_y, ue{i}_base_bits, ue{i}_peak_bits,")
    lines.append("  ue{i}_period, ue{i}_phase, ue{i}_waveform (square|triangular), ue{i}_jitter")
    return "\n".join(lines)
