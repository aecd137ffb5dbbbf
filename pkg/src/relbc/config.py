"""TOML run configuration.

Example::

    [code]
    N = 8
    k = 16

    [wavepacket]
    sigma = 1.0
    tau0 = 20.0
    delta_tau = 5.0

    [channel]
    name = "rotate"
    params = { theta = 0.3927, lam = 0.8 }

    [run]
    trials = 1000
    seed = 7

A channel may instead list explicit modes::

    [[channel.modes]]
    weight = 1.0
    shift = -3.0
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import ChannelModel, builtin_channel, custom_channel
from .coding import BlockCode
from .states import WavepacketSpec, default_grid


class ConfigError(ValueError):
    """The configuration file is missing, unreadable or malformed."""


@dataclass
class LoadedConfig:
    raw: dict
    code: BlockCode
    spec: WavepacketSpec
    trials: int
    seed: int
    seeds: tuple[int, int]
    permutation: bool
    disclosure_tau: float | None
    gamma_variant: str
    samples_per_sigma: int
    max_delay: float

    def grid(self):
        return default_grid(self.spec, self.max_delay, self.samples_per_sigma)

    def channel(self) -> ChannelModel:
        """Build the channel; catalogue channels raise if they fail validation."""
        ch = self.raw.get("channel", {})
        grid = self.grid()
        d_tau = ch.get("d_tau")
        if "modes" in ch:
            return custom_channel(ch["modes"], self.spec, grid, d_tau, ch.get("name", "custom"))
        return builtin_channel(ch.get("name", "ideal"), self.spec, grid, d_tau,
                               **ch.get("params", {}))


def parse_config(text: str) -> LoadedConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    try:
        code = raw.get("code", {})
        wp = raw.get("wavepacket", {})
        run = raw.get("run", {})
        grid = raw.get("grid", {})
        spec = WavepacketSpec(**{k: float(v) for k, v in wp.items()})
        seeds = tuple(int(s) for s in run.get("seeds", (0, 1)))
        if len(seeds) != 2:
            raise ConfigError("run.seeds needs exactly two integers")
        return LoadedConfig(
            raw=raw,
            code=BlockCode(int(code.get("N", 2)), int(code.get("k", 1))),
            spec=spec,
            trials=int(run.get("trials", 100)),
            seed=int(run.get("seed", 0)),
            seeds=seeds,
            permutation=bool(run.get("permutation", True)),
            disclosure_tau=run.get("disclosure_tau"),
            gamma_variant=str(run.get("gamma", "helstrom")),
            samples_per_sigma=int(grid.get("samples_per_sigma", 64)),
            max_delay=float(grid.get("max_delay", 2 * spec.tau0)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | Path) -> LoadedConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def snapshot(cfg: LoadedConfig) -> dict[str, Any]:
    """Plain-data view of the configuration for run records."""
    return cfg.raw
