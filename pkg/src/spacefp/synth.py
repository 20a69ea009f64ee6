"""Synthetic virtual spaces with controllable noise.

A virtual space is a set of presence patterns; a pattern is a group of
devices that all arrive at ``t_start`` and are detected every time unit for
``tau`` units. Instances of a space are perturbed copies of it, one epoch
each. Seven knobs control the perturbation:

======== =====================================================
alpha_ts start-time jitter, sigma = tau * alpha_ts
alpha_td duration jitter, sigma = tau * alpha_td
alpha_gs group-size jitter, sigma = NG * alpha_gs
beta     floor(beta * NP) fresh random patterns are added
gamma    floor(gamma * NP) original patterns are removed
eta      floor(eta * NG) devices per pattern get a random period
rho      each detection is dropped with this probability
======== =====================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .errors import InvalidConfig
from .model import DetectionSet, check_params


@dataclass(frozen=True)
class PresencePattern:
    group: tuple[str, ...]
    t_start: int
    tau: int

    @property
    def ng(self) -> int:
        return len(self.group)


@dataclass(frozen=True)
class VirtualSpace:
    patterns: tuple[PresencePattern, ...]
    fd: int
    name: str = "s"
    detection_period: int = 1
    ng_range: tuple[int, int] = (1, 100)

    def __post_init__(self):
        if not self.patterns:
            raise InvalidConfig("a virtual space needs at least one pattern")
        for p in self.patterns:
            if p.t_start < 0 or p.tau < 1 or p.t_start + p.tau > self.fd:
                raise InvalidConfig(f"pattern {p.t_start}+{p.tau} does not fit in fd={self.fd}")

    @property
    def np_(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class PerturbationConfig:
    alpha_ts: float = 0.0
    alpha_td: float = 0.0
    alpha_gs: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    eta: float = 0.0
    rho: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha_ts", "alpha_td", "alpha_gs", "beta"):
            if getattr(self, name) < 0:
                raise InvalidConfig(f"{name} must be >= 0")
        for name in ("gamma", "eta", "rho"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidConfig(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class SynthConfig:
    ns: int = 10
    ni: int = 100
    fd: int = 1440
    fr: int = 60
    ng_range: tuple[int, int] = (1, 100)
    np_range: tuple[int, int] = (1, 100)
    detection_period: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.ns < 1 or self.ni < 1:
            raise InvalidConfig("ns and ni must be positive")
        try:
            check_params(self.fd, self.fr)
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        for name in ("ng_range", "np_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise InvalidConfig(f"{name}={getattr(self, name)} is empty or non-positive")
        if self.detection_period < 1:
            raise InvalidConfig("detection_period must be positive")


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def derive_seed(*key: int) -> int:
    """A 32-bit seed derived deterministically from a tuple of integers."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1)[0])


def _random_window(rng: np.random.Generator, fd: int) -> tuple[int, int]:
    t_start = int(rng.integers(0, fd))
    tau = int(rng.integers(1, fd - t_start + 1))
    return t_start, tau


def _random_pattern(rng, fd, ng_range, prefix) -> PresencePattern:
    ng = int(rng.integers(ng_range[0], ng_range[1] + 1))
    t_start, tau = _random_window(rng, fd)
    return PresencePattern(tuple(f"{prefix}.d{k}" for k in range(ng)), t_start, tau)


def generate_spaces(cfg: SynthConfig) -> list[VirtualSpace]:
    width = len(str(cfg.ns - 1))
    spaces = []
    for si in range(cfg.ns):
        rng = _rng(cfg.seed, si)
        name = f"s{si:0{width}d}"
        n_patterns = int(rng.integers(cfg.np_range[0], cfg.np_range[1] + 1))
        patterns = tuple(_random_pattern(rng, cfg.fd, cfg.ng_range, f"{name}.p{j}")
                         for j in range(n_patterns))
        spaces.append(VirtualSpace(patterns, cfg.fd, name, cfg.detection_period, cfg.ng_range))
    return spaces


def perturb_instance(vs: VirtualSpace, p: PerturbationConfig) -> VirtualSpace:
    """A perturbed copy of ``vs``: removal, then jitter of survivors, then additions."""
    rng = _rng(p.seed, 0)
    fd, n_patterns = vs.fd, vs.np_
    fresh = 0

    n_remove = int(np.floor(p.gamma * n_patterns))
    keep = np.ones(n_patterns, dtype=bool)
    if n_remove:
        keep[rng.choice(n_patterns, size=n_remove, replace=False)] = False

    out = []
    for pat, kept in zip(vs.patterns, keep):
        if not kept:
            continue
        t_new = int(np.rint(rng.normal(pat.t_start, pat.tau * p.alpha_ts)))
        tau_new = int(np.rint(rng.normal(pat.tau, pat.tau * p.alpha_td)))
        ng_new = int(np.rint(rng.normal(pat.ng, pat.ng * p.alpha_gs)))
        t_new = min(max(t_new, 0), fd - 1)
        tau_new = min(max(tau_new, 1), fd - t_new)
        ng_new = max(ng_new, 1)
        group = pat.group
        if ng_new < pat.ng:
            picked = np.sort(rng.choice(pat.ng, size=ng_new, replace=False))
            group = tuple(group[i] for i in picked)
        elif ng_new > pat.ng:
            extra = tuple(f"{vs.name}.x{fresh + k}" for k in range(ng_new - pat.ng))
            fresh += len(extra)
            group = group + extra
        out.append(PresencePattern(group, t_new, tau_new))

    for j in range(int(np.floor(p.beta * n_patterns))):
        out.append(_random_pattern(rng, fd, vs.ng_range, f"{vs.name}.n{j}"))

    if not out:
        # gamma = 1 removes everything; keep the space well-formed with no devices
        return replace(vs, patterns=(PresencePattern((), 0, 1),))
    return replace(vs, patterns=tuple(out))


def render_detections(vs: VirtualSpace, space_id: str, p: PerturbationConfig,
                      time_unit: str = "unit") -> DetectionSet:
    """Expand the patterns of ``vs`` into detection records for ``space_id``."""
    rng = _rng(p.seed, 1)
    vocab: list[str] = []
    dev_parts, t_parts = [], []
    for pat in vs.patterns:
        base = len(vocab)
        vocab.extend(pat.group)
        if not pat.ng:
            continue
        codes = np.arange(base, base + pat.ng)
        period = np.full(pat.ng, vs.detection_period)
        n_async = int(np.floor(p.eta * pat.ng)) if pat.tau >= 4 else 0
        if n_async:
            chosen = rng.choice(pat.ng, size=n_async, replace=False)
            period[chosen] = rng.integers(2, pat.tau // 2 + 1, size=n_async)
        for per in np.unique(period):
            members = codes[period == per]
            times = np.arange(pat.t_start, pat.t_start + pat.tau, per)
            dev_parts.append(np.repeat(members, len(times)))
            t_parts.append(np.tile(times, len(members)))
    if dev_parts:
        dev = np.concatenate(dev_parts)
        ts = np.concatenate(t_parts)
    else:
        dev = ts = np.zeros(0, dtype=np.int64)
    if p.rho > 0 and len(ts):
        keep = rng.random(len(ts)) >= p.rho
        dev, ts = dev[keep], ts[keep]
    return DetectionSet(vocab, (space_id,), dev, np.zeros(len(ts), dtype=np.int64), ts, time_unit)


@dataclass(frozen=True)
class Instance:
    instance_id: str
    space: str
    detections: DetectionSet = field(repr=False)


def generate_instances(spaces: list[VirtualSpace], ni: int,
                       p: PerturbationConfig) -> Iterator[Instance]:
    """``ni`` perturbed, rendered instances per space; seeds derive from ``p.seed``."""
    width = len(str(ni - 1))
    for si, vs in enumerate(spaces):
        for ii in range(ni):
            pi = replace(p, seed=derive_seed(p.seed, si, ii))
            iid = f"{vs.name}-i{ii:0{width}d}"
            yield Instance(iid, vs.name, render_detections(perturb_instance(vs, pi), iid, pi))
