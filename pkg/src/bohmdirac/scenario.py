"""Declarative scenario configs: parsing, validation, object building.

A scenario is one JSON document with a schema_version field; see the
bundled scenarios/ directory for working examples of every run kind.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from . import geometry
from .dirac import MultiTimeWaveFunction, get_representation
from .slater import MaxwellField, MaxwellMode, WedgeGeometry3D

RUN_KINDS = ("simulate", "equivariance", "check-current-condition",
             "check-divergence", "slater-demo", "foliation")

SCHEMA_VERSION = 1


@dataclass
class Scenario:
    name: str
    dimension: int
    particles: int
    seed: int
    run: dict
    foliation: dict | None = None
    wavefunction: dict | None = None
    maxwell: dict | None = None
    representation: str = "dirac2"
    masses: list = field(default_factory=list)
    out_dir: str = "out"
    raw_text: str = ""


def _need(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing field {where}.{key}" if where else f"missing field {key}")
    return cfg[key]


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config does not parse as JSON: {exc}") from None
    return parse_scenario(cfg, text)


def parse_scenario(cfg: dict, text: str = "") -> Scenario:
    version = _need(cfg, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version {version} unsupported (expected {SCHEMA_VERSION})")
    name = _need(cfg, "name", "")
    run = _need(cfg, "run", "")
    kind = _need(run, "kind", "run")
    if kind not in RUN_KINDS:
        raise ConfigError(f"run.kind {kind!r} not one of {RUN_KINDS}")
    dimension = int(cfg.get("dimension", 1))
    particles = int(cfg.get("particles", 1))
    seed = int(cfg.get("seed", 0))

    sc = Scenario(name=name, dimension=dimension, particles=particles, seed=seed,
                  run=run, foliation=cfg.get("foliation"),
                  wavefunction=cfg.get("wavefunction"), maxwell=cfg.get("maxwell"),
                  representation=cfg.get("representation", "dirac2"),
                  masses=cfg.get("masses", []), out_dir=cfg.get("out_dir", "out"),
                  raw_text=text)
    validate_scenario(sc)
    return sc


def validate_scenario(sc: Scenario):
    kind = sc.run["kind"]
    if kind == "slater-demo":
        if sc.dimension != 3:
            raise ConfigError("run.kind slater-demo requires dimension = 3")
        if sc.particles != 1:
            raise ConfigError("run.kind slater-demo requires particles = 1")
        if sc.maxwell is None:
            raise ConfigError("missing field maxwell")
        return
    if sc.dimension != 1:
        raise ConfigError(f"run.kind {kind} requires dimension = 1")
    if kind != "check-divergence" and sc.foliation is None:
        raise ConfigError("missing field foliation")
    if sc.foliation is not None:
        fkind = _need(sc.foliation, "kind", "foliation")
        if fkind == "dn0" and sc.dimension != 1:
            raise ConfigError("foliation.kind dn0 requires dimension = 1")
        if fkind not in ("flat", "wedge", "dn0"):
            raise ConfigError(f"foliation.kind {fkind!r} unknown")
    if kind != "foliation":
        if sc.wavefunction is None:
            raise ConfigError("missing field wavefunction")
        if not sc.masses:
            raise ConfigError("missing field masses")
        if len(sc.masses) != sc.particles:
            raise ConfigError(f"masses has {len(sc.masses)} entries for "
                              f"{sc.particles} particles")


# ---------------------------------------------------------------------------
# object builders
# ---------------------------------------------------------------------------

def build_foliation(sc: Scenario):
    cfg = sc.foliation
    kind = cfg["kind"]
    if kind == "flat":
        return geometry.flat_foliation(c=float(cfg.get("c", 1.0)))
    if kind == "wedge":
        return geometry.wedge_foliation(a=float(_need(cfg, "a", "foliation")),
                                        v=float(cfg.get("v", 0.0)),
                                        c=float(_need(cfg, "c", "foliation")))
    if kind == "dn0":
        surf = _need(cfg, "initial_surface", "foliation")
        skind = _need(surf, "kind", "foliation.initial_surface")
        if skind == "wedge":
            leaf = geometry.WedgeLeaf(a=float(_need(surf, "a", "foliation.initial_surface")),
                                      apex_t=float(surf.get("apex_t", 0.0)),
                                      apex_x=float(surf.get("apex_x", 0.0)),
                                      a_left=surf.get("a_left"),
                                      a_right=surf.get("a_right"))
        elif skind == "flat":
            leaf = geometry.FlatLeaf(t0=float(surf.get("t0", 0.0)))
        else:
            raise ConfigError(f"foliation.initial_surface.kind {skind!r} unknown")
        fol = geometry.Dn0Foliation(leaf, tol=float(cfg.get("tol", 1e-10)),
                                    seeds=int(cfg.get("seeds", 2048)))
        if "x_grid" in cfg:
            g = cfg["x_grid"]
            fol.x_grid = np.linspace(float(g[0]), float(g[1]), int(g[2]))
        return fol
    raise ConfigError(f"foliation.kind {kind!r} unknown")


def _coeff(c):
    if isinstance(c, (list, tuple)):
        return complex(c[0], c[1])
    return complex(c)


def build_wavefunction(sc: Scenario) -> MultiTimeWaveFunction:
    rep = get_representation(sc.representation)
    cfg = sc.wavefunction
    terms_cfg = _need(cfg, "terms", "wavefunction")
    terms = []
    for i, term in enumerate(terms_cfg):
        coeff = _coeff(term.get("coefficient", 1.0))
        factors = _need(term, "factors", f"wavefunction.terms[{i}]")
        if len(factors) != sc.particles:
            raise ConfigError(f"wavefunction.terms[{i}].factors has {len(factors)} "
                              f"entries for {sc.particles} particles")
        fs = []
        for j, modes in enumerate(factors):
            ms = []
            for mode in modes:
                k = _need(mode, "k", f"wavefunction.terms[{i}].factors[{j}]")
                ms.append({"k": k, "sign": int(mode.get("sign", 1)),
                           "amplitude": _coeff(mode.get("amplitude", 1.0))})
            fs.append(ms)
        terms.append((coeff, fs))
    return MultiTimeWaveFunction.superposition(rep, list(map(float, sc.masses)), terms)


def build_maxwell(sc: Scenario, rng) -> list:
    """Maxwell field(s) for slater runs: explicit modes or a random batch."""
    cfg = sc.maxwell
    if "modes" in cfg:
        modes = [MaxwellMode(k=np.asarray(m["k"], dtype=float),
                             polarization=np.asarray(m["polarization"], dtype=float),
                             amplitude=float(m.get("amplitude", 1.0)),
                             phase=float(m.get("phase", 0.0)))
                 for m in cfg["modes"]]
        return [MaxwellField(modes)]
    if "random" in cfg:
        r = cfg["random"]
        return [MaxwellField.random(rng, n_modes=int(r.get("n_modes", 2)))
                for _ in range(int(r.get("count", 1)))]
    raise ConfigError("maxwell needs either 'modes' or 'random'")


def build_wedge3(sc: Scenario) -> WedgeGeometry3D:
    g = sc.run.get("geometry", {})
    return WedgeGeometry3D(a=float(g.get("a", 0.5)), v=float(g.get("v", 0.0)),
                           c=float(g.get("c", 1.0)))
