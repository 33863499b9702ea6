"""Run configuration: nested dataclass sections read from and written to YAML.

Unknown keys are rejected at every level with their dotted path, and
:meth:`RunConfig.validate` checks the module preconditions before any work
starts. ``RunConfig.from_yaml(path).to_dict()`` reproduces the resolved file.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from app.core.errors import ConfigurationError
from app.models.grid import Grid
from app.models.layout import UnknownLayout
from app.models.material import EOSKind, MaterialParams

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "background", "stability", "check-hyperbolicity", "rigidity", "verify-identities",
    "simulate", "sweep", "probe-tame", "probe-trace",
)

_SCALARS = {"float": float, "int": int, "bool": bool, "str": str}


@dataclass
class MaterialConfig:
    dim: int = 2
    gamma: float = 1.4
    eos: str = "gamma_law"
    p_inf: float = 0.0
    elastic: List[float] = field(default_factory=list)

    def to_params(self) -> MaterialParams:
        return MaterialParams(self.dim, self.gamma, EOSKind(self.eos), self.p_inf, tuple(self.elastic))


@dataclass
class BackgroundConfig:
    """Piecewise-constant background: diag(F+) = (f11_plus, f22[, f33]), F11-, S+."""
    f11_plus: float = 1.0
    f11_minus: float = 0.5
    f22: float = 1.0
    f33: float = 1.0
    s_plus: float = 0.0

    def stretches(self, dim: int) -> List[float]:
        return [self.f11_plus, self.f22, self.f33][:dim]


@dataclass
class BasicStateConfig:
    front_amplitude: float = 0.0
    wavenumber: int = 1
    velocity_amplitude: float = 0.0
    pressure_amplitude: float = 0.0
    profile: str = "standard"
    norm_order: int = 3


@dataclass
class GridConfig:
    n1: int = 128
    n_tan: int = 16
    x_max: float = 8.0
    cfl: float = 0.4
    tangential: str = "central"


@dataclass
class SourceConfig:
    """Interior bump b(t) exp(-((x_1 - center)/width)^2) cos(2 pi k.x') on one component."""
    component: str = "p"
    side: int = 1
    amplitude: float = 1.0
    wavenumber: int = 1
    center: float = 1.5
    width: float = 0.5
    duration: float = 0.5


@dataclass
class BoundarySourceConfig:
    """Boundary bump b(t) cos(2 pi k.x') on one boundary-condition row."""
    row: int = 0
    amplitude: float = 1.0
    wavenumber: int = 1
    duration: float = 0.5


@dataclass
class SolverConfig:
    final_time: float = 1.0
    record_interval: int = 10
    s: int = 1
    homogenized: bool = False


@dataclass
class ProbeConfig:
    """Settings of the rigidity, trace and tame probes."""
    trials: int = 100
    spread: float = 0.1
    entropy_jump: float = 0.0
    samples: int = 200
    bandwidth: int = 3
    grids: List[int] = field(default_factory=lambda: [64, 128, 256])
    fractions: List[float] = field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])


@dataclass
class OutputConfig:
    out_dir: str = "results"
    snapshots: bool = False
    pdf: bool = False


_SECTIONS = {
    "material": MaterialConfig,
    "background": BackgroundConfig,
    "basic_state": BasicStateConfig,
    "grid": GridConfig,
    "solver": SolverConfig,
    "probe": ProbeConfig,
    "output": OutputConfig,
}
_LIST_SECTIONS = {
    "interior_sources": SourceConfig,
    "boundary_sources": BoundarySourceConfig,
}


def _coerce(value: Any, type_name: str, path: str) -> Any:
    target = _SCALARS.get(type_name)
    if target is None:
        if type_name.startswith("List["):
            if not isinstance(value, (list, tuple)):
                raise ConfigurationError(f"{path} must be a list, got {value!r}")
            item = type_name[5:-1]
            return [_coerce(v, item, f"{path}[{k}]") for k, v in enumerate(value)]
        return value
    if target is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"{path} must be true or false, got {value!r}")
        return value
    if target is int and (isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value)):
        raise ConfigurationError(f"{path} must be an integer, got {value!r}")
    try:
        return target(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path} has the wrong type: {value!r}") from exc


def _section(cls, data: Any, path: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must be a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigurationError(f"unknown config key {path}.{unknown[0]}")
    kwargs = {name: _coerce(value, known[name].type, f"{path}.{name}") for name, value in data.items()}
    return cls(**kwargs)


@dataclass
class RunConfig:
    """Everything one CLI run needs.

    Attributes:
        subcommand: CLI subcommand the config was resolved for
        seed: Root RNG seed
        threads: Worker threads for pools inside modules
    """
    subcommand: str = "simulate"
    seed: int = 0
    threads: int = 1
    material: MaterialConfig = field(default_factory=MaterialConfig)
    background: BackgroundConfig = field(default_factory=BackgroundConfig)
    basic_state: BasicStateConfig = field(default_factory=BasicStateConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    interior_sources: List[SourceConfig] = field(default_factory=list)
    boundary_sources: List[BoundarySourceConfig] = field(default_factory=list)
    solver: SolverConfig = field(default_factory=SolverConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    # -- (de)serialization ------------------------------------------------

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "RunConfig":
        """Build from a mapping; unknown keys raise ConfigurationError with their dotted path."""
        data = dict(data or {})
        top = {"subcommand": "str", "seed": "int", "threads": "int"}
        known = set(top) | set(_SECTIONS) | set(_LIST_SECTIONS)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config key {unknown[0]}")
        kwargs: Dict[str, Any] = {k: _coerce(data[k], t, k) for k, t in top.items() if k in data}
        for name, section in _SECTIONS.items():
            if name in data:
                kwargs[name] = _section(section, data[name], name)
        for name, section in _LIST_SECTIONS.items():
            items = data.get(name) or []
            if not isinstance(items, list):
                raise ConfigurationError(f"{name} must be a list")
            kwargs[name] = [_section(section, item, f"{name}[{k}]") for k, item in enumerate(items)]
        return cls(**kwargs)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from exc
        logger.info(f"Loaded configuration from {path}")
        return cls.from_dict(data)

    def to_dict(self) -> Dict:
        return asdict(self)

    def save_yaml(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, default_flow_style=False, sort_keys=True)
        return path

    # -- validation -------------------------------------------------------

    def validate(self) -> "RunConfig":
        """Check module preconditions; returns self.

        Raises:
            ConfigurationError: On the first violated precondition
        """
        m, bg, bs, g, sv = self.material, self.background, self.basic_state, self.grid, self.solver
        checks = [
            (self.subcommand in SUBCOMMANDS, f"subcommand must be one of {SUBCOMMANDS}, got {self.subcommand!r}"),
            (self.seed >= 0, f"seed must be >= 0, got {self.seed}"),
            (self.threads >= 1, f"threads must be >= 1, got {self.threads}"),
            (m.dim in (2, 3), f"material.dim must be 2 or 3, got {m.dim}"),
            (m.gamma > 1.0, f"material.gamma must be > 1, got {m.gamma}"),
            (m.eos in {k.value for k in EOSKind}, f"material.eos unknown: {m.eos!r}"),
            (bg.f11_plus > bg.f11_minus > 0.0,
             f"background needs f11_plus > f11_minus > 0, got {bg.f11_plus}, {bg.f11_minus}"),
            (all(x > 0.0 for x in bg.stretches(m.dim)), "background stretches must be > 0"),
            (abs(bs.front_amplitude) <= 0.5, f"basic_state.front_amplitude must satisfy |A| <= 1/2, "
                                             f"got {bs.front_amplitude}"),
            (bs.profile in ("standard", "wide"), f"basic_state.profile unknown: {bs.profile!r}"),
            (bs.norm_order >= 0, "basic_state.norm_order must be >= 0"),
            (g.n_tan >= 2 and g.n_tan % 2 == 0, f"grid.n_tan must be even, got {g.n_tan}"),
            (0.0 < g.cfl <= 1.0, f"grid.cfl must lie in (0, 1], got {g.cfl}"),
            (g.tangential in ("central", "spectral"), f"grid.tangential unknown: {g.tangential!r}"),
            (sv.s in (1, 3), f"solver.s must be 1 or 3, got {sv.s}"),
            (sv.final_time > 0.0, f"solver.final_time must be > 0, got {sv.final_time}"),
            (sv.record_interval >= 1, "solver.record_interval must be >= 1"),
            (self.probe.trials >= 1 and self.probe.samples >= 1, "probe trials and samples must be >= 1"),
            (all(0.0 < f < 1.0 for f in self.probe.fractions), "probe.fractions must lie in (0, 1)"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigurationError(message)
        names = UnknownLayout(m.dim).names()
        for k, src in enumerate(self.interior_sources):
            if src.component not in names:
                raise ConfigurationError(f"interior_sources[{k}].component {src.component!r} not in {names}")
            if src.side not in (-1, 1):
                raise ConfigurationError(f"interior_sources[{k}].side must be +1 or -1")
        for k, src in enumerate(self.boundary_sources):
            if not 0 <= src.row <= 2 * m.dim:
                raise ConfigurationError(f"boundary_sources[{k}].row must lie in [0, {2 * m.dim}]")
        Grid(m.dim, g.n1, g.n_tan, g.x_max, g.cfl)
        m.to_params()
        return self

    # -- builders ---------------------------------------------------------

    def material_params(self) -> MaterialParams:
        return self.material.to_params()

    def make_grid(self, n1: Optional[int] = None, n_tan: Optional[int] = None) -> Grid:
        g = self.grid
        return Grid(self.material.dim, n1 or g.n1, n_tan or g.n_tan, g.x_max, g.cfl)

    def make_background(self, f11_minus: Optional[float] = None):
        from app.services.interface.background import build_background

        bg = self.background
        f11m = bg.f11_minus if f11_minus is None else f11_minus
        return build_background(bg.stretches(self.material.dim), f11m, bg.s_plus, self.material_params())

    def make_basic_state(self, grid: Grid, background=None):
        from app.services.linearized.basic_state import build_basic_state
        from app.services.straightening.lift import ChiProfile
        from app.services.straightening.stencils import TangentialScheme

        bs = self.basic_state
        return build_basic_state(
            background if background is not None else self.make_background(), grid,
            front_amplitude=bs.front_amplitude, wavenumber=bs.wavenumber,
            velocity_amplitude=bs.velocity_amplitude, pressure_amplitude=bs.pressure_amplitude,
            profile=ChiProfile(bs.profile), tangential=TangentialScheme(self.grid.tangential),
            norm_order=bs.norm_order,
        )

    def make_sources(self, grid: Grid):
        from app.services.solver.sources import BoundaryBump, InteriorBump, SourceModel

        return SourceModel(
            grid,
            interior=[InteriorBump(**asdict(src)) for src in self.interior_sources],
            boundary=[BoundaryBump(**asdict(src)) for src in self.boundary_sources],
        )
