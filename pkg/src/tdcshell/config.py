"""Scenario configuration: INI files with ``[section]`` headers and ``key = value`` lines.

Sections: ``[scenario]``, ``[mesh]``, ``[material]``, ``[load]``,
``[solver]``, ``[formfind]``, ``[output]``. Unknown sections or keys are
rejected, and every scenario's required keys are checked before any
computation starts.
"""
import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError, ParameterError
from .materials import make_material

SCENARIOS = ("formfind-catenoid", "solve-cylinder-load", "solve-spheroid-pressure",
             "solve-custom", "formfind-custom")


@dataclass
class ScenarioSection:
    name: str = "solve-cylinder-load"
    iso_p2: bool = False  # isoparametric P2 displacements instead of P1 on P2 geometry
    levels: int = 4  # refinement levels of a convergence study
    overkill_refinements: int = 2  # extra uniform refinements for the reference solution


@dataclass
class MeshSection:
    generator: str = "cylinder"  # cylinder | spheroid | off
    path: str = ""
    geometry_order: int = 2
    radius: float = 0.5
    height: float = 4.0
    axial_divisions: int = 16
    circumferential_divisions: int = 16
    r_max: float = 1.0
    r_min: float = 0.5
    refinement: int = 3


@dataclass
class MaterialSection:
    model: str = "mooney-rivlin"
    E: float = 10e6
    nu: float = 0.5
    thickness: float = 0.01


@dataclass
class LoadSection:
    kind: str = "none"  # none | cylinder-profile | pressure | nodal
    scale: float = 4000.0  # g(x) = scale * x (L - x) for the cylinder profile (Pa/m^2)
    length: float = 4.0
    pressure: float = 0.0  # Pa; final pressure of a sweep
    pressure_step: float = 200.0  # Pa
    snapshot_pressures: tuple = (1000.0, 3000.0, 4800.0)
    path: str = ""  # nodal load vectors, one "fx fy fz" line per mesh node
    clamp: str = "boundary"  # boundary | symmetry | none


@dataclass
class SolverSection:
    rel_tol: float = 1e-8
    abs_tol_factor: float = 1e-10
    max_newton: int = 50
    load_steps: int = 1
    line_search: bool = False


@dataclass
class FormFindSection:
    movement_tol: float = 0.0  # 0 -> 1e-10 x bounding-box diagonal
    max_outer: int = 500
    acceleration: str = "anderson"  # anderson | none
    snapshot_every: int = 0
    pinch_quality: float = 0.02


@dataclass
class OutputSection:
    directory: str = "out"
    vtk: bool = True


@dataclass
class ScenarioConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    mesh: MeshSection = field(default_factory=MeshSection)
    material: MaterialSection = field(default_factory=MaterialSection)
    load: LoadSection = field(default_factory=LoadSection)
    solver: SolverSection = field(default_factory=SolverSection)
    formfind: FormFindSection = field(default_factory=FormFindSection)
    output: OutputSection = field(default_factory=OutputSection)

    @property
    def name(self):
        return self.scenario.name

    @property
    def displacement_degree(self):
        return 2 if self.scenario.iso_p2 else 1

    def with_iso_p2(self, flag=True):
        return replace(self, scenario=replace(self.scenario, iso_p2=bool(flag)))


# scenario defaults reproducing the three reference experiments
_DEFAULTS = {
    "formfind-catenoid": dict(
        mesh=dict(generator="cylinder", radius=0.5, height=0.6, axial_divisions=4,
                  circumferential_divisions=16)),
    "solve-cylinder-load": dict(
        mesh=dict(generator="cylinder", radius=0.5, height=4.0, axial_divisions=8,
                  circumferential_divisions=8),
        material=dict(model="mooney-rivlin", E=10e6, nu=0.5, thickness=0.01),
        load=dict(kind="cylinder-profile", scale=4000.0, length=4.0, clamp="boundary")),
    "solve-spheroid-pressure": dict(
        mesh=dict(generator="spheroid", r_max=1.0, r_min=0.5, refinement=3),
        material=dict(model="mooney-rivlin", E=100e6, nu=0.5, thickness=1e-3),
        load=dict(kind="pressure", pressure=4800.0, pressure_step=200.0, clamp="symmetry"),
        solver=dict(max_newton=300, load_steps=10)),
    "solve-custom": dict(mesh=dict(generator="off")),
    "formfind-custom": dict(mesh=dict(generator="off")),
}

_REQUIRED = {
    "solve-custom": [("mesh", "path"), ("material", "E"), ("material", "nu"),
                     ("material", "thickness")],
    "formfind-custom": [("mesh", "path")],
}

_SECTIONS = {f.name: f.type for f in fields(ScenarioConfig)}
_CLASSES = {"scenario": ScenarioSection, "mesh": MeshSection, "material": MaterialSection,
            "load": LoadSection, "solver": SolverSection, "formfind": FormFindSection,
            "output": OutputSection}


def _convert(section, key, raw, default):
    text = raw.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as "
                          f"{type(default).__name__}") from None
    return text


def default_config(name):
    """Configuration of a named scenario with its reference-experiment defaults."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    cfg = ScenarioConfig(scenario=ScenarioSection(name=name))
    for sec, values in _DEFAULTS[name].items():
        setattr(cfg, sec, replace(getattr(cfg, sec), **values))
    return cfg


def parse_config(text, source="<string>"):
    """Build and validate a ``ScenarioConfig`` from INI text."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str  # keys are case sensitive (E vs e)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    unknown = [s for s in parser.sections() if s not in _SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    if not parser.has_option("scenario", "name"):
        raise ConfigError("[scenario] name is required")
    cfg = default_config(parser.get("scenario", "name").strip())
    given = set()
    for sec in parser.sections():
        current = getattr(cfg, sec)
        valid = {f.name for f in fields(_CLASSES[sec])}
        updates = {}
        for key, raw in parser.items(sec):
            if key not in valid:
                raise ConfigError(f"[{sec}] unknown key {key!r}; valid keys: "
                                  f"{', '.join(sorted(valid))}")
            updates[key] = _convert(sec, key, raw, getattr(current, key))
            given.add((sec, key))
        setattr(cfg, sec, replace(current, **updates))
    for sec, key in _REQUIRED.get(cfg.name, []):
        if (sec, key) not in given:
            raise ConfigError(f"scenario {cfg.name} requires [{sec}] {key}")
    validate(cfg)
    return cfg


def load_config(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from None
    return parse_config(text, source=str(p))


def validate(cfg):
    """Semantic checks that need no computation."""
    m = cfg.mesh
    if m.generator not in ("cylinder", "spheroid", "off"):
        raise ConfigError(f"[mesh] generator must be cylinder, spheroid or off, got {m.generator!r}")
    if m.generator == "off" and not m.path:
        raise ConfigError("[mesh] path is required for generator = off")
    if m.geometry_order not in (1, 2):
        raise ConfigError("[mesh] geometry_order must be 1 or 2")
    if cfg.scenario.iso_p2 and m.generator != "off" and m.geometry_order != 2:
        raise ConfigError("iso-P2 displacements need geometry_order = 2")
    if cfg.load.kind not in ("none", "cylinder-profile", "pressure", "nodal"):
        raise ConfigError(f"[load] kind {cfg.load.kind!r} is not supported")
    if cfg.load.kind == "nodal" and not cfg.load.path:
        raise ConfigError("[load] path is required for kind = nodal")
    if cfg.load.clamp not in ("boundary", "symmetry", "none"):
        raise ConfigError("[load] clamp must be boundary, symmetry or none")
    if cfg.load.kind == "pressure" and not cfg.load.pressure_step > 0:
        raise ConfigError("[load] pressure_step must be positive")
    if cfg.formfind.acceleration not in ("anderson", "none"):
        raise ConfigError("[formfind] acceleration must be anderson or none")
    if cfg.scenario.levels < 3:
        raise ConfigError("[scenario] levels must be at least 3 for an order fit")
    if cfg.name.startswith("solve"):
        mat = cfg.material
        try:
            make_material(mat.model, mat.E, mat.nu, mat.thickness)
        except ParameterError as exc:
            raise ConfigError(f"[material] {exc}") from None
    return cfg
