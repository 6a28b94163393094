"""
Scenario configuration files

Line-oriented `key = value` text with [robot] [controller] [trajectory]
[disturbance] [sim] sections. Every parsed value keeps its line number so
errors point at the offending line. dumps() writes the canonical form.
"""
import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from controllers import ALSI_KINDS, BASELINE_KINDS, CONTROLLER_KINDS, AttenuationSpec, ControllerSpec, SingularRegionSpec
from controllers.base_controller import PINV_ALSI, PINV_MOORE_PENROSE
from disturbances import DISTURBANCE_KINDS, DisturbanceSignal
from dq_algebra import PureQuaternion, UnitDualQuaternion, UnitQuaternion, pose_from, rotation_from_angle_axis
from errors import ConfigError, ConstraintViolationError, DqHinfError, UnknownControllerError
from json_logging import log_json
from kinematics import fkm, inverse_kinematics, load_chain
from simulator import DEFAULT_DT, DisturbancePair, ScenarioConfig
from trajectories import TRAJECTORY_KINDS, MovingTarget, ScrewTrajectory, SetPoint

# value types
STR = 'str'
INT = 'int'
FLOAT = 'float'
BOOL = 'bool'
FLOATS = 'floats'          # space-separated vector
STR_LIST = 'str_list'      # comma-separated, expanded into one scenario per entry
FLOAT_LIST = 'float_list'


def _disturbance_keys(prefix: str):
    return [
        (f'{prefix}_kind', STR),
        (f'{prefix}_amplitude', FLOATS),
        (f'{prefix}_period', FLOAT),
        (f'{prefix}_periods', FLOATS),
        (f'{prefix}_seed', INT),
        (f'{prefix}_band', FLOATS),
        (f'{prefix}_components', INT),
    ]


# Section and key order here is the canonical order
SCHEMA: Dict[str, Dict[str, str]] = {
    'robot': dict([
        ('chain', STR),
        ('q0', FLOATS),
        ('base_position', FLOATS),
        ('base_rotation', FLOATS),
        ('effector_position', FLOATS),
        ('effector_rotation', FLOATS),
        ('initial_angle', FLOAT),
        ('initial_axis', FLOATS),
        ('initial_position', FLOATS),
    ]),
    'controller': dict([
        ('kind', STR_LIST),
        ('gain', FLOAT_LIST),
        ('baseline_gain', FLOAT),
        ('gamma_o', FLOAT_LIST),
        ('gamma_t', FLOAT_LIST),
        ('gamma_o1', FLOAT),
        ('gamma_o2', FLOAT),
        ('gamma_t1', FLOAT),
        ('gamma_t2', FLOAT),
        ('sigma_region', FLOAT),
        ('sigma_far', FLOAT),
        ('pinv', STR),
        ('alsi_eps', FLOAT),
        ('alsi_lambda_max', FLOAT),
        ('rank_tol', FLOAT),
    ]),
    'trajectory': dict([
        ('kind', STR),
        ('target_rotation', FLOATS),
        ('target_angle', FLOAT),
        ('target_axis', FLOATS),
        ('target_position', FLOATS),
        ('duration', FLOAT),
        ('hold', FLOAT),
        ('return', BOOL),
        ('start_time', FLOAT),
        ('speeds', FLOATS),
        ('periods', FLOATS),
    ]),
    'disturbance': dict(_disturbance_keys('vw') + _disturbance_keys('vc')),
    'sim': dict([
        ('name', STR),
        ('dt', FLOAT),
        ('T', FLOAT),
        ('seed', INT),
        ('converge_tol', FLOAT),
        ('sigma_bound', BOOL),
    ]),
}

REQUIRED = {
    'robot': ('chain', 'q0'),
    'controller': ('kind',),
    'trajectory': ('kind',),
}

VECTOR_SIZES = {
    'base_position': 3, 'base_rotation': 4, 'effector_position': 3, 'effector_rotation': 4,
    'initial_axis': 3, 'initial_position': 3,
    'target_rotation': 4, 'target_axis': 3, 'target_position': 3,
    'speeds': 3, 'periods': 3,
    'vw_amplitude': 6, 'vc_amplitude': 6, 'vw_band': 2, 'vc_band': 2,
}


@dataclass
class ConfigEntry:
    value: Any
    line: Optional[int] = None


@dataclass
class ScenarioDocument:
    """Parsed, typed configuration; sections map keys to entries"""
    sections: Dict[str, Dict[str, ConfigEntry]] = field(default_factory=dict)
    path: Optional[str] = None

    def get(self, section: str, key: str, default=None):
        entry = self.sections.get(section, {}).get(key)
        return default if entry is None else entry.value

    def has(self, section: str, key: str) -> bool:
        return key in self.sections.get(section, {})

    def line(self, section: str, key: str) -> Optional[int]:
        entry = self.sections.get(section, {}).get(key)
        return None if entry is None else entry.line

    def error(self, message: str, section: str = None, key: str = None) -> ConfigError:
        line = self.line(section, key) if section and key else None
        return ConfigError(message, line=line, path=self.path)

    def values(self) -> Dict[str, Dict[str, Any]]:
        return {s: {k: e.value for k, e in keys.items()} for s, keys in self.sections.items()}


def _parse_value(kind: str, raw: str, key: str):
    if kind == STR:
        return raw
    if kind == INT:
        return int(raw)
    if kind == FLOAT:
        value = float(raw)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value for {key}")
        return value
    if kind == BOOL:
        lowered = raw.lower()
        if lowered in ('true', 'yes', '1'):
            return True
        if lowered in ('false', 'no', '0'):
            return False
        raise ValueError(f"expected true or false for {key}, got '{raw}'")
    if kind == FLOATS:
        values = [float(v) for v in raw.replace(',', ' ').split()]
        if not values:
            raise ValueError(f"empty vector for {key}")
        size = VECTOR_SIZES.get(key)
        if size is not None and len(values) != size:
            raise ValueError(f"{key} needs {size} values, got {len(values)}")
        return values
    if kind == STR_LIST:
        values = [v.strip().lower() for v in raw.split(',') if v.strip()]
        if not values:
            raise ValueError(f"empty list for {key}")
        return values
    if kind == FLOAT_LIST:
        values = [float(v) for v in raw.split(',') if v.strip()]
        if not values:
            raise ValueError(f"empty list for {key}")
        return values
    raise ValueError(f"unknown value type {kind}")


def loads(text: str, path: str = None) -> ScenarioDocument:
    """Parse configuration text; comments start with # or ;"""
    doc = ScenarioDocument(path=path)
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw
        for marker in ('#', ';'):
            line = line.split(marker, 1)[0]
        line = line.strip()
        if not line:
            continue

        if line.startswith('['):
            if not line.endswith(']'):
                raise ConfigError(f"malformed section header '{line}'", line=lineno, path=path)
            section = line[1:-1].strip().lower()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", line=lineno, path=path)
            if section in doc.sections:
                raise ConfigError(f"duplicate section [{section}]", line=lineno, path=path)
            doc.sections[section] = {}
            continue

        if section is None:
            raise ConfigError("key outside of any section", line=lineno, path=path)
        if '=' not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=lineno, path=path)
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key '{key}' in [{section}]", line=lineno, path=path)
        if key in doc.sections[section]:
            raise ConfigError(f"duplicate key '{key}' in [{section}]", line=lineno, path=path)
        if not value:
            raise ConfigError(f"missing value for '{key}'", line=lineno, path=path)
        try:
            parsed = _parse_value(SCHEMA[section][key], value, key)
        except ValueError as e:
            raise ConfigError(f"bad value for '{key}': {e}", line=lineno, path=path)
        doc.sections[section][key] = ConfigEntry(parsed, lineno)

    for section, keys in REQUIRED.items():
        for key in keys:
            if not doc.has(section, key):
                raise ConfigError(f"missing required key '{key}' in [{section}]", path=path)
    return doc


def load(path: str) -> ScenarioDocument:
    if not os.path.isfile(path):
        raise ConfigError("config file not found", path=path)
    with open(path, 'r', encoding='utf-8') as f:
        return loads(f.read(), path=path)


def _format_value(kind: str, value) -> str:
    if kind == FLOAT:
        return repr(float(value))
    if kind == INT:
        return str(int(value))
    if kind == BOOL:
        return 'true' if value else 'false'
    if kind == FLOATS:
        return ' '.join(repr(float(v)) for v in value)
    if kind == STR_LIST:
        return ', '.join(value)
    if kind == FLOAT_LIST:
        return ', '.join(repr(float(v)) for v in value)
    return str(value)


def dumps(doc: ScenarioDocument) -> str:
    """Canonical text: schema section and key order, floats in repr form"""
    blocks = []
    for section, keys in SCHEMA.items():
        entries = doc.sections.get(section)
        if entries is None:
            continue
        lines = [f'[{section}]']
        for key, kind in keys.items():
            if key in entries:
                lines.append(f'{key} = {_format_value(kind, entries[key].value)}')
        blocks.append('\n'.join(lines))
    return '\n\n'.join(blocks) + '\n'


def _rotation(doc: ScenarioDocument, section: str, quat_key: str, angle_key: str = None, axis_key: str = None):
    if doc.has(section, quat_key):
        try:
            return UnitQuaternion.normalized(np.array(doc.get(section, quat_key)))
        except ConstraintViolationError as e:
            raise doc.error(str(e), section, quat_key)
    if angle_key and doc.has(section, angle_key):
        if not doc.has(section, axis_key):
            raise doc.error(f"'{angle_key}' needs '{axis_key}'", section, angle_key)
        axis = np.array(doc.get(section, axis_key))
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise doc.error("rotation axis must be nonzero", section, axis_key)
        return rotation_from_angle_axis(doc.get(section, angle_key), PureQuaternion(*(axis / norm)))
    return UnitQuaternion()


def _pose(doc: ScenarioDocument, section: str, position_key: str, quat_key: str,
          angle_key: str = None, axis_key: str = None):
    r = _rotation(doc, section, quat_key, angle_key, axis_key)
    p = doc.get(section, position_key, [0.0, 0.0, 0.0])
    return pose_from(r, PureQuaternion(*p))


def _resolve_chain_path(doc: ScenarioDocument, chain_dirs: Optional[Sequence[str]] = None) -> str:
    chain_path = doc.get('robot', 'chain')
    if not os.path.isabs(chain_path) and doc.path:
        chain_path = os.path.join(os.path.dirname(os.path.abspath(doc.path)), chain_path)
    if chain_dirs is not None:
        real = os.path.realpath(chain_path)
        roots = [os.path.realpath(d) for d in chain_dirs]
        if not any(os.path.commonpath([real, root]) == root for root in roots):
            raise doc.error("chain file is outside the allowed directories", 'robot', 'chain')
    return chain_path


def _chain(doc: ScenarioDocument, chain_dirs: Optional[Sequence[str]] = None):
    base = _pose(doc, 'robot', 'base_position', 'base_rotation')
    effector = _pose(doc, 'robot', 'effector_position', 'effector_rotation')
    chain = load_chain(_resolve_chain_path(doc, chain_dirs), base_pose=base, effector_pose=effector)
    if chain.n != len(doc.get('robot', 'q0')):
        raise doc.error(f"q0 needs {chain.n} values for chain '{chain.name}'", 'robot', 'q0')
    return chain


def _initial_joints(doc: ScenarioDocument, chain) -> np.ndarray:
    q0 = np.array(doc.get('robot', 'q0'), dtype=float)
    if not any(doc.has('robot', k) for k in ('initial_angle', 'initial_axis', 'initial_position')):
        return q0
    target = _pose(doc, 'robot', 'initial_position', None, 'initial_angle', 'initial_axis')
    try:
        q = inverse_kinematics(chain, target, q0)
    except DqHinfError as e:
        raise doc.error(f"initial pose not reachable from q0: {e}", 'robot', 'initial_position')
    log_json("info", "Initial pose solved",
        event_type="ik_converged",
        chain=chain.name,
        q0=[float(v) for v in q]
    )
    return q


def _aligned(target: UnitDualQuaternion, reference: UnitDualQuaternion) -> UnitDualQuaternion:
    """Sign of target whose rotation is on the hemisphere of the reference rotation"""
    if float(np.dot(target.coeffs[:4], reference.coeffs[:4])) < 0.0:
        return UnitDualQuaternion.from_array(-target.coeffs)
    return target


def _trajectory(doc: ScenarioDocument, chain, q0: np.ndarray):
    kind = doc.get('trajectory', 'kind').lower()
    if kind not in TRAJECTORY_KINDS:
        raise doc.error(f"unknown trajectory kind '{kind}', expected one of {', '.join(TRAJECTORY_KINDS)}",
                        'trajectory', 'kind')
    x0 = fkm(chain, q0)
    target = _pose(doc, 'trajectory', 'target_position', 'target_rotation', 'target_angle', 'target_axis')
    target = _aligned(target, x0)
    try:
        if kind == 'setpoint':
            return SetPoint(target)
        if kind == 'screw':
            if not doc.has('trajectory', 'duration'):
                raise doc.error("screw trajectory needs 'duration'", 'trajectory', 'kind')
            return ScrewTrajectory(
                start=x0,
                end=target,
                duration=doc.get('trajectory', 'duration'),
                start_time=doc.get('trajectory', 'start_time', 0.0),
                hold=doc.get('trajectory', 'hold', 0.0),
                return_back=doc.get('trajectory', 'return', False),
            )
        moving = {}
        if doc.has('trajectory', 'speeds'):
            moving['speeds'] = tuple(doc.get('trajectory', 'speeds'))
        if doc.has('trajectory', 'periods'):
            moving['periods'] = tuple(doc.get('trajectory', 'periods'))
        return MovingTarget(offset=target, **moving)
    except ConstraintViolationError as e:
        raise doc.error(str(e), 'trajectory', 'kind')


def _disturbance(doc: ScenarioDocument, prefix: str, seed: int, T: float) -> DisturbanceSignal:
    kind = doc.get('disturbance', f'{prefix}_kind', 'zero').lower()
    if kind not in DISTURBANCE_KINDS:
        raise doc.error(f"unknown disturbance kind '{kind}', expected one of {', '.join(DISTURBANCE_KINDS)}",
                        'disturbance', f'{prefix}_kind')
    params = {'kind': kind, 'seed': doc.get('disturbance', f'{prefix}_seed', seed), 'horizon': T}
    for name in ('amplitude', 'period', 'periods', 'band', 'components'):
        key = f'{prefix}_{name}'
        if doc.has('disturbance', key):
            value = doc.get('disturbance', key)
            params[name] = tuple(value) if isinstance(value, list) else value
    try:
        return DisturbanceSignal(**params)
    except ConstraintViolationError as e:
        raise doc.error(str(e), 'disturbance', f'{prefix}_kind')


def _attenuation(doc: ScenarioDocument, gamma_o: Optional[float], gamma_t: Optional[float]):
    components = [doc.get('controller', k) for k in ('gamma_o1', 'gamma_o2', 'gamma_t1', 'gamma_t2')]
    try:
        if any(c is not None for c in components):
            if any(c is None for c in components):
                raise doc.error("gamma_o1, gamma_o2, gamma_t1 and gamma_t2 must be given together",
                                'controller', 'gamma_o1')
            return AttenuationSpec(*components)
        if gamma_o is None and gamma_t is None:
            return None
        if gamma_o is None or gamma_t is None:
            raise doc.error("gamma_o and gamma_t must be given together", 'controller', 'gamma_o')
        return AttenuationSpec.uniform(gamma_o, gamma_t)
    except ConstraintViolationError as e:
        raise doc.error(str(e), 'controller', 'gamma_o')


def _controller(doc: ScenarioDocument, kind: str, gain, gamma_o, gamma_t) -> ControllerSpec:
    if kind not in CONTROLLER_KINDS:
        raise UnknownControllerError(
            f"unknown controller kind '{kind}', expected one of {', '.join(CONTROLLER_KINDS)}",
            line=doc.line('controller', 'kind'), path=doc.path)

    if kind in BASELINE_KINDS and doc.has('controller', 'baseline_gain'):
        gain = doc.get('controller', 'baseline_gain')
    attenuation = _attenuation(doc, gamma_o, gamma_t) if kind in ('hinf', 'hinf_sr') else None
    if attenuation is None and gain is None:
        raise doc.error(f"controller '{kind}' needs 'gain' or attenuation levels", 'controller', 'kind')
    if gain is not None and not gain > 0.0:
        raise doc.error(f"gain must be positive, got {gain!r}", 'controller', 'gain')

    pinv = doc.get('controller', 'pinv', PINV_MOORE_PENROSE).lower()
    if pinv not in (PINV_MOORE_PENROSE, PINV_ALSI):
        raise doc.error(f"unknown pinv policy '{pinv}'", 'controller', 'pinv')
    if pinv == PINV_ALSI and kind not in ALSI_KINDS:
        raise doc.error(f"pinv = alsi is only available for {', '.join(ALSI_KINDS)}", 'controller', 'pinv')

    region = None
    if kind == 'hinf_sr' or doc.has('controller', 'sigma_region'):
        try:
            region = SingularRegionSpec(
                sigma_region=doc.get('controller', 'sigma_region', 0.01),
                sigma_far=doc.get('controller', 'sigma_far', 2.0),
            )
        except ConstraintViolationError as e:
            raise doc.error(str(e), 'controller', 'sigma_region')

    extra = {k: doc.get('controller', k) for k in ('alsi_eps', 'alsi_lambda_max', 'rank_tol')
             if doc.has('controller', k)}
    return ControllerSpec(kind=kind, gain=gain, attenuation=attenuation, singular_region=region,
                          pinv=pinv, **extra)


def _label(base: str, kind: str, gain, gamma_o, gamma_t, expanded: Dict[str, bool]) -> str:
    parts = [base]
    if expanded['kind']:
        parts.append(kind)
    if expanded['gain']:
        parts.append(f'k{gain:g}')
    if expanded['gamma_o']:
        parts.append(f'go{gamma_o:g}')
    if expanded['gamma_t']:
        parts.append(f'gt{gamma_t:g}')
    return '_'.join(parts)


def _scenario_name(doc: ScenarioDocument) -> str:
    default_name = os.path.splitext(os.path.basename(doc.path))[0] if doc.path else 'scenario'
    name = doc.get('sim', 'name', default_name)
    if name in ('', '.') or '..' in name or any(c in name for c in '/\\\0'):
        raise doc.error("scenario name may not contain path separators or '..'", 'sim', 'name')
    return name


def build_scenarios(doc: ScenarioDocument, seed: int = None,
                    chain_dirs: Optional[Sequence[str]] = None) -> List[ScenarioConfig]:
    """
    One ScenarioConfig per combination of the listed controller kinds, gains
    and attenuation levels

    Args:
        seed: Overrides [sim] seed when given
        chain_dirs: When given, the chain file must resolve inside one of these
    """
    name = _scenario_name(doc)
    chain = _chain(doc, chain_dirs)
    q0 = _initial_joints(doc, chain)
    trajectory = _trajectory(doc, chain, q0)

    dt = doc.get('sim', 'dt', DEFAULT_DT)
    T = doc.get('sim', 'T', 5.0)
    seed = doc.get('sim', 'seed', 0) if seed is None else seed
    converge_tol = doc.get('sim', 'converge_tol')

    try:
        disturbances = DisturbancePair(
            v_w=_disturbance(doc, 'vw', seed, T),
            v_c=_disturbance(doc, 'vc', seed + 1, T),
        )
    except ConstraintViolationError as e:
        raise doc.error(str(e), 'disturbance', 'vw_kind')

    lists = {
        'kind': doc.get('controller', 'kind'),
        'gain': doc.get('controller', 'gain', [None]),
        'gamma_o': doc.get('controller', 'gamma_o', [None]),
        'gamma_t': doc.get('controller', 'gamma_t', [None]),
    }
    expanded = {k: len(v) > 1 for k, v in lists.items()}

    scenarios = []
    for kind, gain, gamma_o, gamma_t in itertools.product(
            lists['kind'], lists['gain'], lists['gamma_o'], lists['gamma_t']):
        controller = _controller(doc, kind, gain, gamma_o, gamma_t)
        try:
            scenarios.append(ScenarioConfig(
                name=_label(name, kind, gain, gamma_o, gamma_t, expanded),
                chain=chain,
                q0=q0,
                controller=controller,
                trajectory=trajectory,
                disturbances=disturbances,
                dt=dt,
                T=T,
                seed=seed,
                converge_tol=converge_tol,
                sigma_bound=doc.get('sim', 'sigma_bound', True),
            ))
        except ConstraintViolationError as e:
            raise doc.error(str(e), 'sim', 'dt')
    return scenarios


def load_scenarios(path: str, seed: int = None) -> List[ScenarioConfig]:
    doc = load(path)
    scenarios = build_scenarios(doc, seed=seed)
    log_json("info", "Configuration loaded",
        event_type="config_loaded",
        path=path,
        scenarios=[s.name for s in scenarios]
    )
    return scenarios

