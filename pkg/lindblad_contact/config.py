"""
Experiment configuration: presets, TOML config files and CLI overrides.

Precedence is CLI flags > config file > per-experiment presets.
"""

import os
from typing import Dict, List, Optional

try:
    import tomllib
except ImportError:
    # Python < 3.11
    import tomli as tomllib

from .csv_output import read_metadata_text
from .integrators import Scheme, steps_in_horizon
from .pmp import OcpConfig
from .presets import ExperimentPresets


class ExperimentConfig:
    """Fully resolved parameters of one experiment run."""

    # metadata order; also the set of keys accepted from files and flags
    KEYS = ('experiment', 'T', 'dt', 'gamma', 'alpha', 'u_max', 'beta', 'max_iters',
            'dJ_tol', 'grid_points', 'refine_iters', 'scheme', 'amplitude', 'refine',
            'out', 'dts')

    def __init__(self,
                 experiment: str,
                 T: float,
                 dt: float,
                 gamma: float,
                 alpha: float,
                 u_max: float,
                 beta: float,
                 max_iters: int,
                 dJ_tol: float,
                 grid_points: int,
                 refine_iters: int,
                 scheme: str,
                 amplitude: float,
                 refine: int,
                 out: str,
                 dts: Optional[List[float]] = None):

        if experiment not in ExperimentPresets.EXPERIMENT_CONFIGS:
            raise ValueError(f"Invalid experiment kind: {experiment}. "
                             f"Available options: {', '.join(ExperimentPresets.kinds())}")
        if int(refine) != refine or refine < 1:
            raise ValueError(f"Reference refine factor must be a positive integer, got {refine}")
        if not out:
            raise ValueError("Output directory must not be empty")

        self.experiment = experiment
        self.scheme = Scheme.parse(scheme)
        self.amplitude = float(amplitude)
        self.refine = int(refine)
        self.out = str(out)
        self.dts = [float(value) for value in (dts if dts else [dt])]

        # validates T/dt, rates, bounds and solver settings
        self.ocp = OcpConfig(T=T, dt=dt, gamma=gamma, alpha=alpha, u_max=u_max, beta=beta,
                             max_iters=max_iters, dJ_tol=dJ_tol, grid_points=grid_points,
                             refine_iters=refine_iters)

        if experiment == 'convergence':
            for value in self.dts:
                steps_in_horizon(self.ocp.T, value)
        if experiment == 'optimize' and abs(self.amplitude) > self.ocp.u_max:
            raise ValueError(f"Pulse amplitude {self.amplitude} exceeds the control bound "
                             f"u_max = {self.ocp.u_max}")

    def __getattr__(self, name):
        # OcpConfig fields (T, dt, gamma, ...) read through
        if name != 'ocp' and 'ocp' in self.__dict__ and name in OcpConfig.FIELDS:
            return getattr(self.ocp, name)
        raise AttributeError(name)

    @property
    def N(self) -> int:
        return self.ocp.N

    def to_dict(self) -> Dict:
        values = {
            'experiment': self.experiment,
            'scheme': self.scheme.value,
            'amplitude': self.amplitude,
            'refine': self.refine,
            'out': self.out,
            'dts': list(self.dts),
        }
        values.update(self.ocp.to_dict())
        return {key: values[key] for key in self.KEYS}


def load_config_file(path: str) -> Dict:
    """Flat key-value table from a TOML file or from an emitted CSV's metadata."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    if path.lower().endswith('.csv'):
        text = read_metadata_text(path)
    else:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    return tomllib.loads(text)


def _check_keys(values: Dict, source: str) -> None:
    unknown = sorted(set(values) - set(ExperimentConfig.KEYS))
    if unknown:
        raise ValueError(f"Unknown config keys in {source}: {', '.join(unknown)}. "
                         f"Allowed keys: {', '.join(ExperimentConfig.KEYS)}")


def parse_config(experiment: str, path: Optional[str] = None,
                 overrides: Optional[Dict] = None) -> ExperimentConfig:
    """Resolve presets, then the config file, then flag overrides (None = unset)."""
    values = ExperimentPresets.get_defaults(experiment)
    values['experiment'] = experiment

    if path:
        file_values = load_config_file(path)
        _check_keys(file_values, path)
        declared = file_values.get('experiment', experiment)
        if declared != experiment:
            raise ValueError(f"Config file {path} is for experiment '{declared}', "
                             f"not '{experiment}'")
        values.update(file_values)

    flags = {key: value for key, value in (overrides or {}).items() if value is not None}
    _check_keys(flags, 'command-line flags')
    values.update(flags)
    # an explicit single dt outside the convergence study drives the dt list
    if experiment != 'convergence':
        values['dts'] = [values['dt']]

    return ExperimentConfig(**values)
