from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from kacward.core.onsager import coupling_grid
from kacward.utils.env_utils import load_config_and_dotenv

COMMANDS = ('brute', 'graphs', 'identity', 'amplitude', 'trace', 'free-energy', 'critical', 'thermo', 'verify')

Command = Literal['brute', 'graphs', 'identity', 'amplitude', 'trace', 'free-energy', 'critical', 'thermo',
                  'verify']
OutputFormat = Literal['json', 'csv', 'text']


class RunConfig(BaseModel):
    """
    One invocation of a kacward route, from command-line flags or from an entry of a YAML `runs:` list.

    Parameters:
        command (str): The route to run.
        name (str): Optional label used by `kacward run` and the HTTP /run endpoint.
        N (int): Lattice size.
        K (float): Single coupling; mutually exclusive with the kmin/kmax/steps grid.
        kmin (float): First coupling of a grid.
        kmax (float): Last coupling of a grid.
        steps (int): Number of grid points.
        max_order (int): Highest power of u compared, or longest path kept.
        quad_res (int): Nodes per axis of the periodic quadrature.
        n (int): Step count for amplitude and trace routes.
        x (int): Target column for the amplitude route.
        y (int): Target row for the amplitude route.
        direction (str): Arrival direction U, D, L or R; omitted sums all four.
        u (float): Weight per step for amplitude and trace routes.
        method (str): Free-energy route, 'grid' or 'line'; free-energy defaults to 'grid' and thermo to 'line'.
        format (str): Output format.
        out (str): Output path; standard output when omitted.
    """
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    command: Command
    name: Optional[str] = None
    N: Optional[int] = Field(None, ge=1)
    K: Optional[float] = None
    kmin: Optional[float] = None
    kmax: Optional[float] = None
    steps: Optional[int] = Field(None, ge=1)
    max_order: int = Field(8, ge=0)
    quad_res: Optional[int] = Field(None, gt=0)
    n: int = Field(4, ge=0)
    x: int = 0
    y: int = 0
    direction: Optional[Literal['U', 'D', 'L', 'R']] = None
    u: float = 0.2
    method: Optional[Literal['grid', 'line']] = None
    format: OutputFormat = 'text'
    out: Optional[str] = None

    @model_validator(mode='after')
    def check_couplings(self) -> 'RunConfig':
        grid = (self.kmin, self.kmax, self.steps)
        if self.K is not None and any(v is not None for v in grid):
            raise ValueError("--K cannot be combined with a --kmin/--kmax/--steps grid")
        if (self.kmin is None) != (self.kmax is None) or (self.steps is not None and self.kmin is None):
            raise ValueError("a coupling grid needs both --kmin and --kmax")
        if self.kmin is not None and self.kmin > self.kmax:
            raise ValueError(f"kmin={self.kmin} exceeds kmax={self.kmax}")
        if self.command in ('brute', 'graphs', 'identity') and self.N is None:
            raise ValueError(f"'{self.command}' needs --N")
        if self.command == 'thermo' and self.K is None and self.kmin is None:
            raise ValueError("'thermo' needs --K or a --kmin/--kmax grid")
        if self.format == 'csv' and self.command != 'thermo':
            raise ValueError("csv output is only available for 'thermo'")
        return self

    def couplings(self):
        """The couplings this run evaluates, in increasing order."""
        if self.K is not None:
            return [self.K]
        if self.kmin is None:
            return []
        return coupling_grid(self.kmin, self.kmax, self.steps or 1)


def load_run_configs(config_file_path: str, env_file_path: str = None) -> List[RunConfig]:
    """
    Load the YAML configuration file and optionally a .env file, and validate every entry of its
    `runs:` list.

    Parameters:
        config_file_path (str): Path to the YAML configuration file.
        env_file_path (str): Path to the .env file.

    Returns:
        list: One RunConfig per entry, in file order.
    """
    config = load_config_and_dotenv(config_file_path, env_file_path)

    runs = config.get('runs')
    if not isinstance(runs, list):
        raise ValueError(f"Config file {config_file_path} needs a 'runs:' list")

    return [RunConfig(**params) for params in runs]
