from .cli import main, parse_cli
from .experiments import BenchConfig, CurveRow, run_curves, run_linreg_lbfgs, run_rosenbrock_sa
