"""Figure rendering for swarmstore sweep CSVs (schema v1).

Read-only consumer of the simulator's output files: it recomputes
nothing beyond per-policy means and bands.
"""

from .figures import (EmptyDeliveries, plot_reliability, plot_speed_hist,
                      plot_storage)
from .io import SchemaError, discover_runs, read_series

__version__ = "0.1.0"
