"""File formats read and written by the command line and the pipeline."""

from .catalog import read_catalog, read_navgrid, write_catalog, write_navgrid
from .config import read_config
from .grid import read_grid, write_grid
from .index import read_hhi_queries, read_index, read_query, write_index, write_query
from .mesh import read_mesh, read_mesh_sequence, write_mesh, write_mesh_sequence
from .motion import read_hand_clip, read_motion, write_hand_clip, write_motion
from .orders import read_orders, write_orders
from .report import read_report, write_report
