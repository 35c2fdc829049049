from .boundary import Boundary, Even, Fixed, Free, Minus, Odd, Plus
from .configuration import SpinConfig
from .obstacle_env import ObstacleEnv
from .region import Region, hardcore_region, ising_region
from .sampling import (
    galton_watson_reach_probability,
    galton_watson_survival,
    obstacles_from_quench,
    sample_bernoulli_spins,
    sample_obstacles_iid,
)
from .tree_shape import (
    TreeShape,
    ancestor_table,
    build_tree,
    descendants_at_depth,
    level_start,
    path_to_descendant,
    subtree_vertices,
)
from .utils import get_boundary_by_name
