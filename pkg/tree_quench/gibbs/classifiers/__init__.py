from .consecutive_regular_classifier import ConsecutiveRegularClassifier
from .obstacle_count_classifier import CriticalFieldClassifier, ObstacleCountClassifier, ZeroFieldClassifier
from .utils import get_classifier_by_name
from .vertex_classifier import OffPathChildren, VertexClassifier, off_path_children
