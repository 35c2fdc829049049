from .consecutive_regular_classifier import ConsecutiveRegularClassifier
from .obstacle_count_classifier import CriticalFieldClassifier, ZeroFieldClassifier
from .vertex_classifier import VertexClassifier


def get_classifier_by_name(name: str, margin: float | None = None) -> VertexClassifier:
    if name == "a":
        return ConsecutiveRegularClassifier(margin)
    elif name == "b":
        return ZeroFieldClassifier(margin)
    elif name == "c":
        return CriticalFieldClassifier(margin)
    else:
        msg = f"Unknown classifier: {name}, valid options are: a, b, c"
        raise ValueError(msg)
