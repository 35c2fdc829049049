from .boundary import Boundary, Even, Free, Minus, Odd, Plus


def get_boundary_by_name(name: str) -> Boundary:
    if name == "plus":
        return Plus()
    elif name == "minus":
        return Minus()
    elif name == "free":
        return Free()
    elif name == "even":
        return Even()
    elif name == "odd":
        return Odd()
    else:
        msg = f"Unknown boundary: {name}, valid options are: plus, minus, free, even, odd"
        raise ValueError(msg)
