from .render import PlotSpec, render, read_spectrum, read_limit

__all__ = ["PlotSpec", "render", "read_spectrum", "read_limit"]
