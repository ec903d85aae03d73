import os
from artgallery.geometry import Polygon, make_polygon, read_polygon, sees, visibility_polygon, kernel
from artgallery.engine import SolveConfig, Solver, run_lp_mode, run_ip_mode
from artgallery.bench import GenSpec, generate, koch_polygon, orthogonal_polygon, simple_polygon, spike_polygon

__all__ = ['Polygon', 'make_polygon', 'read_polygon', 'sees', 'visibility_polygon', 'kernel',
           'SolveConfig', 'Solver', 'run_lp_mode', 'run_ip_mode', 'GenSpec', 'generate']

# Separators run by each --cuts choice
CUT_CONFIGS = {
    "none": (),
    "ec": ("ec",),
    "sc3": ("sc3",),
    "sc4": ("sc4",),
    "sc3+ec": ("sc3", "ec")
}

_INSTANCE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "resources", "instances")

INSTANCES = {
    "triangle_hole": {
        "polygon_path": os.path.join(_INSTANCE_DIR, "triangle_hole.poly"),
        "checkpoint_path": os.path.join(_INSTANCE_DIR, "triangle_hole.json")
    },
    "pentagon_ring": {
        "polygon_path": os.path.join(_INSTANCE_DIR, "pentagon_ring.poly"),
        "checkpoint_path": os.path.join(_INSTANCE_DIR, "pentagon_ring.json")
    },
    "spiked_star": {
        "polygon_path": os.path.join(_INSTANCE_DIR, "spiked_star.poly"),
        "checkpoint_path": os.path.join(_INSTANCE_DIR, "spiked_star.json")
    },
    "spiked_pocket": {
        "polygon_path": os.path.join(_INSTANCE_DIR, "spiked_pocket.poly"),
        "checkpoint_path": os.path.join(_INSTANCE_DIR, "spiked_pocket.json")
    },
    "square": {
        "polygon_path": os.path.join(_INSTANCE_DIR, "square.poly"),
        "checkpoint_path": os.path.join(_INSTANCE_DIR, "square.json")
    }
}

GENERATORS = {
    "koch": koch_polygon,
    "orthogonal": orthogonal_polygon,
    "simple": simple_polygon,
    "spike": spike_polygon
}

SCHEMA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "resources", "schemas")


def get_instance_paths():
    return [INSTANCES[i]["polygon_path"] for i in INSTANCES.keys()]


def load_instance(name: str) -> Polygon:
    if name not in INSTANCES:
        raise ValueError(f"unknown instance '{name}', expected one of {list(INSTANCES)}")
    return read_polygon(INSTANCES[name]["polygon_path"])
