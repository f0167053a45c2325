from .grid import DEFAULT_GRID, grid_points, grid_search, load_grid
from .model import (DEFAULT_HYPER, FAMILIES, ModelArtifact, load_model, predict, predict_many,
                    save_model, scores, train)

__all__ = ["DEFAULT_GRID", "grid_points", "grid_search", "load_grid", "DEFAULT_HYPER", "FAMILIES",
           "ModelArtifact", "load_model", "predict", "predict_many", "save_model", "scores", "train"]
