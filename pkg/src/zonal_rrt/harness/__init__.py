"""Map generation, benchmark orchestration, metrics, persistence and rendering."""
from .experiment import PlannerConfig, Scenario, TrialRecord, run_planner, run_scenario, run_trial
from .io import load_map, map_from_dict, map_hash, map_to_dict, save_map
from .mapgen import MapGenerationError, corner_query, corridor_detour_map, gen_forest_map
from .metrics import emit_csv, summarize
from .svg import emit_svg

__all__ = [
    "PlannerConfig", "Scenario", "TrialRecord", "run_planner", "run_scenario", "run_trial",
    "load_map", "save_map", "map_to_dict", "map_from_dict", "map_hash",
    "MapGenerationError", "corner_query", "corridor_detour_map", "gen_forest_map",
    "emit_csv", "summarize", "emit_svg",
]
