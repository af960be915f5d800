"""Synthetic mobility traces with corridors and daily load patterns."""
from edgemind.mobsim.generator import corridor_membership, generate_topology, simulate
from edgemind.mobsim.presets import PRESETS, build_preset

__all__ = ["PRESETS", "build_preset", "corridor_membership", "generate_topology", "simulate"]
