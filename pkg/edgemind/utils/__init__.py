"""Utility modules shared by the pipeline stages."""
