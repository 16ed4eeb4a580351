"""Contextual fraction of empirical models via linear programming."""
