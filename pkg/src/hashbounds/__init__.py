"""Cluster expansion bounds and Moser-Tardos construction of perfect and separating hash families."""
