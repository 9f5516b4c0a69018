"""Experiment runner, reports and the command line."""
