from .app import app, run_check, run_explain, run_orient, run_selftest

__all__ = ["app", "run_check", "run_explain", "run_orient", "run_selftest"]
