"""Bundled example systems, reachable after installation."""

from importlib import resources

FIXTURE_NAMES = ("sum", "factorial", "twoclass", "filtered")


def fixture_text(name: str) -> str:
    """The source text of a bundled fixture, e.g. fixture_text("sum.lcstrs")."""
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def fixture_path(name: str) -> str:
    return str(resources.files(__package__).joinpath(name))
