"""
Process-wide singletons.

The suite registry is filled by `create_app()`; check modules and the CLI
import it from here instead of from app.py.
"""

from __future__ import annotations

import logging
import sys


class SuiteRegistry:
    def __init__(self):
        self._suites = {}

    def register(self, suite) -> None:
        if self._suites.get(suite.name) is suite:
            return
        if suite.name in self._suites:
            raise ValueError(f"suite {suite.name!r} registered twice")
        self._suites[suite.name] = suite

    def get(self, name: str):
        return self._suites[name]

    def names(self) -> tuple[str, ...]:
        return tuple(self._suites)

    def __iter__(self):
        return iter(self._suites.values())

    def __contains__(self, name: str) -> bool:
        return name in self._suites

    def __len__(self) -> int:
        return len(self._suites)


# bound in create_app()
suites = SuiteRegistry()
log = logging.getLogger("kosmann")


def init_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    log.setLevel(level.upper())
