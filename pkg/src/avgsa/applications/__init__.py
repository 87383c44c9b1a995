"""Ready-to-run financial experiments built on the engine and streams."""

from avgsa.applications import bandit, correlation, darkpool, investment, varcvar  # noqa: F401
