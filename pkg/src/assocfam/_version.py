"""Version of the installed ``assocfam`` distribution.

``assocfam --version`` prints it. A source tree that was never installed
reports :data:`UNINSTALLED_VERSION`.
"""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

DISTRIBUTION = "assocfam"
UNINSTALLED_VERSION = "0.0.0.dev0"


def distribution_version(name: str = DISTRIBUTION) -> str:
    try:
        return version(name)
    except PackageNotFoundError:
        return UNINSTALLED_VERSION


__version__ = distribution_version()
