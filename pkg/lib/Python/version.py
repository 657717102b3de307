"""
aniso Version Management

Single source of truth for the library version. Every CLI artifact embeds
the value returned by get_version_string().
"""

VERSION = "0.4.0"

VERSION_INFO = {
    "major": 0,
    "minor": 4,
    "patch": 0,
    "prerelease": None,  # e.g., "beta", "rc1"
}


def get_version_string():
    """Get the full version string including prerelease if applicable."""
    base = VERSION
    if VERSION_INFO.get("prerelease"):
        return f"{base}-{VERSION_INFO['prerelease']}"
    return base


__version__ = VERSION
