"""Size caps. Overridable through ``SYMPAIR_CAPS=order:classes:h2``."""
import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Caps:
    order: int = 200_000          # full element indexing
    classes: int = 512            # character table linear algebra
    h2: int = 64                  # cochain complexes for H^2
    automorphism_search: int = 512
    table: int = 2048             # full multiplication table
    verify_exhaustive: int = 4096


def caps_from_env(env=None):
    env = os.environ if env is None else env
    caps = Caps()
    raw = env.get("SYMPAIR_CAPS")
    if not raw:
        return caps
    fields = ("order", "classes", "h2")
    values = {}
    parts = raw.split(":")
    if len(parts) > len(fields):
        raise ValueError(f"SYMPAIR_CAPS={raw!r}: expected at most order:classes:h2")
    for name, part in zip(fields, parts):
        if part.strip():
            values[name] = int(part)
            if values[name] < 1:
                raise ValueError(f"SYMPAIR_CAPS={raw!r}: caps must be positive")
    return replace(caps, **values)


# a malformed SYMPAIR_CAPS falls back to the defaults here and is reported by the CLI
try:
    CAPS = caps_from_env()
    ENV_ERROR = None
except ValueError as e:
    CAPS = Caps()
    ENV_ERROR = f"bad SYMPAIR_CAPS: {e}"


def set_caps(**kwargs):
    """Replace the process-wide caps; returns the previous value."""
    global CAPS
    old = CAPS
    CAPS = replace(CAPS, **kwargs)
    return old


def get_caps():
    return CAPS
