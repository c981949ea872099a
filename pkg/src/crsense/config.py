"""Sweep configuration files.

Plain ``key = value`` lines; ``#`` starts a comment. Times are seconds and
SNRs are dB. ``n_pu`` may list several counts separated by commas, one
sweep per count::

    theta_alpha_s = 0.02
    theta_beta_s  = 0.02
    n_pu          = 1, 2, 3
    t_s_s         = 100e-6
    t_f_s         = 30e-3
    gamma_p_db    = -5
    gamma_s_db    = 10
    target_pd     = 0.9
    solver_tol    = 1e-9      # optional
"""
from __future__ import annotations

REQUIRED = (
    "theta_alpha_s",
    "theta_beta_s",
    "n_pu",
    "t_s_s",
    "t_f_s",
    "gamma_p_db",
    "gamma_s_db",
    "target_pd",
)
OPTIONAL = {"solver_tol": 1e-9, "multiplicity": "exact"}


class ConfigError(ValueError):
    def __init__(self, message, line=None, source="<config>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)
        self.line = line


def _number(key, raw, line, source):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}", line, source) from None
    return value


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into a dict of typed values (``n_pu`` is a list)."""
    seen = {}
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", lineno, source)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in REQUIRED and key not in OPTIONAL:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key][1]})", lineno, source)
        if not raw:
            raise ConfigError(f"{key}: missing value", lineno, source)
        seen[key] = (raw, lineno)

    missing = [k for k in REQUIRED if k not in seen]
    if missing:
        raise ConfigError(f"missing required key {missing[0]!r}", None, source)

    out = {}
    for key, (raw, lineno) in seen.items():
        if key == "n_pu":
            try:
                counts = [int(tok) for tok in raw.split(",")]
            except ValueError:
                raise ConfigError(f"n_pu: expected integers, got {raw!r}", lineno, source) from None
            if any(c < 1 for c in counts):
                raise ConfigError("n_pu: counts must be >= 1", lineno, source)
            out[key] = counts
        elif key == "multiplicity":
            if raw not in ("exact", "simplified"):
                raise ConfigError(f"multiplicity: expected 'exact' or 'simplified', got {raw!r}", lineno, source)
            out[key] = raw
        else:
            value = _number(key, raw, lineno, source)
            if key not in ("gamma_p_db", "gamma_s_db") and not value > 0:
                raise ConfigError(f"{key}: must be positive, got {raw}", lineno, source)
            if key == "target_pd" and not value < 1:
                raise ConfigError(f"target_pd: must lie in (0, 1), got {raw}", lineno, source)
            out[key] = value
    for key, default in OPTIONAL.items():
        out.setdefault(key, default)
    return out


def load_config(path) -> dict:
    with open(path) as fh:
        return parse_config(fh.read(), source=str(path))
