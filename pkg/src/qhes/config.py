"""Experiment configuration files.

INI layout (JSON with the same section/key structure is also accepted)::

    [hamiltonian]
    model = ising          # built-in chain, needs n
    n = 2
    # or: file = chain.ham (path relative to this file)
    # or: terms = n_qubits 2
    #         -0.5 ZZ

    [filter]
    R = 5                  # Q, W, C, eps default from N and R
    strategy = frozen
    decision_cut = 0.5
    repeats = 1
    delta = 0.1            # fixed-point residual
    p_min = 0.125          # default 1/(2 * 2**N)

    [coin]
    E_g = -1.0             # default: exact ground energy
    gap = 2.0              # default: exact gap at E_g
    eps = 1e-7
    K = 7                  # default: smallest counter for the designed M
    M = 64                 # optional: fixed coin count instead of designing it

    [run]
    seed = 0
    shots = 0
"""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .amplify import FixedPointConfig
from .dirac import CoinConfig
from .eigensolver import default_p_min
from .errors import ConfigError, ParseError
from .hamiltonian import PauliHamiltonian, ising_chain
from .heaviside import FilterConfig

_SECTIONS = ("hamiltonian", "filter", "coin", "run")


@dataclass
class RunConfig:
    hamiltonian: PauliHamiltonian
    filter: FilterConfig | None = None
    strategy: str = "frozen"
    decision_cut: float = 0.5
    repeats: int = 1
    amp: FixedPointConfig | None = None
    coin: dict = field(default_factory=dict)
    seed: int = 0
    shots: int = 0
    source: str = "<memory>"


def _load_sections(path: Path) -> dict[str, dict[str, str]]:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, e.lineno, e.colno) from None
        if not isinstance(raw, dict):
            raise ParseError("top level of a JSON config must be an object")
        return {str(k).lower(): {str(a).lower(): v for a, v in (sec or {}).items()} for k, sec in raw.items()}
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=str(path))
    except configparser.ParsingError as e:
        errors = getattr(e, "errors", None)
        lineno, line = errors[0] if errors else (getattr(e, "lineno", None), getattr(e, "line", ""))
        raise ParseError(f"cannot parse {line!r}", lineno) from None
    except configparser.Error as e:
        raise ParseError(str(e).splitlines()[0], getattr(e, "lineno", None)) from None
    return {s.lower(): dict(parser.items(s)) for s in parser.sections()}


def _get(section: dict, key: str, kind, default=None):
    if key not in section or section[key] in ("", None):
        return default
    value = section[key]
    try:
        if kind is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} = {value!r} is not a valid {kind.__name__}") from None


def _hamiltonian(section: dict, base: Path) -> PauliHamiltonian:
    model = section.get("model")
    if model:
        if str(model).lower() != "ising":
            raise ConfigError(f"unknown model {model!r}; the built-in model is 'ising'")
        n = _get(section, "n", int)
        if n is None:
            raise ConfigError("model = ising needs n")
        return ising_chain(n)
    if "file" in section:
        return PauliHamiltonian.parse((base / str(section["file"])).read_text())
    if "terms" in section:
        return PauliHamiltonian.parse(str(section["terms"]))
    raise ConfigError("[hamiltonian] needs one of model, file or terms")


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    sections = _load_sections(path)
    unknown = set(sections) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    return build_config(sections, path.parent, str(path))


def build_config(sections: dict, base: Path = Path("."), source: str = "<memory>") -> RunConfig:
    hsec = sections.get("hamiltonian")
    if not hsec:
        raise ConfigError("missing [hamiltonian] section")
    h = _hamiltonian(hsec, base)
    n = h.n_qubits
    fsec = sections.get("filter", {})
    filt = None
    R = _get(fsec, "r", int)
    if R is not None:
        filt = FilterConfig.default(
            n, R,
            Q=_get(fsec, "q", int), W=_get(fsec, "w", int),
            C=_get(fsec, "c", int), eps=_get(fsec, "eps", float),
        )
    amp = FixedPointConfig(_get(fsec, "delta", float, 0.1), _get(fsec, "p_min", float, default_p_min(n)))
    csec = sections.get("coin", {})
    coin = {
        "E_g": _get(csec, "e_g", float),
        "gap": _get(csec, "gap", float),
        "eps": _get(csec, "eps", float, 1e-7),
        "K": _get(csec, "k", int),
        "M": _get(csec, "m", int),
    }
    rsec = sections.get("run", {})
    strategy = str(fsec.get("strategy", "frozen"))
    if strategy not in ("frozen", "primary"):
        raise ConfigError(f"strategy must be 'frozen' or 'primary', got {strategy!r}")
    return RunConfig(
        hamiltonian=h,
        filter=filt,
        strategy=strategy,
        decision_cut=_get(fsec, "decision_cut", float, 0.5),
        repeats=_get(fsec, "repeats", int, 1),
        amp=amp,
        coin=coin,
        seed=_get(rsec, "seed", int, 0),
        shots=_get(rsec, "shots", int, 0),
        source=source,
    )


def coin_config(run: RunConfig) -> CoinConfig | None:
    """Fixed coin settings when ``M`` is given explicitly, else None (design from the gap)."""
    M = run.coin.get("M")
    if M is None:
        return None
    K = run.coin.get("K") or max(1, math.ceil(math.log2(M)) + 1)
    return CoinConfig(M, K)
