"""Analysis manifests: JSON files describing a loop transfer function.

Example::

    {
      "expr": "K/(s^(3/2)*(s+1))",
      "constants": {"K": 1.0},
      "singularities": [
        {"b": [0, 0], "expansion": {"terms": [{"kappa": -1.5, "c": [1, 0]}],
                                    "kappa_max": -0.5}},
        {"b": [0, 1], "auto": true, "n_terms": 3},
        {"b": [0, 2], "pole": 1}
      ],
      "delta": 0.5,
      "options": {"omega_max": null, "puncture_eps": 1e-3, "tol_rad": 0.05}
    }

``kappa_max`` null (or absent) marks an exact, untruncated expansion.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import expr as ex
from .asymptotics import AsymExpansion
from .singularities import Declaration

__all__ = ["Manifest", "ManifestError", "load_manifest", "parse_manifest", "DEFAULT_OPTIONS"]

DEFAULT_OPTIONS = {
    "omega_max": None,       # automatic: first decade with |F(j Omega)| < 1e-3
    "puncture_eps": 1e-3,
    "tol_rad": 0.05,
    "delta": 0.5,
    "abscissa_min": 0.0,
}


class ManifestError(ValueError):
    pass


def _complex(v, what):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ManifestError(f"{what}: expected a number or [re, im], got {v!r}")


@dataclass
class Manifest:
    expr_text: str
    f: ex.Expr
    constants: dict
    declarations: list
    options: dict
    rhp_poles: int | None = None
    name: str = ""
    expected: dict = field(default_factory=dict)
    digest: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def axis_frequencies(self):
        return sorted({complex(d.location).imag for d in self.declarations
                       if complex(d.location).real == 0})


def parse_manifest(data, text=None):
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    if "expr" not in data:
        raise ManifestError("manifest has no 'expr'")
    consts = {k: _complex(v, f"constant {k!r}") for k, v in data.get("constants", {}).items()}
    try:
        f = ex.parse(data["expr"], {k: (v.real if v.imag == 0 else v) for k, v in consts.items()})
    except (ex.ExprSyntaxError, KeyError, ValueError) as e:
        raise ManifestError(f"expression: {e}") from e
    decls, seen = [], set()
    for i, item in enumerate(data.get("singularities", [])):
        if "b" not in item:
            raise ManifestError(f"singularity #{i} has no location 'b'")
        b = _complex(item["b"], f"singularity #{i} location")
        if b in seen:
            raise ManifestError(f"singularity location {b} declared twice")
        seen.add(b)
        if "expansion" in item:
            try:
                exp = AsymExpansion.from_dict(item["expansion"], location=[b.real, b.imag])
            except (KeyError, TypeError, ValueError) as e:
                raise ManifestError(f"singularity #{i} expansion: {e}") from e
            if exp.location != b:
                raise ManifestError(f"singularity #{i}: expansion location differs from 'b'")
            decls.append(Declaration(b, expansion=exp))
        elif "pole" in item:
            m = item["pole"]
            if not isinstance(m, int) or m < 1:
                raise ManifestError(f"singularity #{i}: pole order must be a positive integer")
            decls.append(Declaration(b, pole_order=m, n_terms=int(item.get("n_terms", 2))))
        elif item.get("auto"):
            decls.append(Declaration(b, auto=True, n_terms=int(item.get("n_terms", 3))))
        else:
            raise ManifestError(f"singularity #{i} needs 'expansion', 'pole' or 'auto'")
    options = dict(DEFAULT_OPTIONS)
    if "delta" in data:
        options["delta"] = float(data["delta"])
    for k, v in data.get("options", {}).items():
        if k not in DEFAULT_OPTIONS:
            raise ManifestError(f"unknown option {k!r}")
        options[k] = v
    rhp = data.get("rhp_poles")
    if rhp is not None and (not isinstance(rhp, int) or rhp < 0):
        raise ManifestError("rhp_poles must be a nonnegative integer")
    if text is None:
        text = json.dumps(data, sort_keys=True)
    digest = hashlib.sha256(text.encode()).hexdigest()
    return Manifest(data["expr"], f, consts, decls, options, rhp, data.get("name", ""),
                    data.get("expected", {}), digest, data)


def load_manifest(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path}: invalid JSON ({e})") from e
    return parse_manifest(data, text)
