"""File formats for complexes, structures, morphisms, and retract data.

Everything is JSON-compatible text.  Matrices are stored column-major:
one list per source basis vector, each listing the coordinates of its
image.  Rational entries are integers or "p/q" strings; no floats are
ever read or written.
"""

import json
import os
import tempfile
from fractions import Fraction

from .exactlin import (
    ChainComplex,
    GradedMap,
    GradedVectorSpace,
    tensor_power,
    tensor_spaces,
)
from .ainfty import AInfinityAlgebra, AInfinityMorphism
from .operadcore import builtin_presentation


# -------------------------------------------------------------- rationals


def dump_fraction(x):
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(v):
    if isinstance(v, bool):
        raise ValueError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise ValueError(f"not a rational: {v!r} (floats are not accepted)")


# --------------------------------------------------------------- matrices


def _matrix_to_cols(mat):
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    return [[dump_fraction(mat[i][j]) for i in range(rows)]
            for j in range(cols)]


def _cols_to_matrix(cols, nrows, ncols):
    if len(cols) != ncols:
        raise ValueError(f"expected {ncols} columns, got {len(cols)}")
    for c in cols:
        if len(c) != nrows:
            raise ValueError(f"expected columns of length {nrows}")
    return [[parse_fraction(cols[j][i]) for j in range(ncols)]
            for i in range(nrows)]


def map_to_data(m: GradedMap) -> dict:
    return {"degree": m.degree,
            "blocks": {str(k): _matrix_to_cols(mat)
                       for k, mat in sorted(m.blocks.items())}}


def map_from_data(data, source, target) -> GradedMap:
    degree = int(data["degree"])
    blocks = {}
    for k_str, cols in data.get("blocks", {}).items():
        k = int(k_str)
        blocks[k] = _cols_to_matrix(cols, target.dim(k + degree),
                                    source.dim(k))
    return GradedMap(source, target, degree, blocks)


# -------------------------------------------------------------- complexes


def complex_to_data(c: ChainComplex) -> dict:
    data = {"dims": {str(k): n for k, n in sorted(c.space.dims.items())},
            "differential": {str(k): _matrix_to_cols(mat)
                             for k, mat in sorted(
                                 c.differential.blocks.items())}}
    default = GradedVectorSpace(c.space.dims)
    if c.space.labels != default.labels:
        data["labels"] = {str(k): list(v)
                          for k, v in sorted(c.space.labels.items())}
    return data


def complex_from_data(data) -> ChainComplex:
    dims = {int(k): int(n) for k, n in data["dims"].items()}
    labels = None
    if "labels" in data:
        labels = {int(k): tuple(v) for k, v in data["labels"].items()}
    space = GradedVectorSpace(dims, labels)
    blocks = {}
    for k_str, cols in data.get("differential", {}).items():
        k = int(k_str)
        blocks[k] = _cols_to_matrix(cols, space.dim(k - 1), space.dim(k))
    return ChainComplex(space, GradedMap(space, space, -1, blocks))


# ------------------------------------------------- structures & morphisms


def algebra_to_data(a: AInfinityAlgebra) -> dict:
    return {"kind": "ainf",
            "complex": complex_to_data(a.complex),
            "operations": {str(n): map_to_data(a.mu(n))
                           for n in sorted(a._mu) if not a.mu(n).is_zero()},
            "N": a.N}


def algebra_from_data(data) -> AInfinityAlgebra:
    c = complex_from_data(data["complex"])
    ops = {}
    for n_str, md in data.get("operations", {}).items():
        n = int(n_str)
        ops[n] = map_from_data(md, tensor_power(c.space, n), c.space)
    return AInfinityAlgebra(c, ops, int(data["N"]))


def morphism_to_data(m: AInfinityMorphism) -> dict:
    return {"kind": "morphism",
            "source": algebra_to_data(m.source),
            "target": algebra_to_data(m.target),
            "components": {str(n): map_to_data(m.f(n))
                           for n in sorted(m._f) if not m.f(n).is_zero()},
            "N": m.N}


def morphism_from_data(data) -> AInfinityMorphism:
    src = algebra_from_data(data["source"])
    tgt = algebra_from_data(data["target"])
    comps = {}
    for n_str, md in data.get("components", {}).items():
        n = int(n_str)
        comps[n] = map_from_data(md, tensor_power(src.space, n), tgt.space)
    return AInfinityMorphism(src, tgt, comps, int(data["N"]))


# ------------------------------------------------------------ retract data


def sdr_to_data(s) -> dict:
    return {"kind": "sdr",
            "big": complex_to_data(s.big),
            "small": complex_to_data(s.small),
            "nabla": map_to_data(s.nabla),
            "f": map_to_data(s.f),
            "phi": map_to_data(s.phi)}


def sdr_from_data(data):
    from .transfer import SDRData
    big = complex_from_data(data["big"])
    small = complex_from_data(data["small"])
    return SDRData(big, small,
                   map_from_data(data["nabla"], small.space, big.space),
                   map_from_data(data["f"], big.space, small.space),
                   map_from_data(data["phi"], big.space, big.space))


def action_from_data(data):
    """Resolution-action file: a named built-in presentation, one complex
    per color, and one assigned map (or null) per generator."""
    pres = builtin_presentation(data["presentation"])
    complexes = {c: complex_from_data(cd)
                 for c, cd in data["complexes"].items()}
    assignment = {}
    for name, g in pres.generators.items():
        source = tensor_spaces([complexes[c].space for c in g.inputs])
        target = complexes[g.output].space
        md = data.get("assignment", {}).get(name)
        if md is None:
            assignment[name] = GradedMap.zero(source, target, g.degree)
        else:
            assignment[name] = map_from_data(md, source, target)
    return pres, assignment, complexes


# ------------------------------------------------------------------ files


def load(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}, column "
                             f"{exc.colno}: {exc.msg}") from exc


def dump(path, data):
    """Serialize to path, atomically (write-then-rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_raw(path, text):
    """Write already-rendered text to path, atomically."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def structure_from_data(data):
    kind = data.get("kind")
    if kind == "ainf":
        return algebra_from_data(data)
    if kind == "morphism":
        return morphism_from_data(data)
    if kind == "sdr":
        return sdr_from_data(data)
    raise ValueError(f"unknown structure kind {kind!r}")
