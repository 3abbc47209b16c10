"""Command line front end.

Five subcommands cover the library surface:

* ``solve``     closed-form MU vectors for a dimension (``--oracle`` also
                runs the numeric search and writes the match report)
* ``oracle``    raw numeric search against the reference Hadamard
* ``classify``  equivalence classes of MU basis sets in one dimension
* ``equiv``     compare two basis-set files, emit a replayable certificate
* ``verify``    exact complete-set audits plus the monomial identity catalog

Every invocation writes a run manifest next to its outputs.  The manifest
id is a digest over the command, parameters, config overrides, artifact
versions and output names; timing and placement live outside the digest,
so re-running the same command line reproduces byte-identical output
files.  Each output file references the manifest that produced it by id.

Angles are radians as decimal floats.  Exact phases are serialized as
(order, exponent) integer pairs, never floats.  ``MUB_ATLAS_SEED`` is
reserved but unused: every search is deterministic.

Exit codes: 0 success; 1 a semantic failure (classification mismatch,
failed verification, inequivalent sets, imperfect oracle match); 2 an
undecided equivalence; 3 usage errors or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .matrices import (
    ComplexMatrix,
    CycInt,
    CycMatrix,
    Mismatch,
    MuBasisSet,
    NotStandardForm,
    NotUnitary,
    PhaseMatrix,
    dephase,
)
from .solvers import (
    DomainError,
    UnknownName,
    build_named,
    solve_d2,
    solve_d3,
    solve_d4,
    tabulated_d5_vectors,
)
from .search import SearchConfig, match_against, match_to_json, result_to_json, search
from .classify import classify as classify_dimension
from .classify import verify_complete_set
from .equivalence import _sha256, are_equivalent, verify_identity_catalog

DEFAULT_TOL = 1e-8

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 3


class UsageError(ValueError):
    pass


class MalformedInput(ValueError):
    pass


# ---------------------------------------------------------------------------
# run manifests


@dataclass(frozen=True)
class RunManifest:
    """Record of one CLI invocation.

    The id hashes the reproducible part only; wall clock, timestamp and
    the output directory vary between reruns and stay out of the digest.
    """

    command: str
    parameters: dict
    config_overrides: dict
    artifact_versions: dict
    output_paths: tuple[str, ...]
    wall_clock_seconds: float
    timestamp_utc: str
    out_dir: str

    def _identity_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "config_overrides": self.config_overrides,
            "artifact_versions": self.artifact_versions,
            "output_paths": list(self.output_paths),
        }

    @property
    def manifest_id(self) -> str:
        return _sha256(self._identity_dict())

    def to_json_dict(self) -> dict:
        obj = self._identity_dict()
        obj["type"] = "run_manifest"
        obj["manifest_id"] = self.manifest_id
        obj["wall_clock_seconds"] = self.wall_clock_seconds
        obj["timestamp_utc"] = self.timestamp_utc
        obj["out_dir"] = self.out_dir
        return obj


def _artifact_versions() -> dict:
    def version_of(dist: str) -> str:
        try:
            return metadata.version(dist)
        except metadata.PackageNotFoundError:
            return "unknown"

    return {
        "mub_atlas": version_of("mub-atlas"),
        "numpy": version_of("numpy"),
        "scipy": version_of("scipy"),
        "python": platform.python_version(),
    }


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _emit(
    command: str,
    parameters: dict,
    overrides: dict,
    outputs: dict,
    out_dir: Path,
    started: float,
) -> RunManifest:
    """Stamp every output with the manifest id and write the lot."""
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        config_overrides=overrides,
        artifact_versions=_artifact_versions(),
        output_paths=tuple(sorted(outputs)),
        wall_clock_seconds=round(time.monotonic() - started, 6),
        timestamp_utc=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        out_dir=str(out_dir),
    )
    mid = manifest.manifest_id
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, payload in outputs.items():
        if name.endswith(".csv"):
            buf = io.StringIO()
            csv.writer(buf).writerows(payload)
            text = f"# manifest: {mid}\n" + buf.getvalue()
            (out_dir / name).write_text(text)
        else:
            payload["manifest"] = mid
            _write_json(out_dir / name, payload)
    _write_json(out_dir / "manifest.json", manifest.to_json_dict())
    return manifest


def _finish(args, manifest: RunManifest, primary: dict, human: list[str]) -> None:
    if args.json:
        print(json.dumps(primary, indent=2, sort_keys=True))
    else:
        for line in human:
            print(line)
        print(f"manifest {manifest.manifest_id[:12]} -> {manifest.out_dir}")


# ---------------------------------------------------------------------------
# basis-set files
#
# A set file is {"type": "mu_basis_set", "dim": d, "bases": [...]} where a
# basis is one of
#   {"kind": "identity"}
#   {"kind": "phase", "order": q, "exponents": [[int]]}
#   {"kind": "cyclotomic", "order": q, "scale": s, "entries": [[[int]]]}
#   {"kind": "named", "name": "H4", "params": {"y": 0.4, "z": 1.0}}
#   {"kind": "unitary", "entries": [[[re, im]]]}
# Mixed exact/float sets are lowered to the float backend.


def _basis_to_json(b) -> dict:
    if isinstance(b, PhaseMatrix):
        return {
            "kind": "phase",
            "order": b.order,
            "exponents": [list(row) for row in b.exps],
        }
    if isinstance(b, CycMatrix):
        return {
            "kind": "cyclotomic",
            "order": b.order,
            "scale": b.scale,
            "entries": [[list(e.coeffs) for e in row] for row in b.entries],
        }
    if isinstance(b, ComplexMatrix):
        return {
            "kind": "unitary",
            "entries": [[[z.real, z.imag] for z in row] for row in b.array],
        }
    arr = b.to_complex_array()
    return {
        "kind": "unitary",
        "entries": [[[z.real, z.imag] for z in row] for row in arr],
    }


def basis_set_to_json(mset: MuBasisSet) -> dict:
    return {
        "type": "mu_basis_set",
        "dim": mset.dim,
        "bases": [_basis_to_json(b) for b in mset.bases],
    }


def save_basis_set(mset: MuBasisSet, path: Union[str, Path]) -> None:
    _write_json(Path(path), basis_set_to_json(mset))


def _basis_from_json(dim: int, obj: dict):
    kind = obj.get("kind")
    if kind == "identity":
        return CycMatrix.identity(dim, 1)
    if kind == "phase":
        exps = tuple(tuple(int(e) for e in row) for row in obj["exponents"])
        return PhaseMatrix(dim, int(obj["order"]), exps)
    if kind == "cyclotomic":
        order = int(obj["order"])
        entries = tuple(
            tuple(CycInt(order, tuple(int(c) for c in e)) for e in row)
            for row in obj["entries"]
        )
        return CycMatrix(dim, order, int(obj["scale"]), entries)
    if kind == "named":
        return build_named(str(obj["name"]), **dict(obj.get("params", {})))
    if kind == "unitary":
        arr = np.array(
            [[complex(e[0], e[1]) for e in row] for row in obj["entries"]]
        )
        return ComplexMatrix(dim, arr)
    raise MalformedInput(f"unknown basis kind {kind!r}")


def basis_set_from_json(obj: dict, where: str = "<json>") -> MuBasisSet:
    try:
        if not isinstance(obj, dict) or obj.get("type") != "mu_basis_set":
            raise MalformedInput(f"{where}: not a mu_basis_set document")
        dim = int(obj["dim"])
        bases = tuple(_basis_from_json(dim, b) for b in obj["bases"])
        if not bases:
            raise MalformedInput(f"{where}: empty basis list")
        mset = MuBasisSet(dim, bases)
        return mset if mset.is_exact() else mset.to_float()
    except MalformedInput:
        raise
    except (KeyError, IndexError, TypeError, ValueError, Mismatch,
            UnknownName, DomainError) as exc:
        raise MalformedInput(f"{where}: {exc}") from None


def load_basis_set(path: Union[str, Path]) -> MuBasisSet:
    p = Path(path)
    try:
        obj = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{p}: {exc}") from None
    return basis_set_from_json(obj, where=str(p))


def _file_sha256(path: Path) -> str:
    import hashlib

    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# subcommands


def _reference_hadamard(d: int, x: Optional[float]):
    if d == 2:
        return build_named("F2")
    if d == 3:
        return build_named("F3")
    if d == 4:
        return build_named("F4", x=x)
    return build_named("F5")


def _check_x(args) -> Optional[float]:
    if args.d == 4:
        if args.x is None:
            raise UsageError("d=4 is a one-parameter problem: pass -x <radians>")
        return float(args.x)
    if args.x is not None:
        raise UsageError("-x applies only to d=4")
    return None


def _solution(d: int, x: Optional[float]):
    if d == 2:
        return solve_d2()
    if d == 3:
        return solve_d3()
    if d == 4:
        return solve_d4(x)
    return tabulated_d5_vectors()


def cmd_solve(args) -> int:
    started = time.monotonic()
    x = _check_x(args)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    solution = _solution(args.d, x)

    doc = solution.to_json_dict()
    outputs = {"solution.json": doc}
    human = [
        f"solve d={args.d}"
        + (f" x={x:.12g}" if x is not None else "")
        + f": {solution.n_discrete} discrete vectors, "
        + f"{solution.n_families} parametric families"
    ]
    parameters = {"d": args.d, "x": x, "tol": tol, "oracle": bool(args.oracle)}

    status = EXIT_OK
    if args.oracle:
        cfg = SearchConfig(grid_points_per_angle=args.grid)
        result = search(_reference_hadamard(args.d, x), cfg)
        report = match_against(result, solution, tol=tol)
        outputs["oracle.json"] = result_to_json(result)
        outputs["match.json"] = match_to_json(report)
        parameters["grid"] = cfg.resolved_grid(args.d)
        n_param = sum(1 for c in result.clusters if c.dimension > 0)
        human.append(
            f"oracle: {len(result.isolated)} isolated, "
            f"{n_param} parametric clusters; match "
            + ("perfect" if report.perfect else "IMPERFECT")
            + f" (max angle error {report.max_angle_error:.3e})"
        )
        if not report.perfect:
            status = EXIT_FAIL

    manifest = _emit("solve", parameters, _overrides(args), outputs,
                     Path(args.out), started)
    _finish(args, manifest, doc, human)
    return status


def cmd_oracle(args) -> int:
    started = time.monotonic()
    x = _check_x(args)
    cfg_kwargs: dict = {"grid_points_per_angle": args.grid}
    if args.tol is not None:
        cfg_kwargs["residual_accept"] = args.tol
    cfg = SearchConfig(**cfg_kwargs)
    result = search(_reference_hadamard(args.d, x), cfg)

    doc = result_to_json(result)
    parameters = {
        "d": args.d,
        "x": x,
        "grid": cfg.resolved_grid(args.d),
        "residual_accept": cfg.residual_accept,
    }
    manifest = _emit("oracle", parameters, _overrides(args),
                     {"oracle.json": doc}, Path(args.out), started)
    n_param = sum(1 for c in result.clusters if c.dimension > 0)
    human = [
        f"oracle d={args.d}: {len(result.isolated)} isolated vectors, "
        f"{n_param} parametric clusters "
        f"({result.n_converged}/{result.n_seeds} seeds converged)"
    ]
    _finish(args, manifest, doc, human)
    return EXIT_OK


def _classification_csv(report) -> list[list]:
    rows = [["dim", "n_bases", "classes", "parameters", "representatives"]]
    counts = report.counts()
    for r in sorted(counts):
        classes, params = counts[r]
        reps = " | ".join(
            e.representative for e in report.entries if e.n_bases == r
        )
        rows.append([report.dim, r, classes, params, reps])
    return rows


def cmd_classify(args) -> int:
    started = time.monotonic()
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    report = classify_dimension(args.d, tol)

    doc = report.to_json_dict()
    outputs = {
        "classification.json": doc,
        "classification.csv": _classification_csv(report),
    }
    parameters = {"d": args.d, "tol": tol, "no_expect": bool(args.no_expect)}
    manifest = _emit("classify", parameters, _overrides(args), outputs,
                     Path(args.out), started)
    _finish(args, manifest, doc, report.table().splitlines())
    if args.no_expect:
        return EXIT_OK
    return EXIT_OK if report.matches_expected else EXIT_FAIL


def cmd_equiv(args) -> int:
    started = time.monotonic()
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    path_a, path_b = Path(args.file_a), Path(args.file_b)
    set_a = load_basis_set(path_a)
    set_b = load_basis_set(path_b)
    try:
        std_a = dephase(set_a, tol)
        std_b = dephase(set_b, tol)
    except (NotUnitary, NotStandardForm, Mismatch) as exc:
        raise MalformedInput(f"input is not a MU basis set: {exc}") from None

    result = are_equivalent(std_a, std_b, tol)
    doc = {
        "type": "equivalence_certificate",
        "verdict": result.verdict,
        "tol": tol,
        "inputs": {
            "a": {"path": str(path_a), "sha256": _file_sha256(path_a)},
            "b": {"path": str(path_b), "sha256": _file_sha256(path_b)},
        },
        "result": result.to_json_dict(),
    }
    parameters = {
        "file_a": str(path_a),
        "file_b": str(path_b),
        "input_sha256": {
            "a": doc["inputs"]["a"]["sha256"],
            "b": doc["inputs"]["b"]["sha256"],
        },
        "tol": tol,
    }
    manifest = _emit("equiv", parameters, _overrides(args),
                     {"certificate.json": doc}, Path(args.out), started)
    _finish(args, manifest, doc, [f"verdict: {result.verdict}"])
    return {
        "equivalent": EXIT_OK,
        "inequivalent": EXIT_FAIL,
        "undecided": EXIT_UNDECIDED,
    }[result.verdict]


def cmd_verify(args) -> int:
    started = time.monotonic()
    dims = [args.d] if args.d is not None else [2, 3, 4, 5]
    audits = [verify_complete_set(d) for d in dims]
    catalog = verify_identity_catalog()
    all_ok = all(a.ok for a in audits) and all(e.holds for e in catalog)

    doc = {
        "type": "verification_report",
        "complete_sets": [a.to_json_dict() for a in audits],
        "identity_catalog": [e.to_json_dict() for e in catalog],
        "all_ok": all_ok,
    }
    parameters = {"dims": dims}
    manifest = _emit("verify", parameters, _overrides(args),
                     {"verification.json": doc}, Path(args.out), started)
    human = [
        f"complete set d={a.dim}: "
        + ("ok" if a.ok else "FAILED")
        + f" ({a.cross_overlaps} cross overlaps, exact)"
        for a in audits
    ]
    held = sum(e.holds for e in catalog)
    human.append(f"identity catalog: {held}/{len(catalog)} hold")
    _finish(args, manifest, doc, human)
    return EXIT_OK if all_ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument plumbing


class _Parser(argparse.ArgumentParser):
    # usage problems must not collide with the equiv verdict codes 0/1/2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_OVERRIDE_FLAGS = ("x", "grid", "tol", "oracle", "no_expect")


def _overrides(args) -> dict:
    out = {}
    for name in _OVERRIDE_FLAGS:
        val = getattr(args, name, None)
        if val is not None and val is not False:
            out[name] = val
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mub-atlas",
        description="solve, classify and certify mutually unbiased bases "
        "in dimensions 2 to 5",
        epilog="MUB_ATLAS_SEED is reserved and unused; runs are deterministic.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, d_required=True, d_choices=(2, 3, 4, 5)):
        if d_required:
            p.add_argument("-d", type=int, choices=d_choices, required=True,
                           help="dimension")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--json", action="store_true",
                       help="print the primary JSON document instead of a summary")

    p = sub.add_parser("solve", help="closed-form MU vectors")
    common(p)
    p.add_argument("-x", type=float, default=None,
                   help="Fourier-circle angle in radians (d=4 only)")
    p.add_argument("--grid", type=int, default=None,
                   help="oracle grid points per angle")
    p.add_argument("--tol", type=float, default=None,
                   help="oracle match tolerance (default 1e-8)")
    p.add_argument("--oracle", action="store_true",
                   help="also run the numeric search and match it")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="raw numeric search")
    common(p)
    p.add_argument("-x", type=float, default=None,
                   help="Fourier-circle angle in radians (d=4 only)")
    p.add_argument("--grid", type=int, default=None,
                   help="grid points per angle")
    p.add_argument("--tol", type=float, default=None,
                   help="residual acceptance threshold (default 1e-9)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("classify", help="equivalence classes in one dimension")
    common(p)
    p.add_argument("--tol", type=float, default=None,
                   help="float-backend tolerance (default 1e-8)")
    p.add_argument("--no-expect", action="store_true", dest="no_expect",
                   help="do not compare counts against the expected table")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("equiv", help="compare two basis-set files")
    common(p, d_required=False)
    p.add_argument("file_a", help="first mu_basis_set JSON file")
    p.add_argument("file_b", help="second mu_basis_set JSON file")
    p.add_argument("--tol", type=float, default=None,
                   help="float-backend tolerance (default 1e-8)")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("verify", help="complete-set audits and identity catalog")
    common(p, d_required=False)
    p.add_argument("-d", type=int, choices=(2, 3, 4, 5), default=None,
                   help="restrict the complete-set audit to one dimension")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, MalformedInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnknownName, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
