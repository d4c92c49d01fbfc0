"""Command-line front end: classification, folding data, polynomial tables,
and the mode-level relation verifier, with deterministic JSON output.

Exit codes: 0 all pass, 1 relation failure, 2 input rejected, 3 window abort.
"""

from __future__ import annotations

import json
import sys

import click

from loomfold import catalog as catalog_mod
from loomfold.cartan import Gcm
from loomfold.errors import (
    JobError,
    LoomfoldError,
    NotAnAutomorphism,
    NotGcm,
    IndefiniteType,
    OutOfWindow,
    ScopeViolation,
)
from loomfold.folding import (
    fold_data,
    index_pairs,
    tuple_sets,
    tuple_sets_case_analysis,
    validate_aut,
)
from loomfold.polys import (
    LPoly,
    SerreFamily,
    drinfeld_poly_closed,
    drinfeld_poly_omega,
    family_f,
    family_p,
    family_qlimit,
    locality_poly,
)
from loomfold.presentation import Verifier, suite_window
from loomfold.realize import Realization

SCHEMA = 1


def _emit(payload: dict):
    payload = {"schema": SCHEMA, **payload}
    click.echo(json.dumps(payload, sort_keys=True, indent=2))


def _fail(code: int, kind: str, message: str):
    _emit({"error": {"kind": kind, "message": message}})
    sys.exit(code)


def _load_job(input_path: str | None, entry: str | None):
    if entry:
        ce = catalog_mod.entry_by_name(entry)
        return ce.gcm, ce.mu, ce.name
    if not input_path:
        raise JobError("provide --input FILE or --entry NAME")
    try:
        with open(input_path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"cannot read job file: {exc}") from exc
    if not isinstance(raw, dict) or "cartan" not in raw:
        raise JobError('job file must be an object with a "cartan" matrix')
    gcm = Gcm(raw["cartan"])
    mu = validate_aut(gcm, raw.get("mu", list(range(gcm.n))))
    return gcm, mu, raw.get("name", "job")


def _family(gcm, mu, selector: str) -> tuple[SerreFamily, bool]:
    """Returns (family, is_window_certificate)."""
    if selector == "p":
        return family_p(gcm, mu), False
    if selector == "qlimit":
        return family_qlimit(gcm, mu), True
    if selector.startswith("f:"):
        base = family_p(gcm, mu)
        extra = _load_extra_factors(selector[2:])
        return family_f(base, extra), False
    if selector.startswith("user:"):
        return _load_user_family(gcm, selector[5:]), True
    raise JobError(f"unknown family selector {selector!r}")


def _load_extra_factors(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"cannot read factor file: {exc}") from exc
    out = {}
    for item in raw.get("pairs", []):
        out[(int(item["i"]), int(item["j"]))] = LPoly.from_json(item["poly"])
    return out


def _load_user_family(gcm, path: str) -> SerreFamily:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError(f"cannot read family file: {exc}") from exc
    fam = SerreFamily(raw.get("name", "user"))
    for item in raw.get("pairs", []):
        i, j = int(item["i"]), int(item["j"])
        sigmas = {}
        for key, poly_json in item["terms"].items():
            sigma = tuple(int(x) for x in key.split(","))
            sigmas[sigma] = LPoly.from_json(poly_json)
        fam.entries[(i, j)] = sigmas
    if not fam.entries:
        raise JobError("family file holds no pairs")
    fam.assert_homogeneous()
    return fam


def _parse_window(text: str | None):
    if not text:
        return None
    try:
        m1, m2 = (int(x) for x in text.split(","))
        return m1, m2
    except ValueError as exc:
        raise JobError("--window expects M1,M2") from exc


@click.group()
def main():
    """Exact folding data, weight polynomials and relation checking."""


_input_opt = click.option("--input", "input_path", type=click.Path(), default=None)
_entry_opt = click.option("--entry", default=None, help="built-in catalog entry name")


@main.command()
@_input_opt
@_entry_opt
def classify(input_path, entry):
    """Classify the matrix and report its type label."""
    try:
        gcm, mu, name = _load_job(input_path, entry)
        cls = gcm.classify()
    except (JobError, NotGcm, NotAnAutomorphism, IndefiniteType) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    payload = {"name": name, **cls.to_json()}
    payload["label"] = cls.label
    if cls.kind == "affine":
        payload["null_labels"] = list(gcm.null_labels())
    _emit(payload)


@main.command()
@_input_opt
@_entry_opt
def fold(input_path, entry):
    """Orbit data, linking numbers and the root-tuple sets."""
    try:
        gcm, mu, name = _load_job(input_path, entry)
        fd = fold_data(gcm, mu)
        sets = tuple_sets(gcm, mu, fd)
    except (JobError, LoomfoldError) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    _emit(
        {
            "name": name,
            "classification": gcm.classify().to_json(),
            "fold": fd.to_json(gcm, mu),
            "tuples": sets.to_json(),
        }
    )


@main.command()
@_input_opt
@_entry_opt
@click.option("--family", "family_sel", default="p")
@click.option("--format", "fmt", type=click.Choice(["json", "latex"]), default="json")
@click.option("--crosscheck", "do_cross", is_flag=True, help="emit both weight constructions")
def polys(input_path, entry, family_sel, fmt, do_cross):
    """Locality and weight polynomial tables."""
    try:
        gcm, mu, name = _load_job(input_path, entry)
        fd = fold_data(gcm, mu)
        sets = tuple_sets(gcm, mu, fd)
        fam, _ = _family(gcm, mu, family_sel)
    except (JobError, LoomfoldError) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    pairs = []
    for i, j in index_pairs(gcm):
        om = drinfeld_poly_omega(sets, i, j, mu.order)
        cl = drinfeld_poly_closed(gcm, mu, fd, i, j)
        rec = {
            "pair": [i, j],
            "locality": locality_poly(gcm, mu, i, j).to_json(),
            "weight": om.to_json(),
        }
        if do_cross:
            rec["weight_closed"] = cl.to_json()
            rec["constructions_agree"] = om == cl
        pairs.append(rec)
    if fmt == "latex":
        lines = []
        for i, j in index_pairs(gcm):
            om = drinfeld_poly_omega(sets, i, j, mu.order)
            lines.append(rf"p_{{{i}{j}}}(z,w) &= {om.latex()} \\")
            lines.append(
                rf"f_{{{i}{j}}}(z,w) &= {locality_poly(gcm, mu, i, j).latex()} \\"
            )
        click.echo("\n".join(lines))
        return
    _emit({"name": name, "pairs": pairs, "family": fam.to_json()})


def _verify_one(gcm, mu, name, family_sel, mode_bound, window):
    fam, certificate_only = _family(gcm, mu, family_sel)
    if window is None:
        window = suite_window(gcm, mu, fam, mode_bound)
    real = Realization(gcm, mu, m1_window=window[0], m2_window=window[1])
    verifier = Verifier(real)
    report = verifier.verify_cartan_relations(mode_bound)
    report.extend(verifier.verify_locality_all(mode_bound))
    report.extend(verifier.verify_AS(mode_bound))
    if certificate_only:
        report.extend(verifier.verify_P1_at_window(fam, mode_bound))
        note = "window-scale certificate: a pass covers the tested grid only"
    else:
        report.extend(verifier.verify_serre_all(fam, mode_bound))
        note = None
    payload = {
        "name": name,
        "classification": gcm.classify().to_json(),
        "family": fam.name,
        "mode_bound": mode_bound,
        "window": {"m1": window[0], "m2": window[1]},
        "report": report.to_json(),
    }
    if note:
        payload["note"] = note
    return payload, report


@main.command()
@_input_opt
@_entry_opt
@click.option("--modes", "mode_bound", type=int, default=2)
@click.option("--family", "family_sel", default="p")
@click.option("--window", "window_text", default=None, help="M1,M2 (default: sized automatically)")
@click.option("--jobs", type=int, default=1, help="parallel jobs for --entry all")
def verify(input_path, entry, mode_bound, family_sel, window_text, jobs):
    """Check every relation of the presentation on the realization."""
    try:
        window = _parse_window(window_text)
        if entry == "all":
            names = [e.name for e in catalog_mod.load_entries()]
            payloads = _verify_many(names, family_sel, mode_bound, window, jobs)
            ok = all(p["report"]["pass"] for p in payloads)
            _emit({"entries": payloads, "pass": ok})
            sys.exit(0 if ok else 1)
        gcm, mu, name = _load_job(input_path, entry)
        payload, report = _verify_one(gcm, mu, name, family_sel, mode_bound, window)
    except OutOfWindow as exc:
        _fail(3, "OutOfWindow", str(exc))
        return
    except (JobError, ScopeViolation, LoomfoldError) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    _emit(payload)
    sys.exit(0 if report.passed else 1)


def _verify_worker(args):
    name, family_sel, mode_bound, window = args
    ce = catalog_mod.entry_by_name(name)
    payload, _ = _verify_one(ce.gcm, ce.mu, name, family_sel, mode_bound, window)
    return payload


def _verify_many(names, family_sel, mode_bound, window, jobs):
    tasks = [(n, family_sel, mode_bound, window) for n in names]
    if jobs <= 1:
        return [_verify_worker(t) for t in tasks]
    import multiprocessing as mp

    with mp.get_context("spawn").Pool(jobs) as pool:
        return pool.map(_verify_worker, tasks)


@main.command()
@_input_opt
@_entry_opt
def crosscheck(input_path, entry):
    """Dual-construction checks: weights and root-tuple sets, plus the
    observed weight symmetry per ordered pair."""
    try:
        gcm, mu, name = _load_job(input_path, entry)
        fd = fold_data(gcm, mu)
        sets = tuple_sets(gcm, mu, fd)
        oracle = tuple_sets_case_analysis(gcm, mu, fd)
    except (JobError, LoomfoldError) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    pairs = []
    all_ok = True
    for i, j in index_pairs(gcm):
        om = drinfeld_poly_omega(sets, i, j, mu.order)
        cl = drinfeld_poly_closed(gcm, mu, fd, i, j)
        ps, qs = sets[(i, j)], oracle[(i, j)]
        tuples_agree = (
            ps.upsilon == qs.upsilon
            and ps.upsilon_real == qs.upsilon_real
            and ps.upsilon_imag == qs.upsilon_imag
        )
        rev = drinfeld_poly_omega(sets, j, i, mu.order) if (j, i) in sets.pairs else None
        rec = {
            "pair": [i, j],
            "weights_agree": om == cl,
            "tuple_sets_agree": tuples_agree,
            "weight": om.to_json(),
        }
        if rev is not None:
            rec["pair_symmetric"] = om == rev.rename(om.vars)
        all_ok = all_ok and rec["weights_agree"] and tuples_agree
        pairs.append(rec)
    _emit({"name": name, "pairs": pairs, "pass": all_ok})
    sys.exit(0 if all_ok else 1)


@main.command("catalog")
@click.option("--path", default=None, help="explicit catalog file")
def catalog_cmd(path):
    """List catalog entries with their classifications."""
    try:
        entries = catalog_mod.load_entries(path)
        listing = []
        for e in entries:
            cls = e.gcm.classify()
            listing.append({**e.to_json(), "label": cls.label, "order": e.mu.order})
    except (JobError, LoomfoldError) as exc:
        _fail(2, type(exc).__name__, str(exc))
        return
    _emit({"entries": listing})


if __name__ == "__main__":
    main()
