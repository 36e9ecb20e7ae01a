"""
Command layer shared by ``run_verify.py`` and the HTTP service.

Every ``cmd_*`` function returns a RunReport and never raises; exceptions
become error reports with exit code 2.
"""

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import sympy

from .coeff import Specialization
from .config import ConfigError, Settings, load_settings
from .demazure import demazure_certificates
from .enumeration import BudgetExceededError, EnumerationResult, enumerate_algebra, verify_result
from .presentations import Presentation, UnknownPresentationError, catalogue, catalogue_names, group_specialization
from .reports import Certificate, RunReport, build_report, error_report
from .rewrite import check_trace, load_trace, representation_check, shipped_traces
from .spanning import (
    a3_family, ariki_koike_family, ariki_koike_relations, central_element_check, certify_candidate_1296,
    certify_spanning, load_words, parabolic_family,
)
from .witness import check_relations, growth_witness, load_witness, torsion_witness, witness_names

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ProgressCallback = Optional[Callable[[str, int], None]]

# family -> (presentation, word list builder)
FAMILIES = {
    "candidate-1296": ("G26", None),
    "a3": ("G4", a3_family),
    "parabolic": ("G26-parabolic-s2t", parabolic_family),
    "ariki-koike": ("Gd12(3)", lambda: ariki_koike_family(3)),
}

# random points per trace in verify-all; the G26 ones are cached by criterion_g26
TRACE_POINTS = {"G26": 2}

USAGE_ERRORS = (BudgetExceededError, ConfigError, UnknownPresentationError, ValueError, KeyError, OSError)


def _run(command: str, inputs: Dict[str, Any], body: Callable[[], tuple]) -> RunReport:
    """Time ``body`` -> (certificates, payload) and wrap it in a report."""
    started = time.time()
    try:
        certificates, payload = body()
    except USAGE_ERRORS as e:
        logger.error(f"❌ {command} failed: {e}")
        return error_report(command, inputs, f"{type(e).__name__}: {e}", time.time() - started)
    except Exception as e:
        logger.exception(f"❌ {command} crashed")
        return error_report(command, inputs, f"internal error: {type(e).__name__}: {e}", time.time() - started)
    return build_report(command, inputs, certificates, payload, round(time.time() - started, 3))


def dimension_certificate(r: EnumerationResult, expected: Optional[int]) -> Certificate:
    name = f"dimension:{r.presentation}"
    details = {"dimension": r.dimension, "expected": expected, "specialization": r.specialization.as_strings()}
    if expected is not None and r.dimension != expected:
        return Certificate(name=name, certified=False, error=f"dimension {r.dimension}, expected {expected}",
                           details=details)
    return Certificate(name=name, certified=True, details=details)


def choose_specialization(p: Presentation, settings: Settings, spec: Optional[str] = None,
                          seed: Optional[int] = None, group: bool = False) -> Specialization:
    if group:
        return group_specialization(p)
    if spec:
        return settings.specialization(spec, p.ring)
    return Specialization.random(p.ring, settings.seed if seed is None else seed)


def _enumerate(p: Presentation, s: Specialization, settings: Settings, seed: Optional[int] = None,
               checkpoint: Optional[str] = None, progress_callback: ProgressCallback = None,
               use_cache: bool = True) -> EnumerationResult:
    return enumerate_algebra(p, s, max_dim=settings.max_dim, max_len=settings.max_len, seed=seed,
                             progress_callback=progress_callback, checkpoint=checkpoint,
                             cache_dir=settings.cache_dir if use_cache else None)


def _enumeration_certificates(p: Presentation, r: EnumerationResult) -> List[Certificate]:
    certificates = [verify_result(r, p), dimension_certificate(r, p.expected_dimension)]
    if p.name == "G26":
        group = r.specialization == group_specialization(p)
        certificates.append(central_element_check(r, order=6 if group else None))
    return certificates


# -- commands ---------------------------------------------------------------

def cmd_demazure(max_degree: int = 12, seed: int = 7) -> RunReport:
    def body():
        certificates = demazure_certificates(max_degree, seed)
        return certificates, {"braid_failure": certificates[0].details}
    return _run("demazure", {"max_degree": max_degree, "seed": seed}, body)


def cmd_torsion(seed: int = 7, include_enumeration: bool = True) -> RunReport:
    def body():
        return [torsion_witness(include_enumeration, seed)], {}
    return _run("torsion", {"seed": seed, "include_enumeration": include_enumeration}, body)


def _witness_certificates(name: str, R: int, k: int, m: Optional[int] = None) -> List[Certificate]:
    module = load_witness(name)
    if m is None:
        certificates = [check_relations(module, R=R)]
    else:
        if m in (-1, 0, 1):
            raise ValueError(f"m must not be 0 or a unit, got {m}")
        prime = int(sympy.primefactors(m)[0])
        certificates = [check_relations(module, catalogue("G4-nil", m), R=R, modulus=prime)]
    for word, start in module.growth:
        certificates.append(growth_witness(module, word, start, k))
    return certificates


def cmd_witness(name: str, R: int = 100, k: int = 50, m: Optional[int] = None) -> RunReport:
    def body():
        return _witness_certificates(name, R, k, m), {"module": name}
    return _run("witness", {"name": name, "R": R, "k": k, "m": m}, body)


def cmd_witness_all(R: int = 100, k: int = 50) -> RunReport:
    def body():
        certificates: List[Certificate] = []
        for name in witness_names():
            certificates.extend(_witness_certificates(name, R, k))
        return certificates, {"modules": witness_names()}
    return _run("witness-all", {"R": R, "k": k}, body)


def cmd_enumerate(name: str, spec: Optional[str] = None, seed: Optional[int] = None, group: bool = False,
                  checkpoint: Optional[str] = None, settings: Optional[Settings] = None,
                  progress_callback: ProgressCallback = None, use_cache: bool = True,
                  out: Optional[str] = None) -> RunReport:
    settings = settings or load_settings()
    seed = settings.seed if seed is None else seed
    inputs = {"presentation": name, "spec": spec, "seed": seed, "group": group,
              "max_dim": settings.max_dim, "max_len": settings.max_len}

    def body():
        p = catalogue(name)
        s = choose_specialization(p, settings, spec, seed, group)
        r = _enumerate(p, s, settings, seed, checkpoint, progress_callback, use_cache)
        payload = {"result": r.to_json()}
        if out:
            r.save(out)
            logger.info(f"💾 Saved enumeration of {p.name} to {out}")
            payload["out"] = str(out)
        return _enumeration_certificates(p, r), payload
    return _run("enumerate", inputs, body)


def cmd_certify(name: str, spec: Optional[str] = None, seed: Optional[int] = None, group: bool = False,
                settings: Optional[Settings] = None, progress_callback: ProgressCallback = None,
                words: Optional[str] = None, result: Optional[str] = None) -> RunReport:
    """
    Certify that a word family spans a presentation.

    Args:
        name: A family from ``FAMILIES`` or, with ``words``, any catalogue entry
        words: File with one word per line, replacing the family's own list
        result: Saved EnumerationResult to certify against instead of enumerating

    Returns:
        RunReport
    """
    settings = settings or load_settings()
    seed = settings.seed if seed is None else seed
    inputs = {"family": name, "spec": spec, "seed": seed, "group": group, "words": words, "result": result}

    def body():
        if name in FAMILIES:
            presentation, builder = FAMILIES[name]
        elif words:
            presentation, builder = name, None
        else:
            raise ValueError(f"Unknown family '{name}' (known: {sorted(FAMILIES)}); "
                             f"pass a word list to certify a catalogue entry")
        p = catalogue(presentation)
        if result:
            r = EnumerationResult.load(result)
            if r.presentation != p.name:
                raise ValueError(f"{result} enumerates {r.presentation}, not {p.name}")
            logger.info(f"📂 Certifying against saved enumeration {result} (dim {r.dimension})")
        else:
            r = _enumerate(p, choose_specialization(p, settings, spec, seed, group), settings, seed,
                           progress_callback=progress_callback)
        if words:
            certificates = [certify_spanning(load_words(words), r, name=Path(words).stem)]
        elif builder is None:
            certificates = [certify_candidate_1296(r, seed)]
        else:
            certificates = [certify_spanning(builder(), r, name=name)]
        if name == "ariki-koike":
            certificates.append(ariki_koike_relations(r))
        return certificates, {"presentation": p.name, "dimension": r.dimension}
    return _run("certify-spanning", inputs, body)


def cmd_trace(path: str, points: int = 0, seed: int = 7, settings: Optional[Settings] = None) -> RunReport:
    """Replay a trace; with ``points`` > 0 also evaluate it in the regular module of its presentation."""
    def body():
        trace = load_trace(path)
        certificates = [check_trace(trace)]
        if points > 0:
            cache_dir = (settings or load_settings()).cache_dir
            certificates.append(representation_check(trace, points, seed, cache_dir))
        return certificates, {"trace": trace.name, "steps": len(trace.steps)}
    return _run("trace", {"file": str(path), "points": points, "seed": seed}, body)


def cmd_catalogue() -> RunReport:
    def body():
        summaries = []
        for name in catalogue_names():
            try:
                summaries.append(catalogue(name).summary())
            except ValueError:
                summaries.append({"name": name, "parametric": True})
        return [], {"presentations": summaries, "traces": [t.stem for t in shipped_traces()],
                    "witness_modules": witness_names()}
    return _run("catalogue", {}, body)


# -- verify-all -------------------------------------------------------------

def criterion_g4(seed: int, settings: Settings) -> List[Certificate]:
    p = catalogue("G4")
    points = [(group_specialization(p), seed)]
    points += [(Specialization.random(p.ring, seed + i), seed + i) for i in range(5)]
    certificates = []
    for s, point_seed in points:
        certificates.extend(_enumeration_certificates(p, _enumerate(p, s, settings, point_seed)))
    return certificates


def criterion_g26(seed: int, settings: Settings) -> List[Certificate]:
    """Dimension, spanning candidate and central element on G26."""
    p = catalogue("G26")
    certificates = []
    results = [_enumerate(p, group_specialization(p), settings, seed)]
    results += [_enumerate(p, Specialization.random(p.ring, seed + i), settings, seed + i) for i in range(2)]
    for r in results:
        certificates.extend(_enumeration_certificates(p, r))
    certificates.append(certify_candidate_1296(results[1], seed))
    return certificates


def criterion_parabolics(seed: int, settings: Settings) -> List[Certificate]:
    certificates = []
    for family in ("parabolic", "ariki-koike"):
        name, builder = FAMILIES[family]
        p = catalogue(name)
        r = _enumerate(p, Specialization.random(p.ring, seed), settings, seed)
        certificates.extend(_enumeration_certificates(p, r))
        certificates.append(certify_spanning(builder(), r, name=family))
        if family == "ariki-koike":
            certificates.append(ariki_koike_relations(r))
    p = catalogue("G12")
    certificates.extend(_enumeration_certificates(p, _enumerate(p, Specialization.random(p.ring, seed), settings, seed)))
    return certificates


def criterion_demazure(seed: int, settings: Settings) -> List[Certificate]:
    return demazure_certificates(12, seed)


def criterion_torsion(seed: int, settings: Settings) -> List[Certificate]:
    return [torsion_witness(True, seed)]


def criterion_witnesses(seed: int, settings: Settings) -> List[Certificate]:
    certificates = []
    for name in witness_names():
        certificates.extend(_witness_certificates(name, 100, 50))
    return certificates


def criterion_traces(seed: int, settings: Settings) -> List[Certificate]:
    """Replay every shipped trace and evaluate it in the regular module of its presentation."""
    certificates = []
    for path in shipped_traces():
        trace = load_trace(path)
        certificates.append(check_trace(trace))
        if trace.presentation:
            points = TRACE_POINTS.get(trace.presentation, 10)
            certificates.append(representation_check(trace, points, seed, settings.cache_dir))
    return certificates


def criterion_determinism(seed: int, settings: Settings) -> List[Certificate]:
    first = cmd_enumerate("G4", seed=seed, settings=settings, use_cache=False)
    second = cmd_enumerate("G4", seed=seed, settings=settings, use_cache=False)
    same = first.fingerprint() == second.fingerprint()
    details = {"first": first.fingerprint(), "second": second.fingerprint()}
    if not same:
        return [Certificate(name="determinism", certified=False, error="fingerprints differ", details=details)]
    return [Certificate(name="determinism", certified=True, details=details)]


CRITERIA = {
    "g4": criterion_g4,
    "g26": criterion_g26,
    "parabolics": criterion_parabolics,
    "demazure": criterion_demazure,
    "torsion": criterion_torsion,
    "witnesses": criterion_witnesses,
    "traces": criterion_traces,
    "determinism": criterion_determinism,
}


def cmd_verify_all(seed: Optional[int] = None, jobs: int = 1, settings: Optional[Settings] = None,
                   progress_callback: ProgressCallback = None) -> RunReport:
    settings = settings or load_settings()
    seed = settings.seed if seed is None else seed

    def body():
        results: Dict[str, List[Certificate]] = {}
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {key: pool.submit(fn, seed, settings) for key, fn in CRITERIA.items()}
                for key, future in futures.items():
                    results[key] = future.result()
        else:
            for i, (key, fn) in enumerate(CRITERIA.items()):
                if progress_callback:
                    progress_callback(f"Checking {key}", int(100 * i / len(CRITERIA)))
                results[key] = fn(seed, settings)
        certificates = [c for key in CRITERIA for c in results[key]]
        summary = {key: all(c.certified for c in results[key]) for key in CRITERIA}
        return certificates, {"criteria": summary}
    return _run("verify-all", {"seed": seed}, body)


# -- argparse front end -----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run_verify.py", description="Exact verification of Hecke algebra computations")
    parser.add_argument("--json", action="store_true", help="print the full JSON report")
    parser.add_argument("--config", help="JSON config file (overrides HECKE_CONFIG)")
    parser.add_argument("--seed", type=int, help="seed for random specializations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demazure", help="Demazure operators of G4")
    p.add_argument("--max-degree", type=int, default=12)

    p = sub.add_parser("torsion", help="torsion element of the G4 algebra at a = b = 0")
    p.add_argument("--no-enumeration", action="store_true")

    p = sub.add_parser("witness", help="check one witness module")
    p.add_argument("name", choices=witness_names())
    p.add_argument("-R", "--R", dest="R", type=int, default=100, help="check relations on basis indices up to R")
    p.add_argument("-k", "--k", dest="k", type=int, default=50, help="check growth up to index k")
    p.add_argument("-m", type=int, help="check G4-nil(m) modulo a prime factor of m")

    p = sub.add_parser("witness-all", help="check every witness module")
    p.add_argument("-R", "--R", dest="R", type=int, default=100)
    p.add_argument("-k", "--k", dest="k", type=int, default=50)

    for command in ("enumerate", "certify-spanning"):
        p = sub.add_parser(command)
        if command == "enumerate":
            p.add_argument("presentation")
            p.add_argument("--checkpoint", help="resumable checkpoint file")
            p.add_argument("--max-dim", type=int)
            p.add_argument("--max-len", type=int)
            p.add_argument("--out", help="save the EnumerationResult as JSON")
        else:
            p.add_argument("family", help=f"one of {', '.join(sorted(FAMILIES))}, or a presentation with --words")
            p.add_argument("--words", help="word list, one word per line")
            p.add_argument("--result", help="saved enumeration JSON to certify against")
        point = p.add_mutually_exclusive_group()
        point.add_argument("--spec", help="a=1/2,b=0,... or @name from the config file")
        point.add_argument("--group", action="store_true", help="group specialization")
        point.add_argument("--random", action="store_true", help="seeded random specialization (the default)")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="same as the global --seed")

    p = sub.add_parser("trace", help="replay a rewriting trace")
    p.add_argument("file", help="trace file or shipped trace name")
    p.add_argument("--points", type=int, default=0, help="also evaluate the trace at this many random points")

    p = sub.add_parser("verify-all", help="run every verification")
    p.add_argument("--jobs", type=int, help="worker processes (default from config)")

    sub.add_parser("catalogue", help="list presentations, traces and witness modules")
    sub.add_parser("schema", help="print the JSON schema of reports")
    return parser


def run_command(args: argparse.Namespace, settings: Settings) -> RunReport:
    seed = settings.seed if args.seed is None else args.seed
    if args.command == "demazure":
        return cmd_demazure(args.max_degree, seed)
    if args.command == "torsion":
        return cmd_torsion(seed, not args.no_enumeration)
    if args.command == "witness":
        return cmd_witness(args.name, args.R, args.k, args.m)
    if args.command == "witness-all":
        return cmd_witness_all(args.R, args.k)
    if args.command == "enumerate":
        updates = {k: v for k, v in (("max_dim", args.max_dim), ("max_len", args.max_len)) if v is not None}
        return cmd_enumerate(args.presentation, args.spec, seed, args.group, args.checkpoint,
                             settings.model_copy(update=updates), out=args.out)
    if args.command == "certify-spanning":
        return cmd_certify(args.family, args.spec, seed, args.group, settings, words=args.words, result=args.result)
    if args.command == "trace":
        return cmd_trace(args.file, args.points, seed, settings)
    if args.command == "verify-all":
        return cmd_verify_all(seed, args.jobs or settings.jobs, settings)
    return cmd_catalogue()


def print_summary(report: RunReport) -> None:
    marker = {"certified": "✅", "falsified": "❌"}.get(report.outcome, "⚠️")
    print(f"{marker} {report.command}: {report.outcome} ({report.wall_time:.2f}s)")
    for c in report.certificates:
        print(f"   {'✅' if c.certified else '❌'} {c.name}" + (f": {c.error}" if c.error else ""))
    if report.error and not report.certificates:
        print(f"   {report.error}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "schema":
        print(json.dumps(RunReport.model_json_schema(), indent=2))
        return 0
    try:
        settings = load_settings(args.config)
    except ConfigError as e:
        report = error_report(args.command, {}, str(e))
    else:
        report = run_command(args, settings)
    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        print_summary(report)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
