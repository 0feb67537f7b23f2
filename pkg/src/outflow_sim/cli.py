"""Command line entry point: ``outflow-sim <command> [options]``.

Commands: stationary, evolve, sweep-m, sweep-ub, verify. Exit status is 0
when every enabled verdict passes, 1 when a verdict fails, 2 for
configuration errors and 3 for numerical failures. Failures write a
JSON error record (to ``error.json`` in the output directory when possible,
and always to stderr) before exiting.
"""

import argparse
import logging
import os
import sys
from dataclasses import asdict, replace

from . import io as sio
from .config import load_config, parse_config
from .errors import ConfigError, OutflowError

log = logging.getLogger("outflow_sim")

COMMANDS = ("stationary", "evolve", "sweep-m", "sweep-ub", "verify")


def _parser():
    ap = argparse.ArgumentParser(prog="outflow-sim", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("-c", "--config", help="line-oriented config file")
    ap.add_argument("-s", "--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                    help="override a config entry (repeatable)")
    ap.add_argument("-o", "--out", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=int, help="seed for the randomized verifiers")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _spec(args):
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"verify.seed = {args.seed}")
    if args.out is not None:
        overrides.append(f"output.dir = {args.out!r}")
    if args.config:
        return load_config(args.config, overrides)
    return parse_config("", overrides)


def _outdir(spec):
    path = spec.output.dir
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {path} is not writable: {exc.strerror}",
                          key="output.dir") from None
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable", key="output.dir")
    return path


def _profile(spec, params=None, r_max=None):
    from .stationary import solve_stationary

    st = spec.stationary
    return solve_stationary(params or spec.params, r_max=r_max or st.r_max, tol=st.tol, N=st.N)


def cmd_stationary(spec, out):
    from .stationary import stationary_report

    prof = _profile(spec)
    report = stationary_report(prof)
    sio.write_series(os.path.join(out, "profile.csv"), sio.profile_records(prof))
    rep = report.as_dict()
    sio.write_json(os.path.join(out, "decay_report.json"), rep)
    print(sio.json_line(rep))
    return bool(rep.get("passed", True))


def _evolve_one(spec, out, params, profile=None):
    from .diagnostics.ledger import BALANCE_FIELDS, LEDGER_FIELDS, run_diagnostics
    from .recipes import run_bump

    cfg = spec.solver
    traj, _ = run_bump(params, cfg, bump=spec.initial.bump(), profile=profile,
                       r_max=spec.stationary.r_max)
    summary = {"t_end": traj.final.t, "steps": traj.final.steps, "snapshots": len(traj.snapshots),
               "rejected_steps": traj.rejected, "M0": traj.cmap.M0}
    passed = True
    if spec.diagnostics.snapshots:
        sio.write_series(os.path.join(out, "snapshots.csv"), sio.snapshot_records(traj))
    if spec.diagnostics.ledger:
        diag = run_diagnostics(traj, deltas=spec.diagnostics.deltas)
        sio.write_series(os.path.join(out, "ledger.jsonl"), diag.ledger, header=LEDGER_FIELDS)
        sio.write_series(os.path.join(out, "balance.csv"),
                         [{k: b[k] for k in BALANCE_FIELDS} for b in diag.balance],
                         header=BALANCE_FIELDS)
        sio.write_series(os.path.join(out, "weighted.csv"), diag.weighted)
        summary["verdicts"] = diag.verdicts
        summary["totals"] = diag.totals()
        summary["boundary"] = diag.boundary
        passed = diag.passed
    if spec.diagnostics.representation:
        from .diagnostics.representation import representation_check, representation_probes

        rows = []
        for variant in ("interior", "near-M0", "outer"):
            for x, t in representation_probes(traj, variant, spec.diagnostics.probes):
                rows.append(representation_check(traj, x, t, variant=variant, snap=True).as_dict())
        sio.write_series(os.path.join(out, "representation.csv"), rows)
        summary["representation_max_rel_error"] = max(r["rel_error"] for r in rows)
    sio.write_json(os.path.join(out, "summary.json"), summary)
    return passed, summary


def cmd_evolve(spec, out):
    passed, summary = _evolve_one(spec, out, spec.params)
    print(sio.json_line({"passed": passed, **{k: v for k, v in summary.items()
                                              if k in ("t_end", "steps", "snapshots")}}))
    return passed


def cmd_sweep_m(spec, out):
    from .diagnostics.refinement import chi_refinement_study
    from .recipes import m_family

    sw = spec.sweep
    base = replace(spec.solver, t_end=max(spec.solver.t_end, sw.t_hi))
    trajs, _ = m_family(spec.params, sw.m, base, bump=spec.initial.bump())
    study = chi_refinement_study(trajs, r_window=(sw.r_lo, sw.r_hi), t_window=(0.0, sw.t_hi))
    sio.write_series(os.path.join(out, "chi_study.csv"), study["rows"])
    summary = {k: study[k] for k in ("window", "times", "consecutive", "decreasing")}
    summary["chi_min"] = [study["chi_min"][m] for m in sorted(study["chi_min"])]
    summary["m"] = sorted(study["chi_min"])
    sio.write_json(os.path.join(out, "summary.json"), summary)
    print(sio.json_line(summary))
    return bool(study["decreasing"])


def cmd_sweep_ub(spec, out):
    from concurrent.futures import ThreadPoolExecutor

    from .recipes import _threads

    jobs = []
    for j, ub in enumerate(spec.sweep.u_b):
        sub = os.path.join(out, f"ub_{j:02d}")
        os.makedirs(sub, exist_ok=True)
        jobs.append((ub, sub, replace(spec.params, u_b=ub)))

    def run(job):
        ub, sub, params = job
        passed, summary = _evolve_one(spec, sub, params)
        return {"u_b": ub, "dir": os.path.basename(sub), "passed": passed,
                "steps": summary["steps"],
                "final_energy_ratio": None}

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(run, jobs))
    for row in rows:
        led = os.path.join(out, row["dir"], "ledger.jsonl")
        if os.path.exists(led):
            recs = sio.read_series(led)
            row["final_energy_ratio"] = recs[-1]["energy"] / max(recs[0]["energy"], 1e-300)
    sio.write_series(os.path.join(out, "summary.csv"), rows)
    print(sio.json_line({"runs": len(rows), "passed": all(r["passed"] for r in rows)}))
    return all(r["passed"] for r in rows)


def cmd_verify(spec, out):
    from .verify import run_verify

    report = run_verify(spec.verify.seed, spec.verify.samples)
    sio.write_json(os.path.join(out, "verify.json"), report)
    for c in report["checks"]:
        extra = f" gamma={c['gamma']}" if "gamma" in c else ""
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['check']}{extra} "
              f"samples={c['samples']} failures={c['failures']} worst={c['worst']:.17g}")
    return report["passed"]


HANDLERS = {"stationary": cmd_stationary, "evolve": cmd_evolve, "sweep-m": cmd_sweep_m,
            "sweep-ub": cmd_sweep_ub, "verify": cmd_verify}


def _fail(record, out, code):
    line = sio.json_line(record)
    if out is not None:
        try:
            with open(os.path.join(out, "error.json"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(line + "\n")
        except OSError:
            pass
    print(line, file=sys.stderr)
    return code


def run_command(argv):
    """Run one command; returns the process exit status."""
    ap = _parser()
    ap.__class__ = _Parser
    try:
        args = ap.parse_args(argv)
    except _ArgError as exc:
        return _fail({"error": "usage", "message": str(exc)}, None, 2)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = None
    try:
        spec = _spec(args)
        out = _outdir(spec)
        passed = HANDLERS[args.command](spec, out)
    except OutflowError as exc:
        return _fail(exc.record(), out, exc.exit_code)
    except (FloatingPointError, ArithmeticError, MemoryError) as exc:
        return _fail({"error": "numerical", "message": repr(exc)}, out, 3)
    return 0 if passed else 1


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
