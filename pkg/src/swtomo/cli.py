"""Command-line front end.

Every subcommand writes its data files plus ``manifest.json`` into ``--out``. Files
are staged in a hidden directory and moved into place only on success, so a failed
run leaves nothing behind. Random work is split into fixed chunks with per-chunk seeds,
so ``--workers`` never changes an output byte. Only the manifest's ``runtime`` block
(wall time, worker count) differs between runs.
"""

import argparse
import hashlib
import json
import math
import os
import platform
import shutil
import sys
import tempfile
import time

import numpy as np
import scipy

from . import __version__
from ._io import write_csv, write_json
from ._parallel import map_chunks, map_ordered, task_rng
from .concentration import (
    ZParams,
    gaussian_domination_check,
    ks_distance,
    projector_overlaps,
    sample_z,
    tail_rows,
    write_tails_csv,
    z_second_moment,
)
from .oracle import check_projector_algebra, verify_schur_weyl_measure
from .packing import (
    NetFamily,
    chi0_analytic,
    greedy_pack_from,
    holevo_chi_with_stderr,
    indep_chi_per_copy_mc,
    make_state,
    omega_chi_bound,
    sample_lower_bound,
)
from .partitions import check_dim_entropy_bound, enumerate_partitions
from .pgm import check_pgm_bound
from .schur import check_character_lower_bound, check_character_upper_bound
from .states import fidelity_batch, random_state
from .tomography import (
    SamplerConfig,
    curves_summary,
    log_failure_bound,
    qubit_outcome_pdfs,
    sample_estimates,
    write_curves_csv,
)

CHUNK = 1000


class UsageError(Exception):
    """Invalid parameter combination, reported as a structured message."""


def _grid(text: str) -> list:
    """``start:stop:step`` (inclusive of ``stop`` up to rounding) or a comma list."""
    if ":" in text:
        try:
            a, b, s = (float(v) for v in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected start:stop:step")
        if s <= 0 or b < a:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}")
        k = int(math.floor((b - a) / s + 1e-9))
        return [round(a + i * s, 12) for i in range(k + 1)]
    return [float(v) for v in text.split(",") if v]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (64-bit)")
    common.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="data file format")
    common.add_argument("--workers", type=int, default=1, help="worker threads (does not affect output)")
    common.add_argument("--d", type=int, default=None, help="local dimension")
    common.add_argument("--n", type=int, action="append", default=None, help="copy count (repeatable)")
    common.add_argument("--rank", type=int, default=None, help="rank r")
    common.add_argument("--t", type=float, default=None, help="net family parameter t")
    common.add_argument("--delta", type=_grid, default=None, help="infidelity grid start:stop:step or list")
    common.add_argument("--epsilon", type=float, default=None, help="kind III separation parameter")

    p = argparse.ArgumentParser(prog="swtomo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pdf", parents=[common], help="qubit outcome densities",
                       description="CSV columns: lambda_index, angle_rad, density, weight (one file per n).")
    s.add_argument("--p", type=float, default=0.7, help="top eigenvalue of the qubit state")
    s.add_argument("--grid", type=int, default=4096, help="angle grid size")

    s = sub.add_parser("sample", parents=[common], help="empirical tomography tails",
                       description="CSV columns: n, delta, empirical, bound, stderr, holds.")
    s.add_argument("--p", type=float, default=None,
                   help="qubit state diag(p, 1-p); the default for d=2 without --rank is p=0.7, "
                        "otherwise a random state of rank --rank is drawn from the seed")

    sub.add_parser("bounds", parents=[common], help="character, PGM and dimension bound sweeps",
                   description="CSV columns: check, lambda, d, lhs, rhs, margin, holds.").add_argument(
        "--max-n", type=int, default=20, help="largest n in the exhaustive sweeps")

    s = sub.add_parser("pack", parents=[common], help="greedy packing net construction",
                       description="Writes net.json: family, threshold, metric, draws, seed, states.")
    s.add_argument("--kind", choices=("I", "II", "III", "OMEGA"), default="II")
    s.add_argument("--threshold", type=float, default=None, help="separation in the 1-norm (or infidelity)")
    s.add_argument("--metric", choices=("trace", "infidelity"), default="trace")
    s.add_argument("--max-size", type=int, default=None, help="stop once the net has this many states")

    s = sub.add_parser("holevo", parents=[common], help="Holevo, chi0 and Fano calculators",
                       description="CSV columns: quantity, value.")
    s.add_argument("--kind", choices=("I", "II", "III", "OMEGA"), default="II")
    s.add_argument("--eta", type=float, default=0.5, help="Fano error probability")
    s.add_argument("--povm-size", type=int, default=16)

    s = sub.add_parser("conc", parents=[common], help="Z variable and projector-overlap suites",
                       description="tails.csv columns: z, empirical, bound, stderr (lower tails at -z).")
    s.add_argument("--z-grid", type=_grid, default=_grid("0.25,0.5,1,2"))
    s.add_argument("--p", type=int, default=None, help="rank of P")
    s.add_argument("--q", type=int, default=None, help="rank of Q")
    s.add_argument("--zn", type=int, default=10, help="n of Z_{n,m}")
    s.add_argument("--zm", type=int, default=3, help="m of Z_{n,m}")

    sub.add_parser("oracle", parents=[common], help="brute-force Schur-Weyl identity suite",
                   description="CSV columns: d, n, check, max_error, holds.").add_argument(
        "--max-n", type=int, default=5)
    return p


# --- subcommands: each returns (files, summary, ok) -------------------------------------


def _emit(stage, name, header, rows, fmt_choice):
    rows = [list(r) for r in rows]
    if fmt_choice == "json":
        path = os.path.join(stage, name + ".json")
        write_json(path, [dict(zip(header, r)) for r in rows])
    else:
        path = os.path.join(stage, name + ".csv")
        write_csv(path, header, rows)
    return os.path.basename(path)


def cmd_pdf(a, stage):
    ns = a.n or [10, 100]
    if not 0.5 <= a.p <= 1.0:
        raise UsageError("--p must lie in [0.5, 1]")
    if any(n < 1 for n in ns):
        raise UsageError("--n must be positive")
    curves = map_ordered(lambda n: qubit_outcome_pdfs(a.p, n, a.grid), ns, a.workers)
    files, summary = [], {}
    for n, cs in zip(ns, curves):
        if a.format == "json":
            name = f"pdf_n{n}.json"
            write_json(os.path.join(stage, name), [
                {"lambda": list(c.lam), "weight": c.weight, "angle_rad": c.angles, "density": c.density} for c in cs])
        else:
            name = f"pdf_n{n}.csv"
            write_curves_csv(os.path.join(stage, name), cs)
        files.append(name)
        summary[str(n)] = curves_summary(cs)
    write_json(os.path.join(stage, "pdf_summary.json"), summary)
    files.append("pdf_summary.json")
    ok = all(abs(s["weight_sum"] - 1) <= 1e-9 for s in summary.values())
    return files, summary, ok


def _state_for(a, d):
    if a.p is None and d == 2 and a.rank is None:
        return np.diag([0.7, 0.3]).astype(complex)
    if a.p is not None:
        if d != 2:
            raise UsageError("--p describes a qubit state; use --d 2")
        return np.diag([a.p, 1 - a.p]).astype(complex)
    r = a.rank or d
    if not 1 <= r <= d:
        raise UsageError("--rank must lie in [1, d]")
    return random_state(d, r, task_rng(a.seed, 0))


def cmd_sample(a, stage):
    d = a.d or 2
    if not 2 <= d <= 4:
        raise UsageError("--d must lie in [2, 4] for sampling")
    ns = a.n or [10, 100]
    deltas = a.delta or _grid("0.02:0.5:0.02")
    samples = a.samples or 10000
    rho = _state_for(a, d)
    rows, summary, ok = [], {}, True
    for stage_id, n in enumerate(ns, start=1):
        def work(count, rng, n=n):
            out = sample_estimates(rho, n, count, rng, SamplerConfig())
            return fidelity_batch(rho, np.stack([o.estimate for o in out]))
        fids = np.concatenate(map_chunks(work, samples, CHUNK, a.seed, stage_id, a.workers))
        r = int(np.count_nonzero(np.linalg.eigvalsh(rho) > 1e-9 * np.linalg.eigvalsh(rho)[-1]))
        for delta in deltas:
            b = math.exp(log_failure_bound(n, d, r, delta))
            emp = float(np.mean(fids <= 1 - delta))
            se = math.sqrt(b * (1 - b) / samples)
            holds = emp <= b + 3 * se
            ok &= holds
            rows.append((n, delta, emp, b, se, holds))
        summary[str(n)] = {"mean_infidelity": float(np.mean(1 - fids)), "rank": r}
    files = [_emit(stage, "sample_tail", ["n", "delta", "empirical", "bound", "stderr", "holds"], rows, a.format)]
    return files, summary, ok


def cmd_bounds(a, stage):
    d_max = a.d or 4
    if a.max_n < 1 or d_max < 1:
        raise UsageError("--max-n and --d must be positive")
    rows = []
    for n in range(1, a.max_n + 1):
        for lam in enumerate_partitions(n, d_max):
            for check, rep in (("dim_entropy", check_dim_entropy_bound(lam)),
                               ("character_lower", check_character_lower_bound(lam)),
                               ("pgm", check_pgm_bound(lam, d_max))):
                rows.append((check, "-".join(map(str, lam)), d_max, rep.lhs, rep.rhs, rep.margin, rep.holds))
    triples = a.samples or 200
    rng = task_rng(a.seed, 1)
    for _ in range(triples):
        d = int(rng.integers(2, d_max + 1)) if d_max >= 2 else 1
        rho = random_state(d, int(rng.integers(1, d + 1)), rng)
        sigma = random_state(d, int(rng.integers(1, d + 1)), rng)
        n = int(rng.integers(1, min(a.max_n, 30) + 1))
        lams = enumerate_partitions(n, d)
        lam = lams[int(rng.integers(len(lams)))]
        rep = check_character_upper_bound(rho, sigma, lam)
        rows.append(("character_upper", "-".join(map(str, lam)), d, rep.lhs, rep.rhs, rep.margin, rep.holds))
    ok = all(r[-1] for r in rows)
    files = [_emit(stage, "bounds", ["check", "lambda", "d", "lhs", "rhs", "margin", "holds"], rows, a.format)]
    return files, {"rows": len(rows), "all_hold": ok}, ok


def _family(a):
    kind = a.kind
    d = a.d or {"I": 6, "II": 8, "III": 12, "OMEGA": 4}[kind]
    r = a.rank or {"I": 1, "II": d // 2, "III": 1, "OMEGA": 2}[kind]
    t = 1.0 if kind == "III" else (a.t if a.t is not None else 0.5)
    eps = a.epsilon if kind == "III" else None
    if kind == "III" and eps is None:
        eps = 0.25
    try:
        return NetFamily(kind, d, r, t, eps)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_pack(a, stage):
    fam = _family(a)
    threshold = a.threshold
    if threshold is None:
        # 1-norm thresholds: trace distance t/4 for kind I, 1-norm t/2 for kind II
        defaults = {"I": fam.t / 2, "II": fam.t / 2, "III": 2 * (fam.epsilon or 0)}
        if fam.kind not in defaults:
            raise UsageError("--threshold is required for OMEGA")
        threshold = defaults[fam.kind]
    draws = a.samples or 10000
    batches = map_chunks(lambda k, rng: fam.sample_unitaries(rng, k), draws, CHUNK, a.seed, 1, a.workers)
    net = greedy_pack_from(fam, threshold, a.metric, np.concatenate(batches), a.max_size)
    net.seed = a.seed
    path = os.path.join(stage, "net.json")
    with open(path, "w") as fh:
        fh.write(net.to_json())
    sep = net.min_separation()
    summary = {"size": len(net), "draws": net.draws, "min_separation": sep, "threshold": threshold}
    return ["net.json"], summary, len(net) >= 1 and net.verify()


def cmd_holevo(a, stage):
    fam = _family(a)
    size = a.samples or 200
    rows = [("d", fam.d), ("r", fam.r), ("t", fam.t)]
    ok = True
    if fam.kind != "OMEGA":
        chi0 = chi0_analytic(fam)
        states = make_state(fam, fam.sample_unitaries(task_rng(a.seed, 1), size))
        chi, se = holevo_chi_with_stderr(list(states))
        log_n = {"I": fam.d * fam.r / 54, "II": fam.d ** 2 / 32,
                 "III": (1 - (fam.epsilon or 0)) * fam.r * fam.d / 2}[fam.kind]
        rows += [("chi0_analytic", chi0), ("chi_mc", chi), ("chi_mc_stderr", se),
                 ("log_net_size", log_n)]
        ok &= chi <= chi0 + 3 * se
        if chi0 > 0:
            rows.append(("fano_copy_lower_bound", sample_lower_bound(eta=a.eta, chi0=chi0, log_n_states=log_n)))
    else:
        for n in a.n or [100]:
            rows.append((f"omega_chi_bound_n{n}", omega_chi_bound(fam.t, fam.r, n)))
    if fam.kind == "II":
        rep = indep_chi_per_copy_mc(fam.d, fam.t, a.povm_size, size, task_rng(a.seed, 2))
        rows += [("indep_chi_per_copy", rep.chi), ("indep_chi_stderr", rep.stderr),
                 ("indep_chi_bound", rep.bound)]
        ok &= rep.holds
    files = [_emit(stage, "holevo", ["quantity", "value"], rows, a.format)]
    return files, dict(rows), ok


def cmd_conc(a, stage):
    d = a.d or 8
    p = a.p or 2
    q = a.q or p
    samples = a.samples or 100000
    if not (1 <= p <= d and 1 <= q <= d):
        raise UsageError("need 1 <= p, q <= d")
    try:
        zpar = ZParams(a.zn, a.zm)
    except ValueError as exc:
        raise UsageError(str(exc))
    grid = a.z_grid
    if any(z < 0 for z in grid):
        raise UsageError("--z-grid values must be non-negative")
    overlaps = np.concatenate(map_chunks(lambda k, rng: projector_overlaps(d, p, q, k, rng),
                                         samples, 10000, a.seed, 1, a.workers))
    rows = tail_rows(overlaps, p * q, upper=grid, lower=[z for z in grid if 0 < z < 1])
    zs = np.concatenate(map_chunks(lambda k, rng: sample_z(zpar, rng, k), samples, 10000, a.seed, 2, a.workers))
    name = "tails." + a.format
    if a.format == "json":
        write_json(os.path.join(stage, name), [r.__dict__ for r in rows])
    else:
        write_tails_csv(os.path.join(stage, name), rows)
    zsum = {"n": zpar.n, "m": zpar.m, "mean": float(zs.mean()), "second_moment": float(np.mean(zs ** 2)),
            "second_moment_exact": z_second_moment(zpar)}
    if zpar.m < zpar.n:
        zsum["ks_distance"] = ks_distance(zs, zpar)
    dom = gaussian_domination_check(d, p, q, [-1.0, 0.0, 0.25, 0.45], 20000, task_rng(a.seed, 3))
    write_json(os.path.join(stage, "z_summary.json"), {
        "z": zsum, "domination": [r.__dict__ | {"holds": r.holds} for r in dom]})
    ok = all(r.holds for r in rows) and all(r.holds for r in dom)
    return [name, "z_summary.json"], {"tails_hold": all(r.holds for r in rows)}, ok


def cmd_oracle(a, stage):
    if not 1 <= a.max_n <= 5:
        raise UsageError("--max-n must lie in [1, 5]")
    d_max = a.d or 3
    if not 1 <= d_max <= 3:
        raise UsageError("--d must lie in [1, 3]")
    per = a.samples or 20
    rng = task_rng(a.seed, 1)
    rows = []
    for d in range(1, d_max + 1):
        for n in range(1, a.max_n + 1):
            alg = check_projector_algebra(d, n, rng, unitaries=3)
            rows.append((d, n, "projector_algebra", alg.max_error, alg.holds()))
            worst = 0.0
            for _ in range(per):
                rho = random_state(d, int(rng.integers(1, d + 1)), rng)
                worst = max(worst, verify_schur_weyl_measure(rho, n).max_abs_error)
            rows.append((d, n, "schur_weyl_measure", worst, worst <= 1e-10))
    ok = all(r[-1] for r in rows)
    files = [_emit(stage, "oracle", ["d", "n", "check", "max_error", "holds"], rows, a.format)]
    return files, {"all_hold": ok}, ok


COMMANDS = {"pdf": cmd_pdf, "sample": cmd_sample, "bounds": cmd_bounds, "pack": cmd_pack,
            "holevo": cmd_holevo, "conc": cmd_conc, "oracle": cmd_oracle}


def _sha256(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def run(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    if args.samples is not None and args.samples < 1:
        parser.error("--samples must be positive")
    created = not os.path.isdir(args.out)
    os.makedirs(args.out, exist_ok=True)
    stage = tempfile.mkdtemp(prefix=".swtomo-", dir=args.out)

    def discard():
        shutil.rmtree(stage, ignore_errors=True)
        if created and not os.listdir(args.out):
            os.rmdir(args.out)

    start = time.perf_counter()
    try:
        files, summary, ok = COMMANDS[args.command](args, stage)
    except UsageError as exc:
        discard()
        print(json.dumps({"error": "invalid-parameters", "command": args.command, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except BaseException:
        discard()
        raise
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "workers")}
    manifest = {
        "command": args.command,
        "config": config,
        "seed": args.seed,
        "versions": {"swtomo": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "outputs": {name: _sha256(os.path.join(stage, name)) for name in files},
        "summary": summary,
        "all_checks_pass": bool(ok),
        "runtime": {"wall_time_s": time.perf_counter() - start, "workers": args.workers},
    }
    write_json(os.path.join(stage, "manifest.json"), manifest)
    for name in files + ["manifest.json"]:
        os.replace(os.path.join(stage, name), os.path.join(args.out, name))
    shutil.rmtree(stage, ignore_errors=True)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
