"""Grid experiments over synthetic data, driven by a protocol file.

A protocol is line-oriented "key = value" text; '#' starts a comment
and blank lines are ignored.  The dataset keys m, n, k, dist, mu and
noise accept comma-separated lists and span a full factorial grid; the
remaining keys are scalars.  Every grid cell is run for every method
and every seed (the seed drives both data generation and the method),
and the CSV reports per-cell mean and sample standard deviation over
seeds.

Keys:
    task      rank | minerr                      (default rank)
    methods   comma list; rank: proj svd lpca perm nuclear lowerbound,
              minerr: proj svd lpca truncsvd
    seeds     comma list of ints                 (default 0)
    m n k     ints (lists allowed)
    dist      uniform | normal (list allowed)    (default uniform)
    mu        float (list allowed, default 0.5)
    noise     float (list allowed, default 0.0)
    tau       float                              (default 0.5)
    kfit      minerr rank budget: an int, or +d for planted k + d
    epsilon dmax reps restarts max_iters tolerance admm_iters
    nuclear_eps order_restarts max_k             method knobs
    witness_dir                                  dump + re-verify witnesses

Cells run in parallel when RR_THREADS is set above 1; the CSV order is
deterministic either way.
"""

import csv
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as rio
from . import lpca, perm, proj, spectral
from .bounds import spectral_lower_bound
from .datagen import GenSpec, generate
from .matrix import as_binary, hamming_error, relative_error, round_threshold, rounds_to

GRID_KEYS = ("m", "n", "k", "dist", "mu", "noise")
RANK_METHODS = ("proj", "svd", "lpca", "perm", "nuclear", "lowerbound")
MINERR_METHODS = ("proj", "svd", "lpca", "truncsvd")

CSV_COLUMNS = ("m", "n", "k", "dist", "mu", "noise", "tau", "task", "method",
               "value_mean", "value_std", "time_mean", "time_std", "n_ok", "n_failed")

_INT_KEYS = {"m", "n", "k", "seeds", "dmax", "reps", "restarts", "max_iters",
             "admm_iters", "order_restarts", "max_k"}
_FLOAT_KEYS = {"mu", "noise", "tau", "epsilon", "tolerance", "nuclear_eps"}


class ProtocolError(ValueError):
    """Raised for malformed protocol files."""


def parse_protocol(text):
    """Parse protocol text into a dict with defaults filled in."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProtocolError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        items = [tok.strip() for tok in val.split(",") if tok.strip()]
        if not items:
            raise ProtocolError(f"line {lineno}: no value for {key!r}")
        try:
            if key in _INT_KEYS:
                items = [int(tok) for tok in items]
            elif key in _FLOAT_KEYS:
                items = [float(tok) for tok in items]
        except ValueError as exc:
            raise ProtocolError(f"line {lineno}: {exc}") from exc
        values[key] = items

    proto = {
        "task": "rank", "dist": ["uniform"], "mu": [0.5], "noise": [0.0],
        "tau": 0.5, "seeds": [0], "kfit": "+20", "witness_dir": None,
        "epsilon": 1e-9, "dmax": None, "reps": 1, "restarts": 3,
        "max_iters": 500, "tolerance": 1e-6, "admm_iters": 500,
        "nuclear_eps": 1e-3, "order_restarts": 3, "max_k": None,
    }
    list_keys = set(GRID_KEYS) | {"seeds", "methods"}
    for key, items in values.items():
        if key in list_keys:
            proto[key] = items
        else:
            if len(items) != 1:
                raise ProtocolError(f"key {key!r} takes a single value")
            proto[key] = items[0]

    for required in ("m", "n", "k", "methods"):
        if required not in proto or proto.get(required) in (None, []):
            raise ProtocolError(f"protocol must set {required!r}")
    proto["task"] = str(proto["task"])
    if proto["task"] not in ("rank", "minerr"):
        raise ProtocolError(f"unknown task {proto['task']!r}")
    allowed = RANK_METHODS if proto["task"] == "rank" else MINERR_METHODS
    for meth in proto["methods"]:
        if meth not in allowed:
            raise ProtocolError(f"method {meth!r} not valid for task {proto['task']}")
    return proto


def _resolve_kfit(kfit, planted_k, m, n):
    if isinstance(kfit, str) and kfit.startswith("+"):
        k = planted_k + int(kfit[1:])
    else:
        k = int(kfit)
    return max(1, min(k, m, n))


def _run_cell_seed(task):
    """One (cell, method, seed) run; returns a plain result dict."""
    proto = task["proto"]
    cell = task["cell"]
    method = task["method"]
    seed = task["seed"]
    spec = GenSpec(m=cell["m"], n=cell["n"], k=cell["k"], dist=cell["dist"],
                   mu=cell["mu"], noise=cell["noise"], tau=proto["tau"], seed=seed)
    B, _ = generate(spec)
    tau = proto["tau"]
    out = {"ok": False, "value": None, "time": None, "witness": None}
    try:
        if proto["task"] == "rank":
            est = _rank_estimate(B, method, tau, seed, proto)
            if est is None:
                return out
            if est.kind == "upper" and (est.witness is None or not rounds_to(est.witness, B)):
                return out
            out.update(ok=True, value=float(est.value), time=est.elapsed, witness=est.witness)
        else:
            kfit = _resolve_kfit(proto["kfit"], cell["k"], cell["m"], cell["n"])
            import time as _time

            t0 = _time.perf_counter()
            value, witness = _minerr_value(B, method, kfit, tau, seed, proto)
            out.update(ok=True, value=value, time=_time.perf_counter() - t0,
                       witness=witness)
    except (ValueError, ArithmeticError):
        pass
    return out


def _rank_estimate(B, method, tau, seed, proto):
    if method == "proj":
        cfg = proj.ProjConfig(epsilon=proto["epsilon"], d_max=proto["dmax"],
                              repetitions=proto["reps"], seed=seed)
        return proj.estimate_rank(B, tau, cfg)
    if method == "svd":
        return spectral.svd_estimate_rank(B, tau)
    if method == "lpca":
        cfg = lpca.LpcaConfig(max_iters=proto["max_iters"], tol=proto["tolerance"],
                              restarts=proto["restarts"], seed=seed,
                              k_max=proto["max_k"])
        return lpca.estimate_rank(B, tau, cfg)
    if method == "perm":
        return perm.estimate_rank(B, tau, seed=seed,
                                  order_restarts=proto["order_restarts"])
    if method == "nuclear":
        return spectral.nuclear_estimate_rank(B, tau, eps=proto["nuclear_eps"],
                                              admm_iters=proto["admm_iters"])
    if method == "lowerbound":
        return spectral_lower_bound(B)
    raise ValueError(f"unknown method {method!r}")


def _minerr_value(B, method, kfit, tau, seed, proto):
    """Relative reconstruction error and the witness (None for truncsvd)."""
    if method == "truncsvd":
        _, residual = spectral.trunc_svd_baseline(B, kfit)
        return residual, None
    if method == "proj":
        cfg = proj.ProjConfig(epsilon=proto["epsilon"], seed=seed)
        C, witness, _ = proj.min_error_decomposition(B, kfit, tau, cfg)
    elif method == "svd":
        C, witness, _ = spectral.svd_min_error(B, kfit, tau)
    elif method == "lpca":
        cfg = lpca.LpcaConfig(max_iters=proto["max_iters"], tol=proto["tolerance"],
                              restarts=proto["restarts"], seed=seed)
        C, witness = lpca.min_error(B, kfit, tau, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return relative_error(B, C), witness


def run_experiment(proto, out_csv, repro=False):
    """Run the protocol grid and write the CSV; returns the row dicts.

    Per-cell failures are recorded in n_failed and the run continues.
    """
    cells = []
    lists = [proto[key] if isinstance(proto[key], list) else [proto[key]]
             for key in GRID_KEYS]
    for combo in itertools.product(*lists):
        cells.append(dict(zip(GRID_KEYS, combo)))

    tasks = []
    for cell in cells:
        for method in proto["methods"]:
            for seed in proto["seeds"]:
                tasks.append({"proto": proto, "cell": cell, "method": method,
                              "seed": seed})

    threads = int(os.environ.get("RR_THREADS", "1"))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell_seed, tasks))
    else:
        results = [_run_cell_seed(task) for task in tasks]

    witness_dir = proto.get("witness_dir")
    if witness_dir:
        os.makedirs(witness_dir, exist_ok=True)
        _dump_witnesses(tasks, results, witness_dir)

    rows = []
    for cell in cells:
        for method in proto["methods"]:
            cell_results = [res for task, res in zip(tasks, results)
                            if task["cell"] is cell and task["method"] == method]
            values = [res["value"] for res in cell_results if res["ok"]]
            times = [res["time"] for res in cell_results if res["ok"]]
            row = dict(cell)
            row.update(tau=proto["tau"], task=proto["task"], method=method,
                       value_mean=_fmt(np.mean(values)) if values else "",
                       value_std=_fmt(_sample_std(values)) if values else "",
                       time_mean="0.0" if repro else (_fmt(np.mean(times)) if times else ""),
                       time_std="0.0" if repro else (_fmt(_sample_std(times)) if times else ""),
                       n_ok=len(values), n_failed=len(cell_results) - len(values))
            rows.append(row)

    rows.sort(key=lambda r: tuple(str(r[key]) for key in
                                  ("m", "n", "k", "dist", "mu", "noise", "method")))
    with open(out_csv, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({key: row[key] for key in CSV_COLUMNS})
    return rows


def _dump_witnesses(tasks, results, witness_dir):
    """Write every witness next to its regenerated input and re-verify."""
    for task, res in zip(tasks, results):
        if not res["ok"] or res["witness"] is None:
            continue
        cell = task["cell"]
        stem = (f"{cell['m']}x{cell['n']}_k{cell['k']}_{cell['dist']}"
                f"_mu{cell['mu']}_p{cell['noise']}_{task['method']}_s{task['seed']}")
        path = os.path.join(witness_dir, stem + ".factorization")
        rio.write_factorization(path, res["witness"])
        reread = rio.read_factorization(path)
        spec = GenSpec(m=cell["m"], n=cell["n"], k=cell["k"], dist=cell["dist"],
                       mu=cell["mu"], noise=cell["noise"],
                       tau=task["proto"]["tau"], seed=task["seed"])
        B, _ = generate(spec)
        if task["proto"]["task"] == "rank" and not rounds_to(reread, B):
            raise AssertionError(f"witness file {path} failed re-verification")


def _sample_std(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def _fmt(x):
    return repr(float(x))
