"""``zklab`` command line: run an experiment into a fresh directory.

Every run writes ``report.json``, its CSV tables and ``manifest.json`` (resolved
config, timestamps, package version, sha256 of every other file).  Parameters come
from flags, then from ``--config`` (JSON, or flat ``key = value`` lines), then from
defaults.  Exit codes: 0 ok, 2 bad configuration, 3 enumeration limit or query
budget, 4 a checked inequality failed.
"""

import argparse
import csv
import hashlib
import io
import json
import os
import shutil
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .config import TOL, fork_rng
from .errors import BudgetExceededError, ConfigurationError, DomainError, EnumerationLimitError, ZklabError


EXIT_OK, EXIT_CONFIG, EXIT_LIMIT, EXIT_VERDICT = 0, 2, 3, 4


class ParamError(ConfigurationError):
    def __init__(self, param, msg):
        super().__init__(f"{param}: {msg}")


# -- config ----------------------------------------------------------------------


def _scalar(text):
    text = text.strip()
    try:
        return json.loads(text)
    except ValueError:
        return text


def load_config(path):
    """JSON object, or flat ``key = value`` lines (``#`` comments; values parsed as JSON if possible)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParamError("--config", str(exc)) from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise ParamError("--config", f"invalid JSON: {exc}") from None
    else:
        data = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParamError("--config", f"line {n} is not key = value")
            key, value = line.split("=", 1)
            data[key.strip()] = _scalar(value)
    return {k.replace("-", "_"): v for k, v in data.items()}


def _read_json(path, param):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParamError(param, str(exc)) from None
    except ValueError as exc:
        raise ParamError(param, f"invalid JSON: {exc}") from None


def _edges(text, param):
    if isinstance(text, list):
        return [tuple(e) for e in text]
    out = []
    for part in str(text).replace(" ", "").split(","):
        if not part:
            continue
        try:
            i, j = part.split("-")
            out.append((int(i), int(j)))
        except ValueError:
            raise ParamError(param, f"edge {part!r} is not of the form i-j") from None
    return out


# -- output ----------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dumps(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


class RunWriter:
    """Collects files in memory; ``commit`` writes them into a fresh directory."""

    def __init__(self):
        self.files = {}

    def add(self, name, text):
        self.files[name] = text

    def json(self, name, obj):
        self.add(name, dumps(obj))

    def csv(self, name, header, rows):
        self.add(name, csv_text(header, rows))

    def commit(self, out, config, started):
        if os.path.exists(out) and (not os.path.isdir(out) or os.listdir(out)):
            raise ParamError("--out", f"{out} already exists and is not an empty directory")
        parent = os.path.dirname(os.path.abspath(out)) or "."
        os.makedirs(parent, exist_ok=True)
        tmp = tempfile.mkdtemp(prefix=".zklab-", dir=parent)
        try:
            digests = []
            for name in sorted(self.files):
                data = self.files[name].encode()
                with open(os.path.join(tmp, name), "wb") as fh:
                    fh.write(data)
                digests.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
            manifest = {
                "version": __version__,
                "config": config,
                "started": started,
                "finished": datetime.now(timezone.utc).isoformat(),
                "files": digests,
            }
            with open(os.path.join(tmp, "manifest.json"), "w") as fh:
                fh.write(dumps(manifest))
            if os.path.isdir(out):
                os.rmdir(out)
            os.replace(tmp, out)
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        return manifest


# -- experiments -----------------------------------------------------------------


def _spec(cfg):
    from .protocols import spec_from_json

    if cfg.get("spec") is None:
        raise ParamError("--spec", "a protocol spec file is required")
    return spec_from_json(_read_json(cfg["spec"], "--spec"))


def run_hash_audit(cfg, w):
    from .fieldhash import HashFamily, point_uniformity, universality_audit

    fam = HashFamily(int(cfg["n1"]), int(cfg["n2"]), int(cfg["t"]))
    fam.check_enumerable(cfg.get("limit"))
    counts = point_uniformity(fam, cfg.get("limit"))
    audit = universality_audit(fam, limit=cfg.get("limit"))
    expected = fam.size >> fam.n2
    point_ok = bool(np.all(counts == expected))
    w.json("report.json", {"experiment": "hash-audit", "members": fam.size, "point_expected": expected,
                           "point_uniform": point_ok, "audit": audit})
    w.csv("uniformity.csv", ["alpha", "beta", "count", "expected"],
          [(a, b, int(counts[a, b]), expected) for a in range(counts.shape[0]) for b in range(counts.shape[1])])
    return point_ok and audit["uniform"]


def _honest_prover(spec):
    from .protocols import gi_protocol, gi_sequential

    rec = spec.to_json()
    if rec.get("kind") == "gi":
        return gi_protocol(rec["g0"], rec["g1"], int(rec.get("copies", 1)), rec.get("shape", "QAM3"),
                           int(rec["vertices"]))[1]
    if rec.get("kind") == "gi_sequential":
        return gi_sequential(rec["g0"], rec["g1"], int(rec.get("rounds", 2)), int(rec["vertices"]))[1]
    return None


def run_protocol(cfg, w):
    from .protocols import honest_verifier, optimal_cheating_probability, parallel_compose
    from .protocols import run_protocol as run

    spec = _spec(cfg)
    if cfg["action"] == "compose":
        copies = int(cfg["copies"])
        composed = parallel_compose(spec, copies)
        value, _ = optimal_cheating_probability(composed)
        w.json("spec.json", composed.to_json())
        w.json("report.json", {"experiment": "protocol compose", "copies": copies, "name": composed.name,
                               "message_lengths": list(composed.message_lengths),
                               "final_length": composed.final_length, "eps_c": composed.eps_c,
                               "eps_s": composed.eps_s, "optimal_cheat": value})
        return True
    which = cfg["prover"]
    optimum, best = optimal_cheating_probability(spec)
    if which == "honest":
        prover = _honest_prover(spec)
        if prover is None:
            raise ParamError("--prover", "no honest prover exists for this spec (no witness or not GI)")
    else:
        prover = best
    rows = []
    if cfg["mode"] == "exact":
        dist = run(spec, prover, honest_verifier(spec), "exact")
        acc = dist.acceptance
        for (msgs, coins), (p, _, a) in sorted(dist.entries.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0)):
            rows.append(("/".join(map(str, msgs)), "" if coins is None else coins, p, a))
    else:
        rng = fork_rng(cfg["seed"], "protocol/run")
        runs = [run(spec, prover, honest_verifier(spec), "sampled", rng) for _ in range(int(cfg["samples"]))]
        acc = float(np.mean([r.accepted for r in runs]))
        rows = [("/".join(map(str, r.messages)), "" if r.coins is None else r.coins, 1.0 / len(runs),
                 r.accept_probability) for r in runs]
    w.json("report.json", {"experiment": "protocol run", "spec": spec.to_json(), "prover": which,
                           "mode": cfg["mode"], "acceptance": acc, "optimal_cheat": optimum})
    w.csv("transcripts.csv", ["messages", "coins", "probability", "accept"], rows)
    return acc <= optimum + TOL


def run_gi(cfg, w):
    from .protocols import gi_protocol, gi_sequential, honest_verifier, optimal_cheating_probability
    from .protocols import run_protocol as run

    v = int(cfg["vertices"])
    g0, g1 = _edges(cfg["g0"], "--g0"), _edges(cfg["g1"], "--g1")
    if cfg["shape"] == "QAM_2k1":
        spec, prover, witness = gi_sequential(g0, g1, int(cfg["rounds"]), v)
    else:
        spec, prover, witness = gi_protocol(g0, g1, int(cfg["copies"]), cfg["shape"], v)
    report = {"experiment": "gi build", "spec": spec.to_json(), "isomorphic": witness is not None,
              "witness": list(witness) if witness else None}
    if prover is not None:
        report["honest_acceptance"] = run(spec, prover, honest_verifier(spec), "exact").acceptance
    if cfg.get("optimal", True):
        report["optimal_cheat"] = optimal_cheating_probability(spec)[0]
    w.json("spec.json", spec.to_json())
    w.json("report.json", report)
    return True


def run_extract(cfg, w):
    from .extract import algorithm_Z, algorithm_Z_k, algorithm_Z_prime, simulator_from_json

    spec = _spec(cfg)
    if cfg.get("simulator") is None:
        raise ParamError("--simulator", "a simulator file is required")
    sim = simulator_from_json(_read_json(cfg["simulator"], "--simulator"), spec)
    algo = {"zq3": algorithm_Z, "zip3": algorithm_Z_prime, "zk": algorithm_Z_k}[cfg["algorithm"]]
    kwargs = dict(t=int(cfg["t"]), c=float(cfg["c"]), delta=cfg["delta"], mode=cfg["mode"],
                  samples=int(cfg["samples"]), seed=int(cfg["seed"]), limit=cfg.get("limit"),
                  optimal=bool(cfg.get("optimal", True)))
    if cfg["algorithm"] == "zk":
        kwargs["prefix_mode"] = cfg["prefix_mode"]
    q, _, report = algo(spec, sim, **kwargs)
    w.json("report.json", {"experiment": f"extract {cfg['algorithm']}", **report.to_json()})
    w.csv("chain.csv", ["name", "relation", "lhs", "rhs", "slack", "holds"],
          [(ln.name, ln.relation, ln.lhs, ln.rhs, ln.slack, ln.holds) for ln in report.chain])
    rows = []
    for i, (s_tab, b_tab) in enumerate(zip(report.s_tables, report.beta_tables), 1):
        for prefix in sorted(s_tab):
            rows.append((i, "/".join(map(str, prefix)), s_tab[prefix], b_tab[prefix]))
    w.csv("s_table.csv", ["round", "prefix", "s", "beta"], rows)
    return report.ok


def run_searchlab(cfg, w):
    from . import searchlab as sl

    T, n2, c = int(cfg["t"]), int(cfg["n2"]), float(cfg["c"])
    which = cfg["experiment"]
    rows, ok = [], True
    if which == "classical":
        for t in range(T + 1):
            v = float(sl.classical_optimal_search(t, n2))
            rows.append((t, n2, v, (t + 1) / 2**n2))
    elif which == "grover":
        for t in range(T + 1):
            v = sl.grover_search(t, n2, c)
            rows.append((t, n2, v, c * t * t / 2**n2 if t else 2.0**-n2))
    elif which == "equiv":
        from .fieldhash import HashFamily

        n1 = int(cfg.get("n1") or 2)
        for name, alg in sl.equivalence_algorithms(n1).items():
            t = max(1, alg.num_oracle_calls)
            if t > T:
                continue
            d = sl.twise_equivalence_check(alg, n1, n2, t, limit=cfg.get("limit"))
            ctrl = sl.twise_equivalence_check(alg, n1, n2, t, family=HashFamily(n1, n2, 1), limit=cfg.get("limit"))
            rows.append((t, n2, d, 0.0, name, ctrl))
        w.csv("sweep.csv", ["t", "n2", "measured", "bound", "slack", "algorithm", "control"],
              [(t, n, m, b, b - m, a, ctl) for t, n, m, b, a, ctl in rows])
        ok = all(m <= TOL for _, _, m, _, _, _ in rows)
        w.json("report.json", {"experiment": "searchlab equiv", "n1": n1, "n2": n2, "t": T, "rows": rows, "ok": ok})
        return ok
    elif which == "reduce":
        n1 = int(cfg.get("n1") or 1)
        beta = [(a + 1) % (1 << n2) for a in range(1 << n1)]
        for name, alg in sl.reduction_algorithms(n1, n2).items():
            if alg.num_oracle_calls > T:
                continue
            r = sl.reduction_check(alg, beta, n1, n2, cfg.get("limit"))
            rows.append((alg.num_oracle_calls, n2, r["success_B"], r["success_F"], name, r["x_queries"]))
        w.csv("sweep.csv", ["t", "n2", "measured", "bound", "slack", "algorithm", "x_queries"],
              [(t, n, m, b, -abs(b - m), a, x) for t, n, m, b, a, x in rows])
        ok = all(abs(m - b) <= TOL and x <= 2 * t for t, _, m, b, _, x in rows)
        w.json("report.json", {"experiment": "searchlab reduce", "n1": n1, "n2": n2, "rows": rows, "ok": ok})
        return ok
    else:
        raise ParamError("experiment", f"unknown searchlab experiment {which!r}")
    w.csv("sweep.csv", ["t", "n2", "measured", "bound", "slack"], [(t, n, m, b, b - m) for t, n, m, b in rows])
    ok = all(m <= b + TOL for _, _, m, b in rows)
    w.json("report.json", {"experiment": f"searchlab {which}", "n2": n2, "t": T, "c": c, "rows": rows, "ok": ok})
    return ok


def emit_plot_data(paths):
    """Long-format ``(series, x, y)`` rows from report directories or report.json files."""
    rows = []
    for path in paths:
        report_path = os.path.join(path, "report.json") if os.path.isdir(path) else path
        if not os.path.exists(report_path):
            raise FileNotFoundError(f"no report at {report_path}")
        base = os.path.dirname(report_path)
        report = _read_json(report_path, "reports")
        exp = report.get("experiment", "")
        label = os.path.basename(os.path.normpath(base)) or exp
        if exp.startswith("searchlab") and "rows" in report:
            for row in report["rows"]:
                rows.append((f"{label}:success", row[0], row[2]))
        if "s_tables" in report:
            for i, tab in enumerate(report["s_tables"], 1):
                for s in sorted(tab.values()):
                    rows.append((f"{label}:s_round{i}", i, s))
        chain = os.path.join(base, "chain.csv")
        if os.path.exists(chain):
            with open(chain) as fh:
                for j, rec in enumerate(csv.DictReader(fh)):
                    rows.append((f"{label}:slack:{rec['name']}", j, float(rec["slack"])))
    return rows


def run_plot(cfg, w):
    w.csv("plot_data.csv", ["series", "x", "y"], emit_plot_data(cfg.get("reports") or []))
    return True


# -- argument parsing --------------------------------------------------------------


DEFAULTS = {
    "hash-audit": {"n1": 2, "n2": 2, "t": 3},
    "protocol": {"prover": "optimal", "mode": "exact", "seed": 0, "samples": 100, "copies": 2},
    "gi": {"vertices": 3, "copies": 1, "shape": "QAM3", "rounds": 2, "optimal": True},
    "extract": {"t": 1, "c": 10.0, "delta": "auto", "mode": "exact", "seed": 0, "samples": 4096,
                "prefix_mode": "full", "optimal": True},
    "searchlab": {"t": 3, "n2": 2, "c": 10.0},
    "plot": {},
}


RUNNERS = {"hash-audit": run_hash_audit, "protocol": run_protocol, "gi": run_gi, "extract": run_extract,
           "searchlab": run_searchlab, "plot": run_plot}


def build_parser():
    p = argparse.ArgumentParser(prog="zklab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"zklab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON or key = value file of parameters")
        sp.add_argument("--out", help="fresh output directory")
        sp.add_argument("--limit", type=int, help="enumeration cap (default ZKLAB_ENUM_LIMIT or 2^20)")

    sp = sub.add_parser("hash-audit", help="exhaustive audit of a polynomial hash family")
    common(sp)
    sp.add_argument("--n1", type=int)
    sp.add_argument("--n2", type=int)
    sp.add_argument("--t", type=int, help="independence parameter (number of coefficients)")

    sp = sub.add_parser("protocol", help="run or compose a protocol")
    sp.add_argument("action", choices=["run", "compose"])
    common(sp)
    sp.add_argument("--spec")
    sp.add_argument("--prover", choices=["honest", "optimal"])
    sp.add_argument("--mode", choices=["exact", "sampled"])
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--copies", type=int)

    sp = sub.add_parser("gi", help="build a graph-isomorphism protocol")
    sp.add_argument("action", choices=["build"])
    common(sp)
    sp.add_argument("--g0", help="edge list such as 0-1,1-2")
    sp.add_argument("--g1")
    sp.add_argument("--vertices", type=int)
    sp.add_argument("--copies", type=int)
    sp.add_argument("--rounds", type=int)
    sp.add_argument("--shape", choices=["QAM3", "IP3", "QAM_2k1"])

    sp = sub.add_parser("extract", help="run an extraction algorithm on a simulator")
    sp.add_argument("algorithm", choices=["zq3", "zip3", "zk"])
    common(sp)
    sp.add_argument("--spec")
    sp.add_argument("--simulator")
    sp.add_argument("--t", type=int)
    sp.add_argument("--c", type=float)
    sp.add_argument("--delta")
    sp.add_argument("--mode", choices=["exact", "mc"])
    sp.add_argument("--samples", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--prefix-mode", dest="prefix_mode", choices=["full", "last"])

    sp = sub.add_parser("searchlab", help="search-bound experiments")
    sp.add_argument("experiment", choices=["classical", "grover", "equiv", "reduce"])
    common(sp)
    sp.add_argument("--t", type=int)
    sp.add_argument("--n2", type=int)
    sp.add_argument("--n1", type=int)
    sp.add_argument("--c", type=float)

    sp = sub.add_parser("plot", help="long-format plot data from report directories")
    sp.add_argument("reports", nargs="*")
    common(sp)
    return p


def resolve(args):
    """Flags over config file over defaults."""
    cfg = dict(DEFAULTS[args.command])
    if args.config:
        cfg.update(load_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            cfg[key] = value
    if cfg.get("delta") not in (None, "auto"):
        try:
            cfg["delta"] = float(cfg["delta"])
        except ValueError:
            raise ParamError("--delta", f"{cfg['delta']!r} is neither a number nor auto") from None
    if not cfg.get("out"):
        raise ParamError("--out", "an output directory is required")
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = resolve(args)
        writer = RunWriter()
        ok = RUNNERS[args.command](cfg, writer)
        snapshot = {k: v for k, v in sorted(cfg.items()) if k not in ("out",)}
        writer.commit(cfg["out"], _jsonable(snapshot), started)
    except (ConfigurationError, DomainError, FileNotFoundError, KeyError, TypeError, ValueError) as exc:
        print(f"zklab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EnumerationLimitError, BudgetExceededError) as exc:
        print(f"zklab: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ZklabError as exc:
        print(f"zklab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not ok:
        print(f"zklab: verdict failed; see {cfg['out']}/report.json", file=sys.stderr)
        return EXIT_VERDICT
    print(cfg["out"])
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
