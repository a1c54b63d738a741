"""Command-line entry point: ``domrt {simulate,model,bound,compare,report}``.

Exit codes: 0 success, 1 invalid input, 2 censored runs (simulate),
3 refuted or failed check (compare, bound --validate, report).

Options may also come from ``--config FILE`` (``key = value`` lines, keys as the
long option names without dashes).  Flags override the file, which overrides
built-in defaults; the effective configuration is echoed as ``#`` comments.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Callable

from . import analysis as an
from . import tail_bounds as tb
from .algorithms import ALGOS, CensoredRunsError, RunConfig, SampleSet, collect_samples
from .benchmarks import BENCH_CODES, WeightedGraph
from .dist_core import (DiscreteDist, DomainError, ResourceError, exact_dist, format_spec,
                        parse_spec, spec_mean)
from .operators import parse_op
from .suites import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_CENSORED, EXIT_REFUTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _opt_int(text: str) -> int:
    return int(float(text)) if "e" in text.lower() else int(text)


# (name, type, default, help) per subcommand; names double as config-file keys
OPTIONS: dict[str, list[tuple[str, Callable[[str], Any], Any, str]]] = {
    "simulate": [
        ("algo", str, "ea", f"algorithm: {', '.join(ALGOS)}"),
        ("bench", str, "onemax", f"benchmark: {', '.join(BENCH_CODES)} (jump as jumpK)"),
        ("n", _opt_int, 20, "problem size"),
        ("runs", _opt_int, 1000, "number of independent runs"),
        ("seed", _opt_int, 1, "master seed"),
        ("budget", _opt_int, 10**8, "iteration budget per run"),
        ("metric", str, "iterations", "iterations or evaluations"),
        ("mu", _opt_int, 1, "population size for mu+1 and ea-best-of-mu"),
        ("lambda", _opt_int, 1, "offspring population size for 1+lambda and ollga"),
        ("rate", float, None, "standard-bit mutation rate (default 1/n)"),
        ("op", str, None, "mutation operator, e.g. onebit, kbit:2, sbm:0.1, mixed:0.5"),
        ("target", _opt_int, None, "stop at the first fitness >= target"),
        ("graph", str, None, "graph file for the sssp algorithm"),
        ("with-replacement", _opt_int, 1, "sssp: pick mutated vertices with replacement (0/1)"),
        ("adjacent-only", _opt_int, 0, "sssp: retarget pointers to neighbours only (0/1)"),
        ("out", str, None, "output file (default stdout)"),
    ],
    "model": [
        ("preset", str, None, f"preset: {', '.join(an.PRESET_IDS)}"),
        ("spec", str, None, "explicit spec, e.g. '0 + 0.5:0.25 + 3*0.5'"),
        ("n", _opt_int, None, "problem size"),
        ("k", _opt_int, None, "gap size / bit count"),
        ("p", float, None, "mutation rate (general preset)"),
        ("mu", _opt_int, None, "population size (mu1-lo)"),
        ("lambda", _opt_int, None, "offspring population (1+lambda)"),
        ("m", _opt_int, None, "edge count (eulerian)"),
        ("ell", _opt_int, None, "hop radius (sssp; default n-1)"),
        ("op", str, None, "operator for lo-exact (default onebit)"),
        ("eps", float, 1e-9, "truncation budget"),
        ("out", str, None, "output file (default stdout)"),
    ],
    "bound": [
        ("family", str, None, f"family: {', '.join(tb.FAMILY_IDS)}"),
        ("n", _opt_int, None, "number of terms (or coupon types)"),
        ("m", _opt_int, 1, "number of summed copies (harmonic-sum, coupon)"),
        ("k", _opt_int, None, "missing coupons (coupon)"),
        ("p-min", float, None, "smallest success probability"),
        ("mu", float, None, "mean of the sum (default n / p-min)"),
        ("s", float, None, "sum of squared expectations (witt)"),
        ("C", float, None, "harmonic constant C"),
        ("delta", float, None, "relative deviation delta"),
        ("lambda", float, None, "absolute deviation lambda (witt, harmonic-sum)"),
        ("grid", str, None, "comma-separated list of delta/lambda values"),
        ("validate", str, None, "spec to validate the bound against"),
        ("eps", float, 1e-9, "truncation budget for validation"),
        ("out", str, None, "output file (default stdout)"),
    ],
    "compare": [
        ("a", str, None, "sample-set or distribution CSV (claimed smaller)"),
        ("b", str, None, "sample-set or distribution CSV (claimed larger)"),
        ("alpha", float, 1e-3, "significance of the DKW bands"),
        ("out", str, None, "output file (default stdout)"),
    ],
    "report": [
        ("suite", str, None, "suite id, 'all' or 'list'"),
        ("scale", float, 1.0, "fraction of the documented Monte Carlo run counts"),
        ("out-dir", str, None, "write <suite>.csv and <suite>_cdf.csv here"),
        ("out", str, None, "output file for the result rows (default stdout)"),
    ],
}


def _dest(name: str) -> str:
    return name.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="domrt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None, help="key = value configuration file")
        for name, _, default, help_text in opts:
            # values stay strings here so the file and defaults can be merged underneath
            sp.add_argument(f"--{name}", dest=_dest(name), default=None,
                            help=f"{help_text} [default: {default}]")
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[_dest(key.strip().lstrip("-"))] = val.strip()
    return out


def effective_config(cmd: str, ns: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then config-file values, then explicit flags."""
    opts = OPTIONS[cmd]
    known = {_dest(name) for name, *_ in opts}
    from_file = read_config(ns.config) if ns.config else {}
    unknown = set(from_file) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg: dict[str, Any] = {}
    for name, conv, default, _ in opts:
        key = _dest(name)
        raw = getattr(ns, key)
        if raw is None:
            raw = from_file.get(key)
        if raw is None:
            cfg[key] = default
            continue
        try:
            cfg[key] = conv(raw)
        except ValueError as exc:
            raise UsageError(f"--{name}: cannot parse {raw!r}") from exc
    return cfg


def config_comments(cfg: dict[str, Any]) -> list[str]:
    return [f"config.{k}={v}" for k, v in cfg.items() if v is not None and k != "out"]


def emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_simulate(cfg: dict[str, Any]) -> int:
    if cfg["metric"] not in ("iterations", "evaluations"):
        raise UsageError("--metric must be iterations or evaluations")
    graph = WeightedGraph.read(cfg["graph"]) if cfg["graph"] else None
    algo = cfg["algo"]
    rc = RunConfig(
        algo,
        None if algo in ("sssp", "sorting") else cfg["bench"],
        cfg["n"],
        op=parse_op(cfg["op"]) if cfg["op"] else None,
        rate=cfg["rate"],
        mu=cfg["mu"],
        lam=cfg["lambda"],
        budget=cfg["budget"],
        target=cfg["target"],
        graph=graph,
        with_replacement=bool(cfg["with_replacement"]),
        adjacent_only=bool(cfg["adjacent_only"]),
    )
    try:
        s = collect_samples(rc, cfg["runs"], cfg["seed"], cfg["metric"])
    except CensoredRunsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CENSORED
    extra = {c.split("=", 1)[0]: c.split("=", 1)[1] for c in config_comments(cfg)}
    emit(s.to_csv(extra), cfg["out"])
    return EXIT_OK


def cmd_model(cfg: dict[str, Any]) -> int:
    eps = cfg["eps"]
    if cfg["spec"]:
        spec = parse_spec(cfg["spec"])
        dist = exact_dist(spec, eps)
        label = format_spec(spec)
    elif cfg["preset"]:
        name = cfg["preset"]
        params: dict[str, Any] = {}
        for key, pkey in (("n", "n"), ("k", "k"), ("p", "p"), ("mu", "mu"), ("lambda", "lam"),
                          ("m", "m")):
            if cfg[key] is not None:
                params[pkey] = cfg[key]
        if name == "lo-exact":
            params["op"] = parse_op(cfg["op"] or "onebit")
        if name == "sssp":
            params["ell"] = cfg["ell"] if cfg["ell"] is not None else (cfg["n"] or 0) - 1
        if name not in an.PRESET_IDS:
            raise UsageError(f"unknown preset {name!r}; valid: {', '.join(an.PRESET_IDS)}")
        dist = an.preset_dist(name, eps, **params)
        label = name
    else:
        raise UsageError("model needs --preset or --spec")
    comments = config_comments(cfg) + [f"model={label}", f"mean={dist.mean!r}"]
    emit(dist.to_csv(comments), cfg["out"])
    return EXIT_OK


def _family_values(cfg: dict[str, Any], param: float) -> tuple[float, float]:
    """(threshold, bound) of the requested family from flag values."""
    fam = cfg["family"]
    n, m, k = cfg["n"], cfg["m"], cfg["k"]
    need = lambda *keys: [_require(cfg, key) for key in keys]  # noqa: E731
    if fam in tb.UPPER_FAMILIES:
        (n,) = need("n")
        p = cfg["p_min"] if cfg["p_min"] is not None else 1.0
        mu = cfg["mu"] if cfg["mu"] is not None else n / p
        return (1 + param) * mu, tb.geom_sum_upper(fam, n, p, mu, param)
    if fam in ("janson-lower", "middle", "scheideler-lower"):
        p, mu = need("p_min", "mu")
        return (1 - param) * mu, tb.geom_sum_lower(fam.removesuffix("-lower"), p, mu, param)
    if fam in ("witt", "witt-lower"):
        s, p, mu = need("s", "p_min", "mu")
        up, lo = tb.witt_bounds(s, p, mu, param)
        return (mu + param, up) if fam == "witt" else (mu - param, lo)
    if fam == "harmonic":
        (n,) = need("n")
        C = cfg["C"] if cfg["C"] is not None else 1.0
        return tb.harmonic_threshold(n, C, param), tb.harmonic_bound(n, C, param)[1]
    if fam == "harmonic-sum":
        (n,) = need("n")
        C = cfg["C"] if cfg["C"] is not None else 1.0
        return tb.harmonic_sum_threshold(n, m, C, param), tb.harmonic_sum_bound(n, m, C, param)
    if fam == "coupon":
        n, k = need("n", "k")
        return tb.coupon_threshold(n, m, k, param), tb.coupon_sum_bound(n, m, k, param)[1]
    raise UsageError(f"unknown family {fam!r}; valid: {', '.join(tb.FAMILY_IDS)}")


def _require(cfg, key):
    if cfg[key] is None:
        raise UsageError(f"--{key.replace('_', '-')} is required for family {cfg['family']}")
    return cfg[key]


def cmd_bound(cfg: dict[str, Any]) -> int:
    fam = cfg["family"]
    if fam not in tb.FAMILY_IDS:
        raise UsageError(f"unknown family {fam!r}; valid: {', '.join(tb.FAMILY_IDS)}")
    uses_lambda = fam in ("witt", "witt-lower", "harmonic-sum")
    if cfg["grid"]:
        try:
            params = [float(v) for v in cfg["grid"].split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"--grid: cannot parse {cfg['grid']!r}") from exc
    else:
        val = cfg["lambda"] if uses_lambda else cfg["delta"]
        if val is None:
            raise UsageError(f"family {fam} needs --{'lambda' if uses_lambda else 'delta'}")
        params = [val]
    spec = parse_spec(cfg["validate"]) if cfg["validate"] else None
    if spec is not None:
        summ = tb.SpecSummary.of(spec)
        fill = {"n": summ.n, "p_min": summ.p_min, "mu": summ.mu, "s": summ.s, "C": summ.C}
        for key, val in fill.items():
            if cfg[key] is None:
                cfg[key] = val
    lines = [f"# {c}" for c in config_comments(cfg)]
    if fam == "coupon" and cfg["n"] is not None and cfg["k"] is not None:
        lines.append(f"# mean={tb.coupon_sum_bound(cfg['n'], cfg['m'], cfg['k'], 0.0)[0]!r}")
    header = "family,param,threshold,bound" + (",exact,verdict" if spec is not None else "")
    lines.append(header)
    all_ok = True
    for prm in params:
        thr, bnd = _family_values(cfg, prm)
        row = f"{fam},{prm!r},{thr!r},{bnd!r}"
        if spec is not None:
            lower = fam in ("janson-lower", "middle", "scheideler-lower", "witt-lower")
            check = tb.validate_lower_bound if lower else tb.validate_bound
            v = check(spec, thr, bnd, cfg["eps"])
            exact = v.label.split(" = ")[1].split(" vs ")[0]
            row += f",{exact},{'PASS' if v else 'FAIL'}"
            all_ok &= bool(v)
        lines.append(row)
    emit("\n".join(lines) + "\n", cfg["out"])
    return EXIT_OK if all_ok else EXIT_REFUTED


def load_distribution_or_samples(path: str):
    text = Path(path).read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "runtime":
            return SampleSet.from_csv(text)
        if line.replace(" ", "") == "k,pmf,cdf":
            return DiscreteDist.from_csv(text)
        break
    raise DomainError(f"{path}: neither a sample-set nor a distribution CSV")


def cmd_compare(cfg: dict[str, Any]) -> int:
    if not cfg["a"] or not cfg["b"]:
        raise UsageError("compare needs --a and --b")
    a = load_distribution_or_samples(cfg["a"])
    b = load_distribution_or_samples(cfg["b"])
    v = an.empirical_dominates(a, b, cfg["alpha"])
    lines = [f"# {c}" for c in config_comments(cfg)]
    lines.append("verdict,at,gap")
    lines.append(f"{v.label},{'' if v.at is None else v.at},{'' if v.gap is None else repr(v.gap)}")
    emit("\n".join(lines) + "\n", cfg["out"])
    return EXIT_OK if v else EXIT_REFUTED


def cmd_report(cfg: dict[str, Any]) -> int:
    name = cfg["suite"]
    if name == "list":
        emit("\n".join(SUITES) + "\n", cfg["out"])
        return EXIT_OK
    if name != "all" and name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; valid: list, all, {', '.join(SUITES)}")
    names = list(SUITES) if name == "all" else [name]
    chunks, ok = [], True
    for nm in names:
        res = run_suite(nm, cfg["scale"])
        ok &= res.passed
        rows = res.rows_csv()
        chunks.append(rows if not chunks else rows.split("\n", 1)[1])
        if cfg["out_dir"]:
            out = Path(cfg["out_dir"])
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{nm}.csv").write_text(rows)
            if res.overlay:
                (out / f"{nm}_cdf.csv").write_text(res.overlay_csv())
    emit("".join(chunks), cfg["out"])
    return EXIT_OK if ok else EXIT_REFUTED


COMMANDS = {
    "simulate": cmd_simulate,
    "model": cmd_model,
    "bound": cmd_bound,
    "compare": cmd_compare,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = effective_config(ns.command, ns)
        return COMMANDS[ns.command](cfg)
    except (UsageError, ValueError, ResourceError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
