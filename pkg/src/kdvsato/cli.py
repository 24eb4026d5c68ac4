"""Command-line entry point: solve runs, verification suites, tabulation.

Subcommands
-----------
solve   --config PATH [--out PATH]
    Evaluate the flow on the configured (t, x) grid and write a CSV
    with columns t, x, q, status, tau_abs, residual.
verify  --suite NAME [--config PATH] [--seed N]
    Run a module invariant suite and print a JSON report; exit 0 iff
    every check passes.
mfun    --config PATH --points FILE [--out PATH]
    Tabulate m, the Weyl pair, reflection coefficient and xi exponents
    at the listed spectral points (one complex number per line).
tau     --config PATH --g SPEC --x-range A:B:H [--out PATH]
    Tabulate the regularized tau of e_x g along an x range.  SPEC is a
    semicolon-separated list of atoms ``h:[c1,c3,...]`` (coefficients
    of z, z^3, ...), ``pole:RE[,IM]`` and ``zero:RE[,IM]``.

Exit codes: 0 success, 1 configuration or usage error, 2 a flow
singularity was encountered (solve still writes the grid with the
status column marking the singular points).

The environment variable KDV_SATO_THREADS caps grid parallelism.
Identical config and seed produce byte-identical output; every output
file embeds the config hash and the library version in '#' comments.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import numpy as np

from .contour import Contour, build_contour
from .errors import (ConfigError, FlowSingularityError, KdvSatoError,
                     OracleError)
from .flow import (FlowResult, GroupElement, kdv_potential,
                   kdv_solution_grid)
from .hardy import boundary_projection_matrix
from .oracle import (PeriodizedField, dense_transfer_det,
                     kdv_reference_integrate, schrodinger_residual)
from .potentials import PotentialSpec, mfunction_from_potential, soliton_m
from .spectral import (MFunction, characteristic_functions, darboux,
                       herglotz_defect, weyl_and_reflection)
from .tau import (RationalFactor, cocycle_check, tau_det2, tau_rational)
from .toeplitz import (assemble_toeplitz, evaluate_group, free_symbol,
                       invert_symbol, multiply_symbols, solve_toeplitz,
                       symbol_from_m)

__version__ = "0.1.0"

SUITES = ("projections", "toeplitz", "tau", "darboux", "flow",
          "conformal", "oracle", "all")

DEFAULT_CONFIG = {
    "contour": {"n": 3, "c": 1.5, "y_max": 24.0, "nodes": 512},
    "potential": {"kind": "soliton", "kappa": 1.0},
    "flow": {"h_coeffs": [0.0, 1.0],
             "t_grid": [0.0],
             "x_grid": {"start": -1.0, "stop": 1.0, "count": 5}},
    "N": 2,
    "L": 6,
    "tolerances": {},
    "seed": 7,
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def load_config(path: str) -> dict:
    """Read and minimally type-check a JSON run configuration."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def config_digest(cfg: dict) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON form."""
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def contour_from_config(cfg: dict) -> Contour:
    sec = cfg.get("contour")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a 'contour' object")
    try:
        n = int(sec["n"])
        c = float(sec["c"])
        y_max = float(sec["y_max"])
        nodes = int(sec["nodes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"contour section incomplete: {exc}") from exc
    kw = {}
    for opt in ("cap_count", "dist_min", "grading"):
        if opt in sec:
            kw[opt] = sec[opt]
    return build_contour(n, c, y_max, nodes, **kw)


def symbol_from_config(cfg: dict, contour: Contour):
    """Build (symbol, meta) from the potential section."""
    sec = cfg.get("potential")
    if not isinstance(sec, dict) or "kind" not in sec:
        raise ConfigError("config needs a 'potential' object with 'kind'")
    L = int(cfg.get("L", 6))
    kind = sec["kind"]
    meta = {"potential": kind}
    if kind == "free":
        return free_symbol(L=L, b=contour.base_point), meta
    if kind == "soliton":
        kappa = float(sec.get("kappa", 1.0))
        m = soliton_m(kappa)
        meta["kappa"] = kappa
        return symbol_from_m(m, L, contour.base_point), meta
    spec = PotentialSpec.from_config(sec)
    m, resid = mfunction_from_potential(spec, L=L)
    meta["name"] = spec.name
    meta["fit_residual"] = resid
    return symbol_from_m(m, L, contour.base_point), meta


def check_tail_resolution(symbol, contour: Contour, h_coeffs: tuple,
                          t_max: float, x_ext: float,
                          tail_max: float) -> None:
    """Reject configurations whose contour tail has not decayed.

    The flow integrands carry the symbol tail atilde ~ C/lam times the
    group magnitude; if their size at the extreme nodes is still a
    sizable fraction of the on-curve maximum, y_max is too small and
    the truncated quadrature cannot be trusted.
    """
    s = symbol.samples(contour)
    mag = np.maximum(np.abs(s["at1"]), np.abs(s["at2"]))
    probe = GroupElement(
        h_coeffs=tuple(t_max * h for h in h_coeffs)).shifted_by_x(x_ext)
    mag = mag * np.abs(evaluate_group(probe, contour.nodes))
    peak = float(np.max(mag))
    if peak == 0.0:
        return
    order = np.argsort(np.abs(contour.nodes.imag))
    tail = float(np.max(mag[order[-8:]]))
    ratio = tail / peak
    if ratio > tail_max:
        raise ConfigError(
            f"y_max={contour.y_max:g} too small: integrand tail magnitude "
            f"{tail:.3e} is {ratio:.2f} of its on-curve peak {peak:.3e} "
            f"(limit {tail_max:g}); increase y_max or nodes")


def parse_grid(spec, name: str) -> np.ndarray:
    """Accept an explicit list or {start, stop, count|step}."""
    if isinstance(spec, (list, tuple)):
        arr = np.asarray([float(v) for v in spec], dtype=float)
        if arr.size == 0:
            raise ConfigError(f"{name} must be non-empty")
        return arr
    if isinstance(spec, dict):
        try:
            start = float(spec["start"])
            stop = float(spec["stop"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name} needs start/stop: {exc}") from exc
        if "count" in spec:
            count = int(spec["count"])
            if count < 1:
                raise ConfigError(f"{name} count must be >= 1")
            return np.linspace(start, stop, count)
        if "step" in spec:
            step = float(spec["step"])
            if step <= 0:
                raise ConfigError(f"{name} step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(count)
        raise ConfigError(f"{name} needs 'count' or 'step'")
    raise ConfigError(f"{name} must be a list or an object")


# ---------------------------------------------------------------------------
# CSV helpers
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return "%.17g" % (float(v) + 0.0)


def _header_lines(cfg: dict) -> list:
    return [
        f"# kdvsato {__version__}",
        f"# config_sha256: {config_digest(cfg)}",
        "# config: " + json.dumps(cfg, sort_keys=True,
                                  separators=(",", ":")),
    ]


def write_grid_csv(path: str, cfg: dict, result: FlowResult) -> None:
    lines = _header_lines(cfg)
    lines.append("t,x,q,status,tau_abs,residual")
    for i, t in enumerate(result.t_grid):
        for j, x in enumerate(result.x_grid):
            status = result.status[i][j].replace(",", ";")
            lines.append(",".join([
                _fmt(t), _fmt(x), _fmt(result.q[i, j]), status,
                _fmt(result.tau_abs[i, j]), _fmt(result.residual[i, j]),
            ]))
    payload = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        raise ConfigError(f"cannot write output {path}: {exc}") from exc


def _write_table(path, cfg, header, rows):
    lines = _header_lines(cfg)
    lines.append(header)
    lines.extend(rows)
    payload = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(payload)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        raise ConfigError(f"cannot write output {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def run_solve(args) -> int:
    cfg = load_config(args.config)
    contour = contour_from_config(cfg)
    symbol, _meta = symbol_from_config(cfg, contour)

    sec = cfg.get("flow")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a 'flow' object")
    h_coeffs = tuple(float(v) for v in sec.get("h_coeffs", [0.0, 1.0]))
    t_grid = parse_grid(sec.get("t_grid", [0.0]), "flow.t_grid")
    x_grid = parse_grid(sec.get("x_grid", [0.0]), "flow.x_grid")

    tol = cfg.get("tolerances", {}) or {}
    tail_max = float(tol.get("tail_max", 0.3))
    check_tail_resolution(symbol, contour, h_coeffs,
                          float(np.max(np.abs(t_grid))),
                          float(np.max(np.abs(x_grid))), tail_max)

    out_sec = cfg.get("output", {}) or {}
    fmt = out_sec.get("format", "csv")
    if fmt != "csv":
        raise ConfigError(f"unsupported output format {fmt!r}")
    out_path = args.out or out_sec.get("path")
    if not out_path:
        raise ConfigError("no output path (config output.path or --out)")

    N = int(cfg.get("N", 2))
    result = kdv_solution_grid(symbol, h_coeffs, t_grid, x_grid, contour,
                               N=N)
    write_grid_csv(out_path, cfg, result)
    singular = sum(1 for row in result.status for s in row if s != "ok")
    total = len(result.t_grid) * len(result.x_grid)
    print(f"wrote {out_path}: {total} points, {singular} singular")
    return 2 if singular else 0


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _check(name, value, bound, larger_is_better=False):
    value = float(value)
    passed = value >= bound if larger_is_better else value <= bound
    return {"check": name, "value": value, "bound": bound,
            "passed": bool(passed)}


def _suite_projections(cfg, rng):
    ct = contour_from_config(cfg)
    K = boundary_projection_matrix(ct)
    lam = ct.nodes
    one = np.ones(lam.size, dtype=complex)
    checks = [_check("projects constants",
                     np.max(np.abs(K @ one - one)), 1e-8)]
    inner = 1.0 / (lam - 0.1j)
    checks.append(_check("annihilates interior-pole kernel",
                         np.max(np.abs(K @ inner)), 1e-6))
    outer = 1.0 / (lam - 2.0 * ct.base_point)
    checks.append(_check("reproduces exterior-pole kernel",
                         np.max(np.abs(K @ outer - outer)), 1e-6))
    return checks


def _suite_toeplitz(cfg, rng):
    ct = contour_from_config(cfg)
    L = int(cfg.get("L", 6))
    free = free_symbol(L=L, b=ct.base_point)
    ident = assemble_toeplitz(free, None, ct, N=2)
    checks = [_check("free symbol assembles identity",
                     np.max(np.abs(ident - np.eye(ct.total_count))), 1e-12)]
    sym, _ = symbol_from_config(cfg, ct)
    matrix = assemble_toeplitz(sym, None, ct, N=2)
    rhs = 1.0 / (ct.nodes - 2.0 * ct.base_point)
    sol = solve_toeplitz(matrix, rhs)
    checks.append(_check("solve residual",
                         np.max(np.abs(matrix @ sol.values - rhs)), 1e-9))
    inv = invert_symbol(sym)
    prod = multiply_symbols(sym, inv)
    s = prod.samples(ct)
    defect = max(np.max(np.abs(s["a1"] - 1.0)), np.max(np.abs(s["a2"] - 1.0)))
    checks.append(_check("symbol times inverse is unit", defect, 1e-9))
    return checks


def _suite_tau(cfg, rng):
    ct = contour_from_config(cfg)
    L = int(cfg.get("L", 6))
    free = free_symbol(L=L, b=ct.base_point)
    gx = np.exp(0.3 * ct.nodes)
    checks = [_check("free symbol tau2 is 1",
                     abs(tau_det2(free, gx, ct, N=2) - 1.0), 1e-9)]
    sym, _ = symbol_from_config(cfg, ct)
    cd = characteristic_functions(sym, ct, N=2)
    zeta = ct.base_point * (1.1 + 0.3j)
    r = RationalFactor.pole_factor(zeta)
    lhs = tau_rational(cd, r)
    rhs = 1.0 + complex(cd.phi_at(zeta))
    checks.append(_check("single-pole tau equals 1 + phi",
                         abs(lhs - rhs) / max(abs(rhs), 1e-300), 1e-8))
    rep = cocycle_check(sym, RationalFactor.pole_factor(1.4 * ct.base_point),
                        RationalFactor.zero_factor(1.2 * ct.base_point),
                        ct, N=2)
    checks.append(_check("rational cocycle defect", rep.defect, 1e-8))
    return checks


def _suite_darboux(cfg, rng):
    m = soliton_m(1.0)
    pts = [complex(rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0))
           for _ in range(40)]
    checks = [_check("base m is Herglotz",
                     herglotz_defect(m, pts), 0.0, True)]
    d = darboux(m, 2.5, 2.0)
    checks.append(_check("Darboux image is Herglotz",
                         herglotz_defect(d, pts), 0.0, True))
    free = MFunction(eval=lambda z: np.asarray(z, dtype=complex),
                     name="free")
    fixed = max(abs(complex(darboux(free, 2.5, 2.0).eval(z)) - z)
                for z in pts)
    checks.append(_check("free m is a fixed point", fixed, 1e-10))
    back = darboux(d, -2.0, -2.5)
    restore = max(abs(complex(back.eval(z)) - complex(m.eval(z)))
                  for z in pts)
    checks.append(_check("inverse pair restores m", restore, 1e-10))
    zbig = complex(1e5, 1e5)
    checks.append(_check("image keeps leading asymptote",
                         abs(complex(d.eval(zbig)) / zbig - 1.0), 1e-8))
    return checks


def _suite_flow(cfg, rng):
    ct = contour_from_config(cfg)
    sym, _ = symbol_from_config(cfg, ct)
    kind = cfg.get("potential", {}).get("kind", "soliton")
    point = kdv_potential(sym, GroupElement.one(), 0.0, ct, N=2)
    checks = []
    if kind == "soliton":
        kappa = float(cfg.get("potential", {}).get("kappa", 1.0))
        checks.append(_check("depth at origin is -2 kappa^2",
                             abs(point.q + 2.0 * kappa ** 2), 1e-4))
        x0 = 0.4
        shifted = kdv_potential(sym, GroupElement.from_x(x0), 0.0, ct, N=2)
        exact = -2.0 * kappa ** 2 / np.cosh(kappa * x0) ** 2
        checks.append(_check("translate matches closed form",
                             abs(shifted.q - exact), 1e-4))
    checks.append(_check("q is real", abs(point.residual), 1e-8))
    return checks


def _suite_conformal(cfg, rng):
    from .conformal import (a_constant, fit_inverse_constants, phi_k,
                            phi_k_inverse)
    checks = [{"check": "a_1 equals 2/3 exactly",
               "value": 0.0, "bound": 0.0,
               "passed": a_constant(1) == Fraction(2, 3)}]
    for k in (1, 2, 3):
        fit = fit_inverse_constants(k)
        checks.append(_check(f"g1(inf) fit k={k}",
                             abs(fit["g1"] - fit["g1_exact"]), 1e-8))
        checks.append(_check(f"g2(inf) fit k={k}",
                             abs(fit["g2"] - fit["g2_exact"]), 1e-8))
    w = 40.0 * np.exp(1j * rng.uniform(0.2, 2.9, size=8))
    err = max(abs(phi_k(phi_k_inverse(wi, 2), 2) - wi) for wi in w)
    checks.append(_check("phi_2 roundtrip", err, 1e-9))
    return checks


def _suite_oracle(cfg, rng):
    q0 = PeriodizedField.from_callable(lambda x: -2.0 / np.cosh(x) ** 2)
    qT = kdv_reference_integrate(q0, 0.1, 1e-4)
    x = qT.x_grid
    checks = [_check("soliton travels at unit speed",
                     np.max(np.abs(qT.samples + 2.0 / np.cosh(x + 0.1) ** 2)),
                     1e-6)]
    z = 0.8 + 0.3j
    xg = np.linspace(-2, 2, 201)
    f = np.exp(-xg * z)
    checks.append(_check("free solution residual",
                         schrodinger_residual(f, xg, lambda s: 0 * s, z),
                         1e-8))
    fbad = f * (1.0 + xg)
    checks.append(_check("negative control residual is large",
                         schrodinger_residual(fbad, xg, lambda s: 0 * s, z),
                         0.1, True))
    ct = build_contour(3, 1.5, 10.0, 512)
    m = soliton_m(1.0)
    sym = symbol_from_m(m, 6, ct.base_point)
    gv = np.exp(0.7 * ct.nodes)
    cd = characteristic_functions(sym, ct, N=2, g=gv)
    r = RationalFactor.pole_factor(2.2) * RationalFactor.zero_factor(2.2)
    closed = tau_rational(cd, r)
    dense = dense_transfer_det(r, sym, ct, N=2, g=gv, dim=120)
    checks.append(_check("dense determinant matches rational tau",
                         abs(dense - closed) / abs(closed), 1e-6))
    return checks


_SUITE_FUNCS = {
    "projections": _suite_projections,
    "toeplitz": _suite_toeplitz,
    "tau": _suite_tau,
    "darboux": _suite_darboux,
    "flow": _suite_flow,
    "conformal": _suite_conformal,
    "oracle": _suite_oracle,
}


def run_verify(args) -> int:
    if args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from "
                          + ", ".join(SUITES))
    cfg = load_config(args.config) if args.config else dict(DEFAULT_CONFIG)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 7))
    names = list(_SUITE_FUNCS) if args.suite == "all" else [args.suite]
    report = {"version": __version__, "config_sha256": config_digest(cfg),
              "seed": seed, "suites": {}}
    all_passed = True
    for name in names:
        rng = np.random.default_rng(seed)
        checks = _SUITE_FUNCS[name](cfg, rng)
        report["suites"][name] = checks
        all_passed &= all(c["passed"] for c in checks)
    report["all_passed"] = bool(all_passed)
    print(json.dumps(report, indent=2))
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# mfun tabulation
# ---------------------------------------------------------------------------


def _parse_points(path: str) -> list:
    points = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read points file {path}: {exc}") from exc
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if len(parts) == 2:
                points.append(complex(float(parts[0]), float(parts[1])))
            else:
                points.append(complex(parts[0].replace("i", "j")))
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{ln}: cannot parse point {line!r}") from exc
    if not points:
        raise ConfigError(f"points file {path} holds no points")
    return points


def run_mfun(args) -> int:
    cfg = load_config(args.config)
    contour = contour_from_config(cfg)
    sec = cfg.get("potential", {"kind": "soliton"})
    kind = sec.get("kind")
    if kind == "soliton":
        m = soliton_m(float(sec.get("kappa", 1.0)))
    elif kind == "free":
        m = MFunction(eval=lambda z: np.asarray(z, dtype=complex),
                      mu0=0.0, asym=[0.0] * 8, real_flag=True, name="free")
    else:
        spec = PotentialSpec.from_config(sec)
        m, _ = mfunction_from_potential(spec, L=int(cfg.get("L", 6)))
    del contour

    points = _parse_points(args.points)
    header = ("z_re,z_im,m_re,m_im,mplus_re,mplus_im,mminus_re,mminus_im,"
              "R_re,R_im,xi1,xi2")
    rows = []
    for z in points:
        if z.imag <= 0.0:
            raise ConfigError(
                f"spectral point {z} must lie in the upper half plane")
        data = weyl_and_reflection(m, z)
        from .spectral import branch_sqrt_neg
        s = complex(branch_sqrt_neg(z))
        mv = complex(m.eval(s))
        rows.append(",".join(_fmt(v) for v in (
            z.real, z.imag, mv.real, mv.imag,
            data.m_plus.real, data.m_plus.imag,
            data.m_minus.real, data.m_minus.imag,
            data.R.real, data.R.imag, data.xi1, data.xi2)))
    _write_table(args.out, cfg, header, rows)
    return 0


# ---------------------------------------------------------------------------
# tau tabulation
# ---------------------------------------------------------------------------


def parse_group_spec(spec: str) -> GroupElement:
    """Parse 'h:[0,1];pole:2.5;zero:1.2,-0.3' into a GroupElement."""
    h_coeffs = ()
    rational = RationalFactor.one()
    for atom in spec.split(";"):
        atom = atom.strip()
        if not atom:
            continue
        if ":" not in atom:
            raise ConfigError(f"bad group atom {atom!r} (need kind:value)")
        kind, _, val = atom.partition(":")
        kind = kind.strip().lower()
        if kind == "h":
            try:
                coeffs = json.loads(val)
                h_coeffs = tuple(float(v) for v in coeffs)
            except (json.JSONDecodeError, TypeError, ValueError) as exc:
                raise ConfigError(
                    f"bad h coefficients {val!r}: {exc}") from exc
        elif kind in ("pole", "zero"):
            try:
                parts = [float(p) for p in val.split(",")]
                datum = complex(parts[0], parts[1] if len(parts) > 1 else 0.0)
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"bad {kind} datum {val!r}") from exc
            factor = (RationalFactor.pole_factor(datum) if kind == "pole"
                      else RationalFactor.zero_factor(datum))
            rational = rational * factor
        else:
            raise ConfigError(f"unknown group atom kind {kind!r}")
    return GroupElement(rational=rational, h_coeffs=h_coeffs)


def parse_range(spec: str) -> np.ndarray:
    try:
        a, b, h = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad range {spec!r}, expected A:B:H") from exc
    if h <= 0 or b < a:
        raise ConfigError("range needs A <= B and H > 0")
    count = int(np.floor((b - a) / h + 1e-9)) + 1
    return a + h * np.arange(count)


def run_tau(args) -> int:
    cfg = load_config(args.config)
    contour = contour_from_config(cfg)
    symbol, _ = symbol_from_config(cfg, contour)
    g = parse_group_spec(args.g)
    g.validate(contour)
    x_grid = parse_range(args.x_range)
    N = int(cfg.get("N", 2))
    header = "x,tau_re,tau_im,status"
    rows = []
    saw_singular = False
    for x in x_grid:
        status = "ok"
        val = complex(float("nan"), float("nan"))
        try:
            gx = g.shifted_by_x(float(x))
            base = evaluate_group(
                GroupElement(h_coeffs=gx.h_coeffs), contour.nodes)
            part = tau_det2(symbol, base, contour, N=N)
            if g.rational.order != 0 or g.rational.poles or g.rational.zeros:
                cd = characteristic_functions(symbol, contour, N=N, g=base)
                part *= tau_rational(cd, g.rational)
            val = complex(part)
        except FlowSingularityError as exc:
            status = f"singular (rcond {exc.rcond:.3e})" if exc.rcond \
                else "singular"
            saw_singular = True
        rows.append(",".join([_fmt(x), _fmt(val.real), _fmt(val.imag),
                              status.replace(",", ";")]))
    _write_table(args.out, cfg, header, rows)
    return 2 if saw_singular else 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvsato",
        description="KdV flows from Weyl m-function data via contour "
                    "Toeplitz determinants.")
    parser.add_argument("--version", action="version",
                        version=f"kdvsato {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="evaluate q(t,x) on a grid")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--out", default=None)

    p_verify = sub.add_parser("verify", help="run an invariant suite")
    p_verify.add_argument("--suite", required=True,
                          help="one of: " + ", ".join(SUITES))
    p_verify.add_argument("--config", default=None)
    p_verify.add_argument("--seed", type=int, default=None)

    p_mfun = sub.add_parser("mfun", help="tabulate Weyl data at points")
    p_mfun.add_argument("--config", required=True)
    p_mfun.add_argument("--points", required=True)
    p_mfun.add_argument("--out", default=None)

    p_tau = sub.add_parser("tau", help="tabulate tau along an x range")
    p_tau.add_argument("--config", required=True)
    p_tau.add_argument("--g", required=True)
    p_tau.add_argument("--x-range", required=True, dest="x_range")
    p_tau.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"solve": run_solve, "verify": run_verify,
                "mfun": run_mfun, "tau": run_tau}
    try:
        return handlers[args.command](args)
    except FlowSingularityError as exc:
        print(f"flow singularity: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OracleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KdvSatoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
